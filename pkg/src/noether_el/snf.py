"""Smith normal form over the integers, with transform matrices.

`smith_normal_form(A)` returns (U, Uinv, D, V) with U*A*V = D, U and V
unimodular, and D diagonal with nonnegative entries d1 | d2 | ... .  The
inverse of U is tracked during the elimination because callers need to pull
standard basis vectors back through the change of coordinates.

Matrices are lists of lists of ints; inputs are not modified.
"""

from __future__ import annotations

from typing import List, Tuple

Matrix = List[List[int]]


def identity_matrix(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul_int(a: Matrix, b: Matrix) -> Matrix:
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for k in range(inner):
            c = ai[k]
            if c:
                bk = b[k]
                for j in range(cols):
                    oi[j] += c * bk[j]
    return out


def smith_normal_form(a: Matrix) -> Tuple[Matrix, Matrix, Matrix, Matrix]:
    """Diagonalise `a` by unimodular row and column operations.

    Returns (U, Uinv, D, V) with U*a*V = D and d1 | d2 | ... | dr >= 0.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    d = [row[:] for row in a]
    u = identity_matrix(m)
    uinv = identity_matrix(m)
    v = identity_matrix(n)

    def row_sub(i: int, j: int, q: int) -> None:  # row_i -= q * row_j
        for c in range(n):
            d[i][c] -= q * d[j][c]
        for c in range(m):
            u[i][c] -= q * u[j][c]
        for r in range(m):
            uinv[r][j] += q * uinv[r][i]

    def row_swap(i: int, j: int) -> None:
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]
        for r in range(m):
            uinv[r][i], uinv[r][j] = uinv[r][j], uinv[r][i]

    def row_negate(i: int) -> None:
        d[i] = [-x for x in d[i]]
        u[i] = [-x for x in u[i]]
        for r in range(m):
            uinv[r][i] = -uinv[r][i]

    def col_sub(j: int, i: int, q: int) -> None:  # col_j -= q * col_i
        for r in range(m):
            d[r][j] -= q * d[r][i]
        for r in range(n):
            v[r][j] -= q * v[r][i]

    def col_swap(i: int, j: int) -> None:
        for r in range(m):
            d[r][i], d[r][j] = d[r][j], d[r][i]
        for r in range(n):
            v[r][i], v[r][j] = v[r][j], v[r][i]

    t = 0
    while t < min(m, n):
        # locate the entry of least nonzero magnitude in the working block
        pivot = None
        best = None
        for i in range(t, m):
            for j in range(t, n):
                val = abs(d[i][j])
                if val and (best is None or val < best):
                    best = val
                    pivot = (i, j)
        if pivot is None:
            break
        pi, pj = pivot
        if pi != t:
            row_swap(t, pi)
        if pj != t:
            col_swap(t, pj)
        if d[t][t] < 0:
            row_negate(t)

        dirty = False
        for i in range(t + 1, m):
            if d[i][t]:
                q = d[i][t] // d[t][t]
                row_sub(i, t, q)
                if d[i][t]:
                    dirty = True
        for j in range(t + 1, n):
            if d[t][j]:
                q = d[t][j] // d[t][t]
                col_sub(j, t, q)
                if d[t][j]:
                    dirty = True
        if dirty:
            continue  # smaller remainders appeared; re-pick the pivot

        # pivot must divide the rest of the block for the divisibility chain
        stray = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if d[i][j] % d[t][t]:
                    stray = i
                    break
            if stray is not None:
                break
        if stray is not None:
            row_sub(t, stray, -1)  # fold the offending row into row t
            continue
        t += 1

    return u, uinv, d, v


def diagonal_of(d: Matrix) -> List[int]:
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]


def invariant_factors(a: Matrix) -> List[int]:
    """Diagonal of the Smith form with the unit entries dropped.

    Zero entries (free ranks) are kept at the end of the list.
    """
    _, _, d, _ = smith_normal_form(a)
    out = [x for x in diagonal_of(d) if x != 1]
    return out
