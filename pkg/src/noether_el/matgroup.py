"""Matrices over exact scalars, elementary words, levels and reduction maps.

Two matrix flavours coexist here:

* generic matrices — tuples of row tuples whose entries are Python ints or
  :class:`~noether_el.poly.Polynomial`; arithmetic is duck-typed and exact,
* quotient matrices — flat ``d*d`` tuples of residue indices into a
  :class:`~noether_el.quotients.QuotientContext`, used by the group
  enumeration code where table lookups beat object arithmetic.

Words of elementary matrices are lists of ``(i, j, value)`` letters with
``i != j`` (0-based positions).  The same letter shape is used for both
flavours; only the meaning of ``value`` differs.
"""

from __future__ import annotations

import itertools
from typing import List, Sequence, Tuple

from .caps import Caps, default_caps
from .errors import CapExceeded, NotInvertible, ValidationError
from .ideals import Ideal, Ring, ideal_product
from .poly import Polynomial
from .quotients import QuotientContext

Letter = Tuple[int, int, object]


# ---------------------------------------------------------------------------
# generic exact matrices (int or Polynomial entries)


def mat_identity(d: int):
    return tuple(
        tuple(1 if i == j else 0 for j in range(d)) for i in range(d)
    )


def mat_from_rows(rows) -> tuple:
    out = tuple(tuple(r) for r in rows)
    d = len(out)
    if any(len(r) != d for r in out):
        raise ValidationError("matrix must be square")
    return out


def mat_mul(a, b):
    d = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(d)) for j in range(d))
        for i in range(d)
    )


def mat_add(a, b):
    d = len(a)
    return tuple(tuple(a[i][j] + b[i][j] for j in range(d)) for i in range(d))


def mat_sub(a, b):
    d = len(a)
    return tuple(tuple(a[i][j] - b[i][j] for j in range(d)) for i in range(d))


def mat_scale(c, a):
    return tuple(tuple(c * x for x in row) for row in a)


def mat_transpose(a):
    d = len(a)
    return tuple(tuple(a[j][i] for j in range(d)) for i in range(d))


def elementary_matrix(d: int, i: int, j: int, value):
    """Identity plus ``value`` in position (i, j); the letter e_ij(value)."""
    if i == j or not (0 <= i < d and 0 <= j < d):
        raise ValidationError("elementary positions must be distinct and in range")
    rows = [[1 if r == c else 0 for c in range(d)] for r in range(d)]
    rows[i][j] = value
    return mat_from_rows(rows)


def det(a, caps: Caps | None = None):
    """Exact determinant by signed permutation expansion.

    The dimension cap keeps the d! term count honest; everything this
    package enumerates lives in d <= 6.
    """
    caps = caps or default_caps()
    d = len(a)
    if d > caps.max_det_dim:
        raise CapExceeded(f"determinant expansion capped at dimension {caps.max_det_dim}")
    if d == 0:
        return 1
    total = 0
    for perm in itertools.permutations(range(d)):
        sign = _perm_sign(perm)
        prod = a[0][perm[0]]
        for i in range(1, d):
            prod = prod * a[i][perm[i]]
        total = total + (prod if sign > 0 else -prod)
    return total


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def adjugate(a, caps: Caps | None = None):
    d = len(a)
    if d == 1:
        return ((1,),)
    cof = []
    for i in range(d):
        row = []
        for j in range(d):
            minor = tuple(
                tuple(a[r][c] for c in range(d) if c != j)
                for r in range(d)
                if r != i
            )
            m = det(minor, caps)
            row.append(m if (i + j) % 2 == 0 else -m)
        cof.append(tuple(row))
    return mat_transpose(tuple(cof))


def mat_inverse_unimodular(a, caps: Caps | None = None):
    """Inverse of an integer matrix with determinant +-1."""
    dv = det(a, caps)
    if dv == 1:
        return adjugate(a, caps)
    if dv == -1:
        return mat_scale(-1, adjugate(a, caps))
    raise NotInvertible(f"determinant is {dv}, not a unit in the integers")


def check_entry_bound(a, caps: Caps | None = None) -> None:
    caps = caps or default_caps()
    for row in a:
        for x in row:
            if isinstance(x, int) and abs(x) > caps.entry_bound:
                raise CapExceeded(
                    f"matrix entry exceeds the bound {caps.entry_bound}"
                )


# ---------------------------------------------------------------------------
# elementary words


def word_matrix(word: Sequence[Letter], d: int):
    out = mat_identity(d)
    for (i, j, v) in word:
        out = mat_mul(out, elementary_matrix(d, i, j, v))
    return out


def word_inverse(word: Sequence[Letter]) -> List[Letter]:
    return [(i, j, -v) for (i, j, v) in reversed(word)]


# ---------------------------------------------------------------------------
# quotient matrices: flat tuples of residue indices


def qmat_identity(ctx: QuotientContext, d: int):
    one, zero = ctx.one, ctx.zero
    return tuple(one if i % (d + 1) == 0 else zero for i in range(d * d))


def qmat_from_rows(ctx: QuotientContext, rows):
    d = len(rows)
    flat = []
    for r in rows:
        if len(r) != d:
            raise ValidationError("matrix must be square")
        flat.extend(ctx.reduce(x) for x in r)
    return tuple(flat)


def qmat_rows(ctx: QuotientContext, d: int, m):
    return tuple(tuple(ctx.lift(m[i * d + j]) for j in range(d)) for i in range(d))


def qmat_mul(ctx: QuotientContext, d: int, a, b):
    add = ctx.add_table
    mul = ctx.mul_table
    out = []
    for i in range(d):
        arow = a[i * d : i * d + d]
        for j in range(d):
            acc = mul[arow[0]][b[j]]
            for k in range(1, d):
                acc = add[acc][mul[arow[k]][b[k * d + j]]]
            out.append(acc)
    return tuple(out)


def qmat_apply(ctx: QuotientContext, d: int, m, vec):
    """Image of a length-d column vector of residues under the matrix."""
    add = ctx.add_table
    mul = ctx.mul_table
    out = []
    for i in range(d):
        acc = mul[m[i * d]][vec[0]]
        for k in range(1, d):
            acc = add[acc][mul[m[i * d + k]][vec[k]]]
        out.append(acc)
    return tuple(out)


def qmat_elementary(ctx: QuotientContext, d: int, i: int, j: int, value: int):
    """e_ij(value) with ``value`` a residue index."""
    if i == j or not (0 <= i < d and 0 <= j < d):
        raise ValidationError("elementary positions must be distinct and in range")
    flat = list(qmat_identity(ctx, d))
    flat[i * d + j] = value
    return tuple(flat)


def qmat_scalar(ctx: QuotientContext, d: int, u: int):
    zero = ctx.zero
    return tuple(u if i % (d + 1) == 0 else zero for i in range(d * d))


def qmat_det(ctx: QuotientContext, d: int, m, caps: Caps | None = None) -> int:
    caps = caps or default_caps()
    if d > caps.max_det_dim:
        raise CapExceeded(f"determinant expansion capped at dimension {caps.max_det_dim}")
    add = ctx.add_table
    mul = ctx.mul_table
    total = ctx.zero
    for perm in itertools.permutations(range(d)):
        prod = m[perm[0]]
        for i in range(1, d):
            prod = mul[prod][m[i * d + perm[i]]]
        if _perm_sign(perm) < 0:
            prod = ctx.neg_table[prod]
        total = add[total][prod]
    return total


def qmat_inverse(ctx: QuotientContext, d: int, m, caps: Caps | None = None):
    dv = qmat_det(ctx, d, m, caps)
    try:
        dinv = ctx.inv(dv)
    except NotInvertible:
        raise NotInvertible("matrix determinant is not a unit in the quotient")
    if d == 1:
        return (dinv,)
    mul = ctx.mul_table
    out = [ctx.zero] * (d * d)
    for i in range(d):
        for j in range(d):
            minor = tuple(
                tuple(m[r * d + c] for c in range(d) if c != j)
                for r in range(d)
                if r != i
            )
            cof = _qmat_det_rows(ctx, minor)
            if (i + j) % 2 == 1:
                cof = ctx.neg_table[cof]
            # adjugate transposes the cofactor grid
            out[j * d + i] = mul[dinv][cof]
    return tuple(out)


def _qmat_det_rows(ctx: QuotientContext, rows) -> int:
    d = len(rows)
    if d == 0:
        return ctx.one
    add = ctx.add_table
    mul = ctx.mul_table
    total = ctx.zero
    for perm in itertools.permutations(range(d)):
        prod = rows[0][perm[0]]
        for i in range(1, d):
            prod = mul[prod][rows[i][perm[i]]]
        if _perm_sign(perm) < 0:
            prod = ctx.neg_table[prod]
        total = add[total][prod]
    return total


def q_word_matrix(ctx: QuotientContext, word: Sequence[Letter], d: int):
    """Evaluate a word whose letter values are residue indices."""
    out = qmat_identity(ctx, d)
    for (i, j, v) in word:
        out = qmat_mul(ctx, d, out, qmat_elementary(ctx, d, i, j, v))
    return out


def q_word_inverse(ctx: QuotientContext, word: Sequence[Letter]) -> List[Letter]:
    return [(i, j, ctx.neg(v)) for (i, j, v) in reversed(word)]


# ---------------------------------------------------------------------------
# levels


def sl_level(rows, ring: Ring) -> Ideal:
    """Smallest ideal I with g congruent to the identity mod I."""
    d = len(rows)
    gens = []
    for i in range(d):
        for j in range(d):
            e = ring.coerce(rows[i][j]) - ring.coerce(1 if i == j else 0)
            gens.append(e)
    return Ideal(ring, gens)


def sltil_level(rows, ring: Ring) -> Ideal:
    """Smallest ideal I with g scalar mod I: off-diagonal entries plus
    pairwise differences of diagonal entries."""
    d = len(rows)
    gens = []
    for i in range(d):
        for j in range(d):
            if i != j:
                gens.append(ring.coerce(rows[i][j]))
    for i in range(1, d):
        gens.append(ring.coerce(rows[i][i]) - ring.coerce(rows[0][0]))
    return Ideal(ring, gens)


def q_sl_level(ctx: QuotientContext, d: int, m) -> Ideal:
    """sl-level of a quotient matrix, as an ideal of the base ring
    containing the modulus."""
    rows = qmat_rows(ctx, d, m)
    lifted = sl_level(rows, ctx.ring)
    return Ideal(ctx.ring, list(lifted.gens) + list(ctx.modulus.gens))


def q_sltil_level(ctx: QuotientContext, d: int, m) -> Ideal:
    rows = qmat_rows(ctx, d, m)
    lifted = sltil_level(rows, ctx.ring)
    return Ideal(ctx.ring, list(lifted.gens) + list(ctx.modulus.gens))


def qmat_in_sl_level(ctx: QuotientContext, d: int, m, subset) -> bool:
    """Fast test: is every entry of m - identity inside the given residue
    subset?  ``subset`` should be the image of an ideal under the quotient."""
    one = ctx.one
    sub = ctx.sub
    for i in range(d):
        for j in range(d):
            e = m[i * d + j]
            if i == j:
                e = sub(e, one)
            if e not in subset:
                return False
    return True


def qmat_in_sltil_level(ctx: QuotientContext, d: int, m, subset) -> bool:
    sub = ctx.sub
    top = m[0]
    for i in range(d):
        for j in range(d):
            e = m[i * d + j]
            if i == j:
                e = sub(e, top)
            if e not in subset:
                return False
    return True


# ---------------------------------------------------------------------------
# structure predicates: membership in distinguished subgroups, their
# normalizers and centralizers, in closed form


def in_horizontal(ctx: QuotientContext, d: int, i: int, m) -> bool:
    """Membership in the group generated by e_ij for all j != i: identity
    except for free entries along row i."""
    one, zero = ctx.one, ctx.zero
    for r in range(d):
        for c in range(d):
            e = m[r * d + c]
            if r == c:
                if e != one:
                    return False
            elif r != i and e != zero:
                return False
    return True


def in_vertical(ctx: QuotientContext, d: int, i: int, m) -> bool:
    one, zero = ctx.one, ctx.zero
    for r in range(d):
        for c in range(d):
            e = m[r * d + c]
            if r == c:
                if e != one:
                    return False
            elif c != i and e != zero:
                return False
    return True


def in_embedded_block(ctx: QuotientContext, d: int, i: int, m) -> bool:
    """The copy of SL_(d-1) fixing the i-th coordinate and its dual: 1 at
    (i, i) and zeros along the rest of row and column i."""
    if m[i * d + i] != ctx.one:
        return False
    return all(
        m[i * d + j] == ctx.zero and m[j * d + i] == ctx.zero
        for j in range(d)
        if j != i
    )


def normalizes_vertical(ctx: QuotientContext, d: int, i: int, m) -> bool:
    """Closed form for the normalizer of the column-i group: row i must
    vanish off the diagonal."""
    return all(m[i * d + j] == ctx.zero for j in range(d) if j != i)


def normalizes_horizontal(ctx: QuotientContext, d: int, i: int, m) -> bool:
    """Closed form for the normalizer of the row-i group: column i must
    vanish off the diagonal."""
    return all(m[j * d + i] == ctx.zero for j in range(d) if j != i)


def centralizes_elementary(ctx: QuotientContext, d: int, i: int, j: int,
                           x: int, m) -> bool:
    """Closed form for the centralizer of e_ij(x): the off-diagonal entries
    of column i and of row j, and the difference of the two diagonal
    entries, must all annihilate x.  For a unit x this amounts to exact
    vanishing and equality."""
    zero, mul = ctx.zero, ctx.mul
    for k in range(d):
        if k != i and mul(m[k * d + i], x) != zero:
            return False
    for l in range(d):
        if l != j and mul(m[j * d + l], x) != zero:
            return False
    return mul(ctx.sub(m[i * d + i], m[j * d + j]), x) == zero


def is_central(ctx: QuotientContext, d: int, m) -> bool:
    """Scalar matrices u * I with u^d = 1 — the center of both the special
    linear and the elementary group."""
    u = m[0]
    if m != qmat_scalar(ctx, d, u):
        return False
    return u in ctx.units and ctx.power(u, d) == ctx.one


def centralizes_vertical(ctx: QuotientContext, d: int, i: int, m) -> bool:
    """Closed form for the centralizer of the column-i group: a central
    scalar times an element of the group itself, i.e. constant diagonal u
    with u^d = 1 and support otherwise confined to column i."""
    u = m[0]
    if not (u in ctx.units and ctx.power(u, d) == ctx.one):
        return False
    for r in range(d):
        for c in range(d):
            e = m[r * d + c]
            if r == c:
                if e != u:
                    return False
            elif c != i and e != ctx.zero:
                return False
    return True


def centralizes_horizontal(ctx: QuotientContext, d: int, i: int, m) -> bool:
    """Mirror image of :func:`centralizes_vertical` for the row-i group."""
    u = m[0]
    if not (u in ctx.units and ctx.power(u, d) == ctx.one):
        return False
    for r in range(d):
        for c in range(d):
            e = m[r * d + c]
            if r == c:
                if e != u:
                    return False
            elif r != i and e != ctx.zero:
                return False
    return True


# ---------------------------------------------------------------------------
# scalar matrices as words of elementary letters


def _weyl_letters(i: int, j: int, x: int, y: int, ctx: QuotientContext) -> List[Letter]:
    """Letters of e_ij(x) e_ji(-y) e_ij(x); the monomial matrix with x at
    (i, j) and -y at (j, i) when x*y = 1."""
    return [(i, j, x), (j, i, ctx.neg(y)), (i, j, x)]


def center_word(ctx: QuotientContext, d: int, u: int) -> List[Letter]:
    """A word of elementary letters evaluating to the scalar matrix u * I_d.

    Requires u to be a unit of the quotient with u^d = 1; otherwise the
    scalar matrix has determinant different from 1 and no such word exists.
    The word chains diagonal blocks diag(.., u^i, u^-i, ..) down the main
    diagonal, six letters per adjacent pair.
    """
    if d < 3:
        raise ValidationError("scalar words need dimension at least 3")
    if u not in ctx.units:
        raise ValidationError(f"{ctx.describe(u)} is not a unit")
    if ctx.power(u, d) != ctx.one:
        raise ValidationError(
            f"{ctx.describe(u)}^{d} is not 1, so u*I is outside the elementary group"
        )
    if u == ctx.one:
        return []
    minus_one = ctx.neg(ctx.one)
    word: List[Letter] = []
    for i in range(1, d):
        x = ctx.power(u, i)
        y = ctx.inv(x)
        # diag(1, .., u^i, u^-i, .., 1) at positions (i-1, i)
        word.extend(_weyl_letters(i - 1, i, x, y, ctx))
        word.extend(_weyl_letters(i - 1, i, minus_one, minus_one, ctx))
    if q_word_matrix(ctx, word, d) != qmat_scalar(ctx, d, u):
        raise ValidationError("scalar word failed to evaluate; tables are inconsistent")
    return word


# ---------------------------------------------------------------------------
# reduction of small-level matrices to additive data


def iota(rows, level: Ideal, target: Ideal, caps: Caps | None = None):
    """Flatten a matrix of sl-level inside ``level`` to an additive matrix
    of residues mod ``target``.

    Requires level*level inside target; then (I + A)(I + B) = I + A + B up
    to target, so the map g -> g - I is a homomorphism onto trace-zero
    matrices over level/target.  Entries of the result are canonical
    residues mod target.
    """
    caps = caps or default_caps()
    ring = level.ring
    if target.ring != ring:
        raise ValidationError("level and target ideals must share a ring")
    if not target.contains_ideal(ideal_product(level, level)):
        raise ValidationError("the square of the level ideal must lie in the target")
    d = len(rows)
    coerced = tuple(tuple(ring.coerce(x) for x in row) for row in rows)
    dv = det(coerced, caps)
    if Ideal(ring, []).normal_form(dv - ring.coerce(1)) != 0:
        raise ValidationError("matrix determinant is not 1")
    out = []
    trace = ring.coerce(0)
    for i in range(d):
        row = []
        for j in range(d):
            e = coerced[i][j] - ring.coerce(1 if i == j else 0)
            if not level.contains(e):
                raise ValidationError(
                    "matrix is not congruent to the identity modulo the level ideal"
                )
            if i == j:
                trace = trace + e
            row.append(target.normal_form(e))
        out.append(tuple(row))
    if target.normal_form(trace) != 0:
        raise ValidationError("trace of g - I is not in the target ideal")
    return tuple(out)
