"""Stable-range shortening and the conjugation normal form for SL_d(Z).

Over the integers (stable rank 2), any unimodular tuple can lose a
designated coordinate after adding multiples of it to the others.  For
d >= 3 this turns into a normal form under conjugation: every g in
SL_d(Z) is conjugate, by an explicit product of elementary matrices, to
h * v * h' * v' * n where h, h' are row-one transvections, v, v' are
column-one transvections, h' is the fixed letter e_01(-1), and n fixes
the first basis vector and its dual.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from typing import List, Sequence, Tuple

from .caps import Caps, default_caps
from .errors import CapExceeded, ValidationError
from .groebner import ext_gcd
from .matgroup import (
    Letter,
    check_entry_bound,
    det,
    elementary_matrix,
    mat_inverse_unimodular,
    mat_mul,
    q_word_inverse,
    q_word_matrix,
    qmat_det,
    qmat_elementary,
    qmat_identity,
    qmat_inverse,
    qmat_mul,
    word_matrix,
)
from .quotients import QuotientContext

_SHELL_LIMIT = 4


def _shell_values(radius: int) -> List[int]:
    out = [0]
    for v in range(1, radius + 1):
        out.extend((v, -v))
    return out


def shorten_unimodular(values: Sequence[int], caps: Caps | None = None) -> Tuple[int, ...]:
    """Shift coefficients s making gcd(a_i + s_i * t) = 1.

    ``values`` is (a_1, ..., a_m, t) with gcd of the whole tuple 1; the
    result drops the final coordinate.  Candidates are searched by
    increasing maximum shift, earlier coordinates varying fastest, so the
    answer is deterministic and as small as the problem allows; a
    constructive residue argument guarantees an answer exists when the
    search shells run out.
    """
    caps = caps or default_caps()
    if len(values) < 2:
        raise ValidationError("need at least one coordinate plus the final multiplier")
    *a, t = (int(v) for v in values)
    if math.gcd(*a, t) != 1:
        raise ValidationError("input tuple is not unimodular")
    m = len(a)
    for radius in range(_SHELL_LIMIT + 1):
        vals = _shell_values(radius)
        for combo in itertools.product(vals, repeat=m):
            if radius and max(abs(c) for c in combo) < radius:
                continue
            s = combo[::-1]
            if math.gcd(*(ai + si * t for ai, si in zip(a, s))) == 1:
                return s
    return _shorten_constructive(a, t, caps)


def _shorten_constructive(a: List[int], t: int, caps: Caps) -> Tuple[int, ...]:
    if len(a) == 1:
        # a_1 + s*t must be a unit of Z
        for unit in (1, -1):
            if t != 0 and (unit - a[0]) % t == 0:
                return ((unit - a[0]) // t,)
        raise ValidationError("no single shift reaches a unit")
    # Only primes dividing every a_i for i >= 2 can obstruct; pick s_1 so
    # that a_1 + s_1 t = 1 modulo each of them.  Primes dividing t never
    # obstruct: they would have to divide gcd(a, t) = 1.
    from .finiteness import factorize

    rest = 0
    for ai in a[1:]:
        rest = math.gcd(rest, ai)
    if rest == 0:
        raise ValidationError("no shift of the first coordinate can work")
    factors, cofactor = factorize(rest, caps.replace(allow_partial_factorization=False))
    residues, moduli = [], []
    for p, _ in factors:
        if t % p == 0:
            continue
        residues.append(((1 - a[0]) * pow(t, -1, p)) % p)
        moduli.append(p)
    s1 = _crt(residues, moduli)
    out = (s1,) + (0,) * (len(a) - 1)
    if math.gcd(*(ai + si * t for ai, si in zip(a, out))) != 1:
        raise ValidationError("constructive shortening failed")
    return out


def _crt(residues: List[int], moduli: List[int]) -> int:
    x, m = 0, 1
    for r, p in zip(residues, moduli):
        g, u, _ = ext_gcd(m, p)
        x = (x + (r - x) * u * m // g) % (m * p // g)
        m = m * p // g
    return x


def shorten_unimodular_ctx(ctx: QuotientContext, values: Sequence[int]) -> Tuple[int, ...]:
    """Finite-quotient analogue, exhaustive over canonical residue order.

    ``values`` are residue indices; the result makes the shifted tuple
    generate the unit ideal of the quotient.
    """
    if len(values) < 2:
        raise ValidationError("need at least one coordinate plus the final multiplier")
    a, t = list(values[:-1]), values[-1]
    if not _generates_unit_ideal(ctx, a + [t]):
        raise ValidationError("input tuple is not unimodular")
    m = len(a)
    if ctx.size**m > 10**6:
        raise CapExceeded("too many candidate shifts to enumerate")
    for combo in itertools.product(range(ctx.size), repeat=m):
        s = combo[::-1]
        shifted = [ctx.add(ai, ctx.mul(si, t)) for ai, si in zip(a, s)]
        if _generates_unit_ideal(ctx, shifted):
            return s
    raise ValidationError("no shift works in this quotient")


def _generates_unit_ideal(ctx: QuotientContext, elems: Sequence[int]) -> bool:
    seeds = sorted({ctx.mul(e, r) for e in elems for r in range(ctx.size)})
    return ctx.one in ctx.additive_closure(seeds)


def stable_range(ctx: QuotientContext, caps: Caps | None = None) -> int:
    """Smallest n such that every unimodular (n+1)-tuple of residues can be
    shortened, verified exhaustively for tuple lengths up to 4 and cached
    on the context.  Finite commutative rings always come out at 1; the
    longer lengths exist so the claim is checked rather than assumed.
    """
    cached = getattr(ctx, "_stable_range", None)
    if cached is not None:
        return cached
    caps = caps or default_caps()
    for n in range(1, _SHELL_LIMIT):
        if ctx.size ** (2 * n + 1) > 10**7:
            raise CapExceeded("stable range verification is too large to enumerate")
        if _every_tuple_shortens(ctx, n):
            ctx._stable_range = n
            return n
    raise ValidationError("no stable range at or below 3 could be verified")


def _every_tuple_shortens(ctx: QuotientContext, n: int) -> bool:
    if n == 1:
        # a single residue generates the unit ideal exactly when it is a
        # unit, so no ideal closures are needed on this, the common, level
        for a in range(ctx.size):
            for t in range(ctx.size):
                if any(ctx.add(a, ctx.mul(s, t)) in ctx.units
                       for s in range(ctx.size)):
                    continue
                if _generates_unit_ideal(ctx, (a, t)):
                    return False
        return True
    for v in itertools.product(range(ctx.size), repeat=n + 1):
        if not _generates_unit_ideal(ctx, v):
            continue
        a, t = v[:-1], v[-1]
        if not any(
            _generates_unit_ideal(
                ctx, [ctx.add(ai, ctx.mul(si, t)) for ai, si in zip(a, s)]
            )
            for s in itertools.product(range(ctx.size), repeat=n)
        ):
            return False
    return True


def _solve_bezout(coeffs: Sequence[int], target: int) -> List[int]:
    """Integer u with sum(u_i * coeffs_i) = target; needs gcd | target."""
    g = 0
    out: List[int] = []
    for b in coeffs:
        g_new, x, y = ext_gcd(g, b)
        out = [c * x for c in out]
        out.append(y)
        g = g_new
    if g == 0:
        if target != 0:
            raise ValidationError("zero coefficients cannot reach a nonzero target")
        return [0] * len(coeffs)
    if target % g:
        raise ValidationError("target is not a multiple of the gcd")
    k = target // g
    out = [c * k for c in out]
    if sum(u * b for u, b in zip(out, coeffs)) != target:
        raise ValidationError("linear solve failed")
    return out


@dataclasses.dataclass(frozen=True)
class ConjugateNormalForm:
    """c^-1 g c = h v h' v' n, all matrices explicit and exact.

    ``conjugator`` is c; ``conjugator_word`` evaluates to it letter by
    letter, so membership of c in the elementary group is witnessed."""

    conjugator: tuple
    conjugator_word: Tuple[Letter, ...]
    h: tuple
    v: tuple
    h_prime: tuple
    v_prime: tuple
    n: tuple

    @property
    def result(self) -> tuple:
        return mat_mul(
            mat_mul(mat_mul(mat_mul(self.h, self.v), self.h_prime), self.v_prime),
            self.n,
        )


def normal_form_conjugate(g, caps: Caps | None = None) -> ConjugateNormalForm:
    """Conjugate g in SL_d(Z), d >= 3, into the h v h' v' n shape.

    The steps: shorten the first column so that it is unimodular without
    its second entry; fix up with a Bezout combination so a single
    row/column pair of transvections makes the corner entry 1; sweep the
    rest of the first row and column.  Each step is a conjugation or an
    explicitly inverted left multiplication, so the factorization is exact
    and is re-verified before returning.
    """
    caps = caps or default_caps()
    d = len(g)
    if d < 3:
        raise ValidationError("the conjugation normal form needs dimension at least 3")
    g = tuple(tuple(int(x) for x in row) for row in g)
    if det(g, caps) != 1:
        raise ValidationError("matrix determinant is not 1")

    # 1. make column-one unimodular with its second entry removed
    col = [g[i][0] for i in range(d)]
    keep = [0] + list(range(2, d))
    s = shorten_unimodular([col[p] for p in keep] + [col[1]], caps)
    c1_word: List[Letter] = [
        (p, 1, sv) for p, sv in zip(keep, s) if sv != 0
    ]
    c1 = word_matrix(c1_word, d)
    g1 = mat_mul(mat_mul(c1, g), mat_inverse_unimodular(c1, caps))
    col1 = [g1[i][0] for i in range(d)]

    # 2. Bezout: u over the kept positions with
    #    sum u_p col1[p] = 1 - col1[0] - col1[1]
    u = _solve_bezout([col1[p] for p in keep], 1 - col1[0] - col1[1])
    u0 = u[0]
    c2_word: List[Letter] = [
        (1, p, uv) for p, uv in zip(keep[1:], u[1:]) if uv != 0
    ]
    c2 = word_matrix(c2_word, d)
    g2 = mat_mul(mat_mul(c2, g1), mat_inverse_unimodular(c2, caps))

    # 3. h1 v1 g2 has 1 in the corner: (1 + u0) g2[0][0] + g2[1][0] = 1
    h1 = elementary_matrix(d, 0, 1, 1)
    v1 = elementary_matrix(d, 1, 0, u0)
    m = mat_mul(mat_mul(h1, v1), g2)
    if m[0][0] != 1:
        raise ValidationError("corner normalization failed")

    # 4. clear the first column, then the first row
    v2_word: List[Letter] = [
        (i, 0, -m[i][0]) for i in range(1, d) if m[i][0] != 0
    ]
    v2 = word_matrix(v2_word, d)
    a = mat_mul(v2, m)
    h2_word: List[Letter] = [
        (0, j, -a[0][j]) for j in range(1, d) if a[0][j] != 0
    ]
    h2 = word_matrix(h2_word, d)
    n = mat_mul(a, h2)

    # 5. conjugating by h2^-1 turns the left-multiplications into factors:
    #    h2^-1 g2 h2 = (h2^-1) (v1^-1) (h1^-1) (v2^-1) n
    h2_inv_word = [(i, j, -v) for (i, j, v) in h2_word]
    h = word_matrix(h2_inv_word, d)
    v = elementary_matrix(d, 1, 0, -u0)
    h_prime = elementary_matrix(d, 0, 1, -1)
    v_prime = word_matrix([(i, j, -val) for (i, j, val) in v2_word], d)

    # the steps so far conjugate g on the left: w g w^-1 = h v h' v' n
    # with w = h2^-1 c2 c1; report c = w^-1 so that c^-1 g c is the form
    word: List[Letter] = list(h2_inv_word) + list(c2_word) + list(c1_word)
    conj_word = [(i, j, -val) for (i, j, val) in reversed(word)]
    w = word_matrix(word, d)
    c = word_matrix(conj_word, d)
    form = ConjugateNormalForm(
        conjugator=c,
        conjugator_word=tuple(conj_word),
        h=h,
        v=v,
        h_prime=h_prime,
        v_prime=v_prime,
        n=n,
    )
    if mat_mul(mat_mul(w, g), c) != form.result:
        raise ValidationError("normal form failed to re-multiply")
    _check_shapes(form, d)
    check_entry_bound(c, caps)
    check_entry_bound(form.result, caps)
    return form


@dataclasses.dataclass(frozen=True)
class CtxConjugateNormalForm:
    """Quotient-ring version of the conjugation normal form; matrices are
    flat tuples of residue indices and ``result`` is stored explicitly."""

    conjugator: tuple
    conjugator_word: Tuple[Letter, ...]
    h: tuple
    v: tuple
    h_prime: tuple
    v_prime: tuple
    n: tuple
    result: tuple


def normal_form_conjugate_ctx(ctx: QuotientContext, g,
                              caps: Caps | None = None) -> CtxConjugateNormalForm:
    """Conjugation normal form over a finite quotient.

    Valid whenever d exceeds the ring's stable range, which for a finite
    quotient is verified exhaustively rather than taken on faith.  For
    d >= 3 the integer pipeline carries over with residue arithmetic; at
    d = 2 (possible because finite rings have stable range 1) there are no
    spare positions for the Bezout repair, so the conjugator is found by
    searching the elementary group directly.
    """
    caps = caps or default_caps()
    d = math.isqrt(len(g))
    if d * d != len(g):
        raise ValidationError("flat matrix length is not a perfect square")
    if qmat_det(ctx, d, g, caps) != ctx.one:
        raise ValidationError("matrix determinant is not 1")
    if d < stable_range(ctx, caps) + 1:
        raise ValidationError("dimension below stable range")
    if d == 2:
        return _normal_form_dim_two(ctx, g, caps)

    one, zero = ctx.one, ctx.zero

    col = [g[i * d] for i in range(d)]
    keep = [0] + list(range(2, d))
    s = shorten_unimodular_ctx(ctx, [col[p] for p in keep] + [col[1]])
    c1_word: List[Letter] = [(p, 1, sv) for p, sv in zip(keep, s) if sv != zero]
    c1 = q_word_matrix(ctx, c1_word, d)
    g1 = qmat_mul(ctx, d, qmat_mul(ctx, d, c1, g), qmat_inverse(ctx, d, c1, caps))
    col1 = [g1[i * d] for i in range(d)]

    target = ctx.sub(ctx.sub(one, col1[0]), col1[1])
    u = _solve_bezout_ctx(ctx, [col1[p] for p in keep], target)
    u0 = u[0]
    c2_word: List[Letter] = [
        (1, p, uv) for p, uv in zip(keep[1:], u[1:]) if uv != zero
    ]
    c2 = q_word_matrix(ctx, c2_word, d)
    g2 = qmat_mul(ctx, d, qmat_mul(ctx, d, c2, g1), qmat_inverse(ctx, d, c2, caps))

    h1 = qmat_elementary(ctx, d, 0, 1, one)
    v1 = qmat_elementary(ctx, d, 1, 0, u0)
    m = qmat_mul(ctx, d, qmat_mul(ctx, d, h1, v1), g2)
    if m[0] != one:
        raise ValidationError("corner normalization failed")

    v2_word: List[Letter] = [
        (i, 0, ctx.neg(m[i * d])) for i in range(1, d) if m[i * d] != zero
    ]
    v2 = q_word_matrix(ctx, v2_word, d)
    a = qmat_mul(ctx, d, v2, m)
    h2_word: List[Letter] = [
        (0, j, ctx.neg(a[j])) for j in range(1, d) if a[j] != zero
    ]
    h2 = q_word_matrix(ctx, h2_word, d)
    n = qmat_mul(ctx, d, a, h2)

    h2_inv_word = q_word_inverse(ctx, h2_word)
    h = q_word_matrix(ctx, h2_inv_word, d)
    v = qmat_elementary(ctx, d, 1, 0, ctx.neg(u0))
    h_prime = qmat_elementary(ctx, d, 0, 1, ctx.neg(one))
    v_prime = q_word_matrix(
        ctx, [(i, j, ctx.neg(val)) for (i, j, val) in v2_word], d
    )

    word: List[Letter] = list(h2_inv_word) + list(c2_word) + list(c1_word)
    conj_word = q_word_inverse(ctx, word)
    w = q_word_matrix(ctx, word, d)
    c = q_word_matrix(ctx, conj_word, d)
    result = qmat_mul(
        ctx, d,
        qmat_mul(ctx, d, qmat_mul(ctx, d, qmat_mul(ctx, d, h, v), h_prime), v_prime),
        n,
    )
    form = CtxConjugateNormalForm(
        conjugator=c,
        conjugator_word=tuple(conj_word),
        h=h,
        v=v,
        h_prime=h_prime,
        v_prime=v_prime,
        n=n,
        result=result,
    )
    if qmat_mul(ctx, d, qmat_mul(ctx, d, w, g), c) != result:
        raise ValidationError("normal form failed to re-multiply")
    _check_shapes_ctx(ctx, form, d)
    return form


def _normal_form_dim_two(ctx: QuotientContext, g,
                         caps: Caps) -> CtxConjugateNormalForm:
    """Search SL_2 over the quotient for a conjugate of the h v h' v' shape.

    For a conjugate t, matching entries of e01(x) e10(y) e01(-1) e10(z)
    forces y = 1 - t_11 and leaves two one-variable equations for x and z,
    so each candidate costs a couple of residue sweeps.  Conjugators are
    walked in breadth-first word order, making the reported word minimal
    and the answer deterministic.
    """
    one, zero = ctx.one, ctx.zero
    letters = [
        (i, j, v)
        for i, j in ((0, 1), (1, 0))
        for v in ctx.additive_generators()
        if v != zero
    ]
    steps = [(letter, qmat_elementary(ctx, 2, *letter),
              qmat_elementary(ctx, 2, letter[0], letter[1], ctx.neg(letter[2])))
             for letter in letters]
    ident = qmat_identity(ctx, 2)
    seen = {ident: ()}
    frontier: List[tuple] = [ident]
    while frontier:
        for cmat in frontier:
            cword = seen[cmat]
            cinv = qmat_inverse(ctx, 2, cmat, caps)
            t = qmat_mul(ctx, 2, qmat_mul(ctx, 2, cmat, g), cinv)
            match = _match_dim_two_factors(ctx, t)
            if match is not None:
                x, y, z = match
                # the walk found c with c g c^-1 = t; report its inverse
                conj_word = q_word_inverse(ctx, list(cword))
                form = CtxConjugateNormalForm(
                    conjugator=qmat_inverse(ctx, 2, cmat, caps),
                    conjugator_word=tuple(conj_word),
                    h=qmat_elementary(ctx, 2, 0, 1, x),
                    v=qmat_elementary(ctx, 2, 1, 0, y),
                    h_prime=qmat_elementary(ctx, 2, 0, 1, ctx.neg(one)),
                    v_prime=qmat_elementary(ctx, 2, 1, 0, z),
                    n=ident,
                    result=t,
                )
                if q_word_matrix(ctx, conj_word, 2) != form.conjugator:
                    raise ValidationError("conjugator word failed to evaluate")
                _check_shapes_ctx(ctx, form, 2)
                return form
        fresh: List[tuple] = []
        for cmat in frontier:
            for letter, step, _ in steps:
                nxt = qmat_mul(ctx, 2, step, cmat)
                if nxt not in seen:
                    if len(seen) >= caps.max_elements:
                        raise CapExceeded("conjugator search passed the element cap")
                    seen[nxt] = (letter,) + seen[cmat]
                    fresh.append(nxt)
        frontier = fresh
    raise ValidationError("no conjugate admits the normal form")


def _match_dim_two_factors(ctx: QuotientContext, t):
    """Solve e01(x) e10(y) e01(-1) e10(z) = t entrywise, or return None."""
    one = ctx.one
    y = ctx.sub(one, t[3])
    rhs_x = ctx.add(t[1], one)
    rhs_z = ctx.sub(t[2], y)
    for x in range(ctx.size):
        if ctx.mul(x, t[3]) != rhs_x:
            continue
        for z in range(ctx.size):
            if ctx.mul(z, t[3]) != rhs_z:
                continue
            prod = qmat_mul(
                ctx, 2,
                qmat_mul(
                    ctx, 2,
                    qmat_mul(ctx, 2, qmat_elementary(ctx, 2, 0, 1, x),
                             qmat_elementary(ctx, 2, 1, 0, y)),
                    qmat_elementary(ctx, 2, 0, 1, ctx.neg(one)),
                ),
                qmat_elementary(ctx, 2, 1, 0, z),
            )
            if prod == t:
                return x, y, z
    return None


def _solve_bezout_ctx(ctx: QuotientContext, coeffs: Sequence[int],
                      target: int) -> List[int]:
    """Residues u with sum(u_i * coeffs_i) = target, by exhaustive search
    in canonical order."""
    m = len(coeffs)
    if ctx.size**m > 10**6:
        raise CapExceeded("too many candidate combinations to enumerate")
    for combo in itertools.product(range(ctx.size), repeat=m):
        u = combo[::-1]
        acc = ctx.zero
        for ui, bi in zip(u, coeffs):
            acc = ctx.add(acc, ctx.mul(ui, bi))
        if acc == target:
            return list(u)
    raise ValidationError("target is not an ideal combination of the coefficients")


def _check_shapes_ctx(ctx: QuotientContext, form: CtxConjugateNormalForm,
                      d: int) -> None:
    one, zero = ctx.one, ctx.zero
    for mat, rows, cols in (
        (form.h, {0}, set(range(1, d))),
        (form.v, set(range(1, d)), {0}),
        (form.h_prime, {0}, set(range(1, d))),
        (form.v_prime, set(range(1, d)), {0}),
    ):
        for i in range(d):
            for j in range(d):
                e = mat[i * d + j]
                if i == j:
                    if e != one:
                        raise ValidationError("transvection factor has a bad diagonal")
                elif e != zero and not (i in rows and j in cols):
                    raise ValidationError("transvection factor has support off its line")
    n = form.n
    if n[0] != one or any(n[j] != zero for j in range(1, d)) or any(
        n[i * d] != zero for i in range(1, d)
    ):
        raise ValidationError("final factor does not fix the first coordinate")


def _check_shapes(form: ConjugateNormalForm, d: int) -> None:
    for mat, rows, cols in (
        (form.h, {0}, set(range(1, d))),
        (form.v, set(range(1, d)), {0}),
        (form.h_prime, {0}, set(range(1, d))),
        (form.v_prime, set(range(1, d)), {0}),
    ):
        for i in range(d):
            for j in range(d):
                if i == j:
                    if mat[i][j] != 1:
                        raise ValidationError("transvection factor has a bad diagonal")
                elif mat[i][j] != 0 and not (i in rows and j in cols):
                    raise ValidationError("transvection factor has support off its line")
    n = form.n
    if n[0][0] != 1 or any(n[0][j] != 0 for j in range(1, d)) or any(
        n[i][0] != 0 for i in range(1, d)
    ):
        raise ValidationError("final factor does not fix the first coordinate")
