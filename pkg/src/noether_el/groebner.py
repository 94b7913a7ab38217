"""Strong Groebner bases over the integers, plus field bases mod p.

Over Z a basis is *strong* when every leading term of the ideal is divisible
by the leading term of a basis element, monomial and coefficient both.  The
completion below is Buchberger's algorithm extended with gcd-polynomials:
for each pair we consider

  S(f, g) = (m/a) x^(L-lm f) f - (m/b) x^(L-lm g) g      m = lcm(a, b)
  G(f, g) = u (L/lm f) f + v (L/lm g) g                  u a + v b = gcd(a, b)

with L = lcm of the leading monomials and a, b the (positive) leading
coefficients.  Reduction is *strong*: a term c x^m is reducible by g when
lm(g) divides m and the floor quotient c // lc(g) is nonzero, so canonical
residues carry coefficients in [0, lc).

All routines are deterministic: bases are kept in a canonical sort and the
pair queue pops in a fixed key order, so equal inputs give identical output
lists, element by element.
"""

from __future__ import annotations

import heapq
from typing import Iterable, List, Sequence, Tuple

from .caps import Caps, default_caps
from .errors import CapExceeded
from .poly import (
    GREVLEX,
    Expo,
    Polynomial,
    TermOrder,
    expo_degree,
    expo_div,
    expo_divides,
    expo_lcm,
    expo_mul,
)


def ext_gcd(a: int, b: int) -> Tuple[int, int, int]:
    """(g, u, v) with u*a + v*b = g = gcd(a, b); g >= 0 when a, b >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def poly_sort_key(p: Polynomial, order: TermOrder = GREVLEX):
    """Total order on polynomials: compare sorted term lists, leading first."""
    return tuple((order.key(e), c) for e, c in p.sorted_terms(order))


def _sign_normalized(p: Polynomial, order: TermOrder) -> Polynomial:
    _, c = p.leading_term(order)
    return -p if c < 0 else p


def normal_form(
    f: Polynomial, basis: Iterable[Polynomial], order: TermOrder = GREVLEX
) -> Polynomial:
    """Strong remainder of f on division by `basis`.

    Repeatedly takes the largest reducible term c x^m, finds the first basis
    element g with lm(g) | m and c // lc(g) != 0, and subtracts the matching
    multiple.  When `basis` is a strong Groebner basis the result is the
    canonical coset representative: every coefficient of the output lies in
    [0, lam(m)) where lam(m) is the least leading coefficient usable at m.
    """
    lead = []
    for g in basis:
        if g.is_zero():
            continue
        g = _sign_normalized(g, order)
        e, c = g.leading_term(order)
        lead.append((e, c, g))
    if not lead:
        return f
    rem = f
    while True:
        hit = None
        for e in sorted(rem.terms, key=order.key, reverse=True):
            c = rem.terms[e]
            for ge, gc, g in lead:
                if expo_divides(ge, e):
                    q = c // gc
                    if q:
                        hit = (expo_div(e, ge), q, g)
                        break
            if hit:
                break
        if hit is None:
            return rem
        shift, q, g = hit
        rem = rem - Polynomial.term(rem.nvars, shift, q) * g


def s_polynomial(f: Polynomial, g: Polynomial, order: TermOrder) -> Polynomial:
    fe, fc = f.leading_term(order)
    ge, gc = g.leading_term(order)
    big = expo_lcm(fe, ge)
    m = fc * gc // _gcd(fc, gc)
    return (
        Polynomial.term(f.nvars, expo_div(big, fe), m // fc) * f
        - Polynomial.term(f.nvars, expo_div(big, ge), m // gc) * g
    )


def g_polynomial(f: Polynomial, g: Polynomial, order: TermOrder) -> Polynomial:
    fe, fc = f.leading_term(order)
    ge, gc = g.leading_term(order)
    big = expo_lcm(fe, ge)
    _, u, v = ext_gcd(fc, gc)
    return (
        Polynomial.term(f.nvars, expo_div(big, fe), u) * f
        + Polynomial.term(f.nvars, expo_div(big, ge), v) * g
    )


def _gcd(a: int, b: int) -> int:
    from math import gcd

    return gcd(a, b)


def strong_groebner(
    gens: Sequence[Polynomial],
    order: TermOrder = GREVLEX,
    caps: Caps | None = None,
) -> List[Polynomial]:
    """Auto-reduced strong Groebner basis of the ideal generated by `gens`.

    Leading coefficients in the output are positive and the list is sorted
    with the largest leading term first; the unit ideal always returns [1].
    Raises CapExceeded when the pair count or the lcm degree cap is hit.
    """
    caps = caps or default_caps()
    nvars = gens[0].nvars if gens else 0
    basis: List[Polynomial] = []
    seen = set()
    for g in sorted(
        (_sign_normalized(p, order) for p in gens if not p.is_zero()),
        key=lambda p: poly_sort_key(p, order),
    ):
        if g not in seen:
            seen.add(g)
            basis.append(g)
    if not basis:
        return []

    # Pair queue keyed by (lcm degree, lcm order key, kind, i, j); kind 0 is
    # the S-pair, kind 1 the G-pair of (i, j).
    queue: list = []

    def push_pairs(j: int) -> None:
        # No coprimality pruning here: over Z even disjoint leading monomials
        # with coprime leading coefficients can demand a new basis element
        # (the gcd-polynomial of 2x1 and 3x2 has leading term x1*x2).  The
        # only safe skip is the G-pair whose quotient construction degenerates
        # to a monomial multiple of one input, i.e. when one leading
        # coefficient divides the other.
        ge, gc = basis[j].leading_term(order)
        for i in range(j):
            fe, fc = basis[i].leading_term(order)
            big = expo_lcm(fe, ge)
            key = (expo_degree(big), order.key(big))
            heapq.heappush(queue, key + (0, i, j))
            if fc % gc and gc % fc:
                heapq.heappush(queue, key + (1, i, j))

    for j in range(len(basis)):
        push_pairs(j)

    processed = 0
    while queue:
        deg, _, kind, i, j = heapq.heappop(queue)
        if deg > caps.max_gb_degree:
            raise CapExceeded(
                f"Groebner lcm degree {deg} exceeds cap {caps.max_gb_degree}"
            )
        processed += 1
        if processed > caps.max_gb_pairs:
            raise CapExceeded(f"Groebner pair cap {caps.max_gb_pairs} exceeded")
        f, g = basis[i], basis[j]
        cand = s_polynomial(f, g, order) if kind == 0 else g_polynomial(f, g, order)
        rem = normal_form(cand, basis, order)
        if rem.is_zero():
            continue
        basis.append(_sign_normalized(rem, order))
        push_pairs(len(basis) - 1)

    return _auto_reduce(basis, order)


def _auto_reduce(basis: List[Polynomial], order: TermOrder) -> List[Polynomial]:
    # Drop elements whose leading term is strongly divisible by another's.
    basis = sorted(set(basis), key=lambda p: poly_sort_key(p, order))
    kept: List[Polynomial] = []
    for g in basis:
        ge, gc = g.leading_term(order)
        redundant = False
        for h in kept:
            he, hc = h.leading_term(order)
            if expo_divides(he, ge) and gc % hc == 0:
                redundant = True
                break
        if not redundant:
            kept.append(g)
    # Tail-reduce to a fixpoint; leading terms are stable by minimality.
    for _ in range(1000):
        changed = False
        for idx, g in enumerate(kept):
            others = kept[:idx] + kept[idx + 1 :]
            r = normal_form(g, others, order)
            if r != g:
                kept[idx] = _sign_normalized(r, order)
                changed = True
        if not changed:
            break
    else:  # pragma: no cover - fixpoint loop is Noetherian
        raise CapExceeded("auto-reduction failed to stabilise")
    kept.sort(key=lambda p: poly_sort_key(p, order), reverse=True)
    return kept


def is_strong_groebner(
    basis: Sequence[Polynomial], order: TermOrder = GREVLEX
) -> bool:
    """Check the Buchberger criterion: all S- and G-polynomials reduce to 0."""
    polys = [g for g in basis if not g.is_zero()]
    for j in range(len(polys)):
        for i in range(j):
            for cand in (
                s_polynomial(polys[i], polys[j], order),
                g_polynomial(polys[i], polys[j], order),
            ):
                if not normal_form(cand, polys, order).is_zero():
                    return False
    return True


# ---------------------------------------------------------------------------
# Groebner bases over the prime field F_p


def _mod_p(p: Polynomial, m: int) -> Polynomial:
    return Polynomial(p.nvars, {e: c % m for e, c in p.terms.items() if c % m})


def _monic_p(f: Polynomial, m: int, order: TermOrder) -> Polynomial:
    _, c = f.leading_term(order)
    inv = pow(c, -1, m)
    return Polynomial(f.nvars, {e: (v * inv) % m for e, v in f.terms.items()})


def normal_form_mod_p(
    f: Polynomial, basis: Sequence[Polynomial], p: int, order: TermOrder = GREVLEX
) -> Polynomial:
    """Full remainder mod p; basis elements must already be reduced mod p."""
    lead = [(g.leading_term(order)[0], g) for g in basis if not g.is_zero()]
    rem = _mod_p(f, p)
    while True:
        hit = None
        for e in sorted(rem.terms, key=order.key, reverse=True):
            for ge, g in lead:
                if expo_divides(ge, e):
                    hit = (e, ge, g)
                    break
            if hit:
                break
        if hit is None:
            return rem
        e, ge, g = hit
        c = rem.terms[e]
        ge_, gc = g.leading_term(order)
        q = (c * pow(gc, -1, p)) % p
        rem = _mod_p(rem - Polynomial.term(rem.nvars, expo_div(e, ge), q) * g, p)


def groebner_mod_p(
    gens: Sequence[Polynomial],
    p: int,
    order: TermOrder = GREVLEX,
    caps: Caps | None = None,
) -> List[Polynomial]:
    """Reduced (monic) Groebner basis of the reduction of `gens` mod p."""
    caps = caps or default_caps()
    basis: List[Polynomial] = []
    for g in sorted(
        (_mod_p(f, p) for f in gens), key=lambda q: poly_sort_key(q, order)
    ):
        if not g.is_zero() and g not in basis:
            basis.append(_monic_p(g, p, order))
    if not basis:
        return []

    queue: list = []

    def push_pairs(j: int) -> None:
        ge = basis[j].leading_term(order)[0]
        for i in range(j):
            fe = basis[i].leading_term(order)[0]
            big = expo_lcm(fe, ge)
            if big == expo_mul(fe, ge):  # coprime monomials
                continue
            heapq.heappush(queue, (expo_degree(big), order.key(big), i, j))

    for j in range(len(basis)):
        push_pairs(j)

    processed = 0
    while queue:
        deg, _, i, j = heapq.heappop(queue)
        if deg > caps.max_gb_degree:
            raise CapExceeded(
                f"Groebner lcm degree {deg} exceeds cap {caps.max_gb_degree}"
            )
        processed += 1
        if processed > caps.max_gb_pairs:
            raise CapExceeded(f"Groebner pair cap {caps.max_gb_pairs} exceeded")
        f, g = basis[i], basis[j]
        fe = f.leading_term(order)[0]
        ge = g.leading_term(order)[0]
        big = expo_lcm(fe, ge)
        spoly = (
            Polynomial.term(f.nvars, expo_div(big, fe), 1) * f
            - Polynomial.term(f.nvars, expo_div(big, ge), 1) * g
        )
        rem = normal_form_mod_p(spoly, basis, p, order)
        if rem.is_zero():
            continue
        basis.append(_monic_p(rem, p, order))
        push_pairs(len(basis) - 1)

    # Reduce: minimal leading monomials, then tails.
    basis.sort(key=lambda q: poly_sort_key(q, order))
    minimal: List[Polynomial] = []
    for g in basis:
        ge = g.leading_term(order)[0]
        if not any(expo_divides(h.leading_term(order)[0], ge) for h in minimal):
            minimal.append(g)
    reduced = []
    for idx, g in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1 :]
        reduced.append(normal_form_mod_p(g, others, p, order))
    reduced.sort(key=lambda q: poly_sort_key(q, order), reverse=True)
    return reduced
