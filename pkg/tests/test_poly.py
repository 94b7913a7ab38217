"""Polynomial arithmetic, term orders, parsing and printing.

The multiplication oracle below is written independently of the package:
polynomials as plain lists of (coefficient, exponent-tuple) pairs, products
by double loop, sums by full concatenation and re-collection.  Random
polynomials are then checked against it.
"""

import random

import pytest

from noether_el.poly import (
    GREVLEX,
    LEX,
    Polynomial,
    block_order,
    divexact,
    expo_divides,
    iter_monomials,
)
from noether_el.errors import InexactDivision, ParseError


# --- oracle ---------------------------------------------------------------


def collect(pairs):
    acc = {}
    for c, e in pairs:
        acc[e] = acc.get(e, 0) + c
    return {e: c for e, c in acc.items() if c}


def oracle_add(f, g):
    return collect([(c, e) for e, c in f.items()] + [(c, e) for e, c in g.items()])


def oracle_mul(f, g):
    pairs = []
    for ef, cf in f.items():
        for eg, cg in g.items():
            pairs.append((cf * cg, tuple(a + b for a, b in zip(ef, eg))))
    return collect(pairs)


def random_poly_dict(rng, nvars, nterms=4, maxdeg=3, maxc=9):
    d = {}
    for _ in range(rng.randrange(nterms + 1)):
        e = tuple(rng.randrange(maxdeg + 1) for _ in range(nvars))
        c = rng.choice([i for i in range(-maxc, maxc + 1) if i])
        d[e] = d.get(e, 0) + c
    return {e: c for e, c in d.items() if c}


def test_arithmetic_matches_oracle():
    rng = random.Random(11)
    for _ in range(300):
        nvars = rng.randrange(1, 4)
        fd = random_poly_dict(rng, nvars)
        gd = random_poly_dict(rng, nvars)
        f = Polynomial(nvars, fd)
        g = Polynomial(nvars, gd)
        assert (f + g).terms == oracle_add(fd, gd)
        assert (f * g).terms == oracle_mul(fd, gd)
        assert (f - g).terms == oracle_add(fd, {e: -c for e, c in gd.items()})
        assert (f * 3).terms == {e: 3 * c for e, c in fd.items()}


def test_power_is_repeated_multiplication():
    rng = random.Random(5)
    for _ in range(40):
        fd = random_poly_dict(rng, 2, nterms=3, maxdeg=2, maxc=3)
        f = Polynomial(2, fd)
        expected = Polynomial.one(2)
        for k in range(5):
            assert f ** k == expected
            expected = expected * f


def test_zero_and_constants():
    z = Polynomial.zero(2)
    assert z.is_zero() and z.total_degree() == -1
    assert (z + z).is_zero()
    five = Polynomial.constant(2, 5)
    assert five.is_constant() and five.constant_coefficient() == 5
    assert Polynomial.constant(2, 0).is_zero()
    assert five == 5 and five != 4


def test_grevlex_vs_lex_classic_distinction():
    # x1 * x3 vs x2^2 in three variables: lex puts x1*x3 first,
    # grevlex prefers the one avoiding the last variable.
    a = (1, 0, 1)
    b = (0, 2, 0)
    assert LEX.greater(a, b)
    assert GREVLEX.greater(b, a)


def test_grevlex_degree_dominates():
    rng = random.Random(7)
    for _ in range(200):
        a = tuple(rng.randrange(4) for _ in range(3))
        b = tuple(rng.randrange(4) for _ in range(3))
        if sum(a) > sum(b):
            assert GREVLEX.greater(a, b)


def test_orders_are_multiplicative_and_global():
    # a > b implies a+c > b+c, and every monomial beats the constant.
    rng = random.Random(13)
    for order in (GREVLEX, LEX, block_order(1)):
        for _ in range(200):
            a = tuple(rng.randrange(4) for _ in range(3))
            b = tuple(rng.randrange(4) for _ in range(3))
            c = tuple(rng.randrange(4) for _ in range(3))
            if order.greater(a, b):
                assert order.greater(
                    tuple(x + y for x, y in zip(a, c)),
                    tuple(x + y for x, y in zip(b, c)),
                )
            if any(a):
                assert order.greater(a, (0, 0, 0))


def test_block_order_eliminates_front_variable():
    # any monomial containing x1 beats any monomial that avoids it
    order = block_order(1)
    assert order.greater((1, 0), (0, 7))
    assert order.greater((2, 1), (0, 3))
    assert not order.greater((0, 2), (1, 0))


def test_leading_term_depends_on_order():
    f = Polynomial.parse("x1*x3 + x2^2", 3)
    assert f.leading_term(LEX) == ((1, 0, 1), 1)
    assert f.leading_term(GREVLEX) == ((0, 2, 0), 1)


def test_parse_format_round_trip():
    rng = random.Random(23)
    for _ in range(200):
        nvars = rng.randrange(1, 4)
        fd = random_poly_dict(rng, nvars)
        f = Polynomial(nvars, fd)
        assert Polynomial.parse(f.format(), nvars) == f


def test_parse_examples():
    p = Polynomial.parse("2*x1^2*x2 - 3", 2)
    assert p.terms == {(2, 1): 2, (0, 0): -3}
    assert Polynomial.parse("  -x1 + x1 ", 2).is_zero()
    assert Polynomial.parse("x^2-x", 1).terms == {(2,): 1, (1,): -1}
    assert Polynomial.parse("7", 3) == 7
    # implicit coefficient merging: x1*x1 is x1^2
    assert Polynomial.parse("x1*x1", 1) == Polynomial.parse("x^2", 1)
    assert Polynomial.parse("-4", 0).constant_coefficient() == -4
    assert Polynomial.parse("2*3", 0).constant_coefficient() == 6


def test_single_variable_prints_bare_x():
    f = Polynomial.parse("x1^2 - 2*x1", 1)
    assert f.format() == "x^2 - 2*x"
    g = Polynomial.parse("x1 + x2", 2)
    assert g.format() == "x1 + x2"


def test_parse_rejects_garbage():
    for bad in ["", "x0", "x3", "2**x", "x^", "1 +", "y", "x1 x2", "^2"]:
        with pytest.raises(ParseError):
            Polynomial.parse(bad, 2)


def test_divexact_inverts_multiplication():
    rng = random.Random(31)
    for _ in range(150):
        nvars = rng.randrange(1, 3)
        fd = random_poly_dict(rng, nvars, nterms=3)
        gd = random_poly_dict(rng, nvars, nterms=3)
        f, g = Polynomial(nvars, fd), Polynomial(nvars, gd)
        if g.is_zero():
            continue
        assert divexact(f * g, g) == f


def test_divexact_rejects_non_multiples():
    f = Polynomial.parse("x^2 + 1", 1)
    g = Polynomial.parse("x", 1)
    with pytest.raises(InexactDivision):
        divexact(f, g)
    with pytest.raises(InexactDivision):
        divexact(Polynomial.parse("3", 1), Polynomial.parse("2", 1))


def test_iter_monomials_counts():
    # number of monomials of degree <= d in n variables is C(n+d, n)
    from math import comb

    for n in range(4):
        for d in range(4):
            monos = list(iter_monomials(n, d))
            assert len(monos) == comb(n + d, n)
            assert len(set(monos)) == len(monos)
            for m in monos:
                assert sum(m) <= d


def test_expo_divides():
    assert expo_divides((1, 0), (2, 3))
    assert not expo_divides((1, 4), (2, 3))
