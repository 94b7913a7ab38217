"""Dual models checked against plain modular arithmetic and naive lattice walks."""

import itertools
import math
from fractions import Fraction

import pytest

from noether_el import CapExceeded, Ideal, Ring, ValidationError
from noether_el.caps import default_caps
from noether_el.dual import (
    DualCharacter,
    all_invariant_subgroups,
    build_model,
    dual_action,
    ideal_span,
    invariant_subgroup_check,
    model_ideals,
    orbit,
)
from noether_el.groups import elementary_generators
from noether_el.matgroup import (
    qmat_apply,
    qmat_elementary,
    qmat_from_rows,
    qmat_mul,
)
from noether_el.quotients import QuotientContext


def dual_numbers_f2() -> QuotientContext:
    """F_2[t]/(t^2), the four-element ring with a square-zero element."""
    return QuotientContext(Ideal(Ring(1), ["2", "x^2"]))


def test_build_model_factors_and_size():
    m4 = build_model(QuotientContext.integers_mod(4), 2)
    assert m4.factors == (4, 4)
    assert m4.size == 16
    assert sum(1 for _ in m4.iter_characters()) == 16

    m6 = build_model(QuotientContext.integers_mod(6), 2)
    assert m6.factors == (6, 6)
    assert m6.size == 36

    # every element of F_2[t]/(t^2) has additive order <= 2, so the dual of
    # rank two splits into four copies of Z/2
    ctx = dual_numbers_f2()
    for r in range(ctx.size):
        assert ctx.add(r, r) == ctx.zero
    mt = build_model(ctx, 2)
    assert mt.factors == (2, 2, 2, 2)
    assert mt.size == 16


def test_build_model_respects_cap():
    ctx = QuotientContext.integers_mod(6)
    with pytest.raises(CapExceeded):
        build_model(ctx, 8)  # 6^8 > 10^6
    with pytest.raises(CapExceeded):
        build_model(ctx, 2, cap=35)
    with pytest.raises(ValidationError):
        build_model(ctx, 0)


def test_pairing_matches_modular_formula():
    """Over Z/m the coordinates are the residues themselves, so the pairing
    must be exactly sum(c_i * a_i) / m mod 1."""
    for m in (4, 6):
        model = build_model(QuotientContext.integers_mod(m), 2)
        for exps in itertools.product(range(m), repeat=2):
            chi = DualCharacter(exps)
            for point in itertools.product(range(m), repeat=2):
                expected = Fraction(exps[0] * point[0] + exps[1] * point[1], m) % 1
                assert model.pairing_exponent(chi, point) == expected


def test_pairing_is_biadditive_and_separating():
    for ctx in (QuotientContext.integers_mod(6), dual_numbers_f2()):
        model = build_model(ctx, 2)
        characters = list(model.iter_characters())
        points = list(model.iter_points())
        # additive in the point argument
        chi = characters[7]
        for x in points:
            for y in points:
                q = model.pairing_exponent(chi, model.add_points(x, y))
                split = model.pairing_exponent(chi, x) + model.pairing_exponent(chi, y)
                assert q == split % 1
        # additive in the character argument
        x = points[5]
        for a in characters:
            for b in characters:
                q = model.pairing_exponent(model.dual_add(a, b), x)
                split = model.pairing_exponent(a, x) + model.pairing_exponent(b, x)
                assert q == split % 1
        # non-degenerate: every nonzero point is seen by some character
        for x in points:
            if x == model.zero_point:
                continue
            assert any(model.pairing_exponent(chi, x) != 0 for chi in characters)


def test_coordinates_round_trip():
    for ctx in (QuotientContext.integers_mod(4), dual_numbers_f2()):
        model = build_model(ctx, 3)
        for point in model.iter_points():
            assert model.point_from_coords(model.coords(point)) == point


def test_dual_action_on_shear():
    """The upper shear sends chi = (1, 0) to (1, 3) over Z/4: the image must
    satisfy chi'(v) = chi(g^(-1) v) for every vector v, with g^(-1) computed
    by hand as the opposite shear."""
    ctx = QuotientContext.integers_mod(4)
    model = build_model(ctx, 2)
    g = qmat_elementary(ctx, 2, 0, 1, ctx.one)
    ginv = qmat_elementary(ctx, 2, 0, 1, ctx.reduce(-1))
    chi = DualCharacter((1, 0))
    image = dual_action(model, g, chi)
    assert image == DualCharacter((1, 3))
    for point in model.iter_points():
        moved = qmat_apply(ctx, 2, ginv, point)
        assert model.pairing_exponent(image, point) == model.pairing_exponent(chi, moved)


def test_dual_action_is_a_group_action():
    ctx = QuotientContext.integers_mod(6)
    model = build_model(ctx, 2)
    identity = qmat_from_rows(ctx, ((1, 0), (0, 1)))
    a = qmat_mul(ctx, 2, qmat_elementary(ctx, 2, 0, 1, ctx.reduce(2)),
                 qmat_elementary(ctx, 2, 1, 0, ctx.reduce(5)))
    b = qmat_mul(ctx, 2, qmat_elementary(ctx, 2, 1, 0, ctx.one),
                 qmat_elementary(ctx, 2, 0, 1, ctx.reduce(3)))
    for chi in model.iter_characters():
        assert dual_action(model, identity, chi) == chi
        composed = dual_action(model, qmat_mul(ctx, 2, a, b), chi)
        stepwise = dual_action(model, a, dual_action(model, b, chi))
        assert composed == stepwise


def test_dual_action_rejects_bad_input():
    ctx = QuotientContext.integers_mod(4)
    model = build_model(ctx, 2)
    chi = DualCharacter((1, 0))
    with pytest.raises(ValidationError):
        dual_action(model, qmat_from_rows(ctx, ((1, 0), (0, 2))), chi)  # det 2
    with pytest.raises(ValidationError):
        dual_action(model, qmat_from_rows(ctx, ((2, 0), (0, 2))), chi)  # det 0
    with pytest.raises(ValidationError):
        dual_action(model, (1, 0, 0), chi)  # not square
    with pytest.raises(ValidationError):
        dual_action(model, qmat_elementary(ctx, 2, 0, 1, ctx.one), DualCharacter((1, 0, 0)))


def content_mod(m: int, point) -> int:
    """gcd of the coordinates with the modulus: the ideal a vector generates
    in Z/m.  Elementary moves add multiples of one coordinate to another, so
    they cannot change it."""
    g = m
    for a in point:
        g = math.gcd(g, a)
    return g


def test_point_orbits_over_cyclic_rings():
    """Orbits in (Z/m)^d are the content classes: the orbit is contained in
    its content class because shears preserve content, and the sizes match,
    so the two sets are equal."""
    for m, d in ((4, 2), (4, 3), (6, 2), (6, 3)):
        ctx = QuotientContext.integers_mod(m)
        model = build_model(ctx, d)
        generators = elementary_generators(ctx, d)
        seen = set()
        sizes = []
        for point in model.iter_points():
            if point in seen:
                continue
            members = set(orbit(model, point, generators))
            assert members == {
                q for q in model.iter_points()
                if content_mod(m, q) == content_mod(m, point)
            }
            seen |= members
            sizes.append(len(members))
        expected = {
            (4, 2): [1, 3, 12],
            (4, 3): [1, 7, 56],
            (6, 2): [1, 3, 8, 24],
            (6, 3): [1, 7, 26, 182],
        }[(m, d)]
        assert sorted(sizes) == expected


def test_point_orbits_over_dual_numbers():
    ctx = dual_numbers_f2()
    for d, expected in ((2, [1, 3, 12]), (3, [1, 7, 56])):
        model = build_model(ctx, d)
        generators = elementary_generators(ctx, d)
        seen = set()
        sizes = []
        for point in model.iter_points():
            if point in seen:
                continue
            members = set(orbit(model, point, generators))
            seen |= members
            sizes.append(len(members))
        assert sorted(sizes) == expected


def test_orbit_frozen_sets_mod_4():
    ctx = QuotientContext.integers_mod(4)
    model = build_model(ctx, 2)
    generators = elementary_generators(ctx, 2)
    assert orbit(model, (0, 0), generators) == ((0, 0),)
    assert set(orbit(model, (2, 0), generators)) == {(2, 0), (0, 2), (2, 2)}
    twelve = orbit(model, (1, 0), generators)
    assert len(twelve) == 12
    assert set(twelve) == {p for p in model.iter_points() if content_mod(4, p) == 1}


def test_character_orbit_mod_4():
    """The twelve characters moved around with (1, 0) are exactly those with
    a unit exponent somewhere; the three with both exponents even and not
    both zero form the orbit of (2, 0)."""
    ctx = QuotientContext.integers_mod(4)
    model = build_model(ctx, 2)
    generators = elementary_generators(ctx, 2)
    big = orbit(model, DualCharacter((1, 0)), generators)
    assert sorted(chi.exponents for chi in big) == [
        (0, 1), (0, 3), (1, 0), (1, 1), (1, 2), (1, 3),
        (2, 1), (2, 3), (3, 0), (3, 1), (3, 2), (3, 3),
    ]
    small = orbit(model, DualCharacter((2, 0)), generators)
    assert sorted(chi.exponents for chi in small) == [(0, 2), (2, 0), (2, 2)]


def test_orbit_is_deterministic_and_capped():
    ctx = QuotientContext.integers_mod(4)
    model = build_model(ctx, 2)
    generators = elementary_generators(ctx, 2)
    first = orbit(model, (1, 0), generators)
    second = orbit(model, (1, 0), generators)
    assert first == second
    assert first[0] == (1, 0)
    tight = default_caps().replace(max_elements=5)
    with pytest.raises(CapExceeded):
        orbit(model, (1, 0), generators, tight)
    with pytest.raises(ValidationError):
        orbit(model, (1, 0, 0), generators)
    bad = [qmat_from_rows(ctx, ((1, 0), (0, 2)))]
    with pytest.raises(ValidationError):
        orbit(model, (1, 0), bad)


def test_model_ideals_inventories():
    ctx4 = QuotientContext.integers_mod(4)
    assert [sorted(i) for i in model_ideals(ctx4)] == [[0], [0, 2], [0, 1, 2, 3]]
    ctx6 = QuotientContext.integers_mod(6)
    assert [sorted(i) for i in model_ideals(ctx6)] == [
        [0], [0, 3], [0, 2, 4], [0, 1, 2, 3, 4, 5]]
    ctxt = dual_numbers_f2()
    t = ctxt.reduce("x")
    assert [sorted(i) for i in model_ideals(ctxt)] == [
        sorted({ctxt.zero}), sorted({ctxt.zero, t}), sorted(range(ctxt.size))]
    # spans agree with the table rows they came from
    assert ideal_span(ctx6, [2]) == frozenset({0, 2, 4})
    assert ideal_span(ctx6, [2, 3]) == frozenset(range(6))
    assert ideal_span(ctx6, []) == frozenset({0})


def test_invariant_subgroup_check_examples():
    ctx = QuotientContext.integers_mod(4)
    model = build_model(ctx, 2)
    ok, ideal = invariant_subgroup_check(model, [(a, b) for a in (0, 2) for b in (0, 2)])
    assert ok and sorted(ideal) == [0, 2]
    ok, ideal = invariant_subgroup_check(model, [(0, 0)])
    assert ok and sorted(ideal) == [0]
    # the horizontal axis is a subgroup but not stable: a lower shear moves
    # (1, 0) to (1, 1), which has left the axis
    axis = [(a, 0) for a in range(4)]
    ok, ideal = invariant_subgroup_check(model, axis)
    assert not ok and sorted(ideal) == [0, 1, 2, 3]
    shear = qmat_elementary(ctx, 2, 1, 0, ctx.one)
    assert qmat_apply(ctx, 2, shear, (1, 0)) == (1, 1)
    with pytest.raises(ValidationError):
        invariant_subgroup_check(model, [(1, 0), (0, 1)])  # not closed
    with pytest.raises(ValidationError):
        invariant_subgroup_check(model, [])


def naive_subgroups(elements, add):
    """Every subgroup of a small abelian group, by closing generator sets
    one element at a time."""
    zero_only = frozenset({min(elements)})  # elements are tuples; min is the zero tuple
    subgroups = {zero_only}
    frontier = [zero_only]
    while frontier:
        base = frontier.pop()
        for x in elements:
            if x in base:
                continue
            closure = set(base)
            queue = [x]
            while queue:
                y = queue.pop()
                if y in closure:
                    continue
                closure.add(y)
                queue.extend(add(y, z) for z in list(closure))
            grown = frozenset(closure)
            if grown not in subgroups:
                subgroups.add(grown)
                frontier.append(grown)
    return subgroups


def test_all_invariant_subgroups_against_naive_enumeration():
    """(Z/4)^2 has fifteen subgroups of which three are stable under shears;
    (F_2)^3 has sixteen of which two are.  The naive method walks the whole
    subgroup lattice with plain integer tuples and filters by stability
    under every shear step directly."""
    ctx = QuotientContext.integers_mod(4)
    model = build_model(ctx, 2)
    elements = list(itertools.product(range(4), repeat=2))
    lattice = naive_subgroups(elements, lambda u, v: ((u[0] + v[0]) % 4, (u[1] + v[1]) % 4))
    assert len(lattice) == 15

    def stable(subgroup, m, d):
        for v in subgroup:
            for i in range(d):
                for j in range(d):
                    if i == j:
                        continue
                    for r in range(1, m):
                        w = list(v)
                        w[i] = (w[i] + r * v[j]) % m
                        if tuple(w) not in subgroup:
                            return False
        return True

    expected = sorted((s for s in lattice if stable(s, 4, 2)), key=len)
    found = all_invariant_subgroups(model)
    assert [set(s) for s, _ in found] == [set(s) for s in expected]
    assert [sorted(i) for _, i in found] == [[0], [0, 2], [0, 1, 2, 3]]

    ctx2 = QuotientContext.integers_mod(2)
    model2 = build_model(ctx2, 3)
    elements2 = list(itertools.product(range(2), repeat=3))
    lattice2 = naive_subgroups(
        elements2, lambda u, v: tuple((a + b) % 2 for a, b in zip(u, v)))
    assert len(lattice2) == 16
    expected2 = sorted((s for s in lattice2 if stable(s, 2, 3)), key=len)
    found2 = all_invariant_subgroups(model2)
    assert [set(s) for s, _ in found2] == [set(s) for s in expected2]
    assert [len(s) for s, _ in found2] == [1, 8]


def test_all_invariant_subgroups_respects_limits():
    ctx = QuotientContext.integers_mod(16)
    model = build_model(ctx, 2)
    with pytest.raises(ValidationError):
        all_invariant_subgroups(model)  # |Q| too large
    ctx2 = QuotientContext.integers_mod(2)
    model4 = build_model(ctx2, 4)
    with pytest.raises(ValidationError):
        all_invariant_subgroups(model4)  # rank out of range
