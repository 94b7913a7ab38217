"""Closed-form subgroup predicates checked against brute-force conjugation,
plus the normal-structure sandwich and the central-quotient comparison on
fully enumerated models."""

import random

import pytest

from noether_el import Ideal, Ring, ValidationError
from noether_el.groups import (
    central_quotient_match,
    congruence_sets,
    elementary_congruence_group,
    elementary_generators,
    elementary_group,
    elementary_value_set,
    embed_block,
    embedded_block_group,
    generate_subgroup,
    horizontal_set,
    normal_closure,
    relative_center,
    sandwich_by_level,
    scalar_level_ideal,
    subgroup_index,
    vertical_set,
)
from noether_el.matgroup import (
    centralizes_elementary,
    centralizes_horizontal,
    centralizes_vertical,
    in_embedded_block,
    in_horizontal,
    in_vertical,
    is_central,
    normalizes_horizontal,
    normalizes_vertical,
    qmat_elementary,
    qmat_identity,
    qmat_inverse,
    qmat_mul,
    qmat_scalar,
)
from noether_el.quotients import QuotientContext


@pytest.fixture(scope="module")
def z4():
    return QuotientContext.integers_mod(4)


@pytest.fixture(scope="module")
def sl3_z4(z4):
    return elementary_group(z4, 3)


@pytest.fixture(scope="module")
def f4():
    return QuotientContext(Ideal(Ring(1), ["2", "x^2 + x + 1"]))


@pytest.fixture(scope="module")
def sl3_f4(f4):
    return elementary_group(f4, 3)


def commutes(ctx, d, a, b):
    return qmat_mul(ctx, d, a, b) == qmat_mul(ctx, d, b, a)


def conjugate(ctx, d, g, ginv, t):
    return qmat_mul(ctx, d, qmat_mul(ctx, d, g, t), ginv)


# ---------------------------------------------------------------------------
# membership predicates against independent enumerations


def test_row_and_column_groups_triple_agreement(z4):
    # closed-form enumeration == BFS closure of the one-parameter generators
    # == membership predicate, for each anchored index
    d = 3
    for i in range(d):
        row_gens = [qmat_elementary(z4, d, i, j, v)
                    for j in range(d) if j != i for v in (1, 2)]
        assert horizontal_set(z4, d, i) == generate_subgroup(z4, d, row_gens).element_set()
        col_gens = [qmat_elementary(z4, d, j, i, v)
                    for j in range(d) if j != i for v in (1, 2)]
        assert vertical_set(z4, d, i) == generate_subgroup(z4, d, col_gens).element_set()

    group = elementary_group(z4, 2)
    horiz = horizontal_set(z4, 2, 0)
    vert = vertical_set(z4, 2, 1)
    for g in group.elements:
        assert in_horizontal(z4, 2, 0, g) == (g in horiz)
        assert in_vertical(z4, 2, 1, g) == (g in vert)


def test_row_group_meets_column_group_in_one_parameter_subgroup(z4):
    assert horizontal_set(z4, 3, 0) & vertical_set(z4, 3, 1) == elementary_value_set(z4, 3, 0, 1)
    assert horizontal_set(z4, 3, 0) & vertical_set(z4, 3, 2) == elementary_value_set(z4, 3, 0, 2)
    assert horizontal_set(z4, 3, 1) & vertical_set(z4, 3, 0) == elementary_value_set(z4, 3, 1, 0)


def test_embedded_block_group_matches_predicate():
    ctx = QuotientContext.integers_mod(2)
    group = elementary_group(ctx, 3)
    for i in range(3):
        block = embedded_block_group(ctx, 3, i)
        assert len(block) == 6  # SL_2(F_2)
        assert block == {g for g in group.elements if in_embedded_block(ctx, 3, i, g)}


def test_commutators_with_row_and_column_groups(z4):
    # [e_01(R), H_2(R)] generates e_21(R); [e_01(R), V_2(R)] generates e_02(R)
    d = 3
    xs = elementary_value_set(z4, d, 0, 1)

    def commutator_closure(others):
        coms = []
        for x in xs:
            xinv = qmat_inverse(z4, d, x)
            for h in others:
                hinv = qmat_inverse(z4, d, h)
                c = qmat_mul(z4, d, qmat_mul(z4, d, x, h),
                             qmat_mul(z4, d, xinv, hinv))
                if c not in coms:
                    coms.append(c)
        return generate_subgroup(z4, d, coms).element_set()

    assert commutator_closure(horizontal_set(z4, d, 2)) == elementary_value_set(z4, d, 2, 1)
    assert commutator_closure(vertical_set(z4, d, 2)) == elementary_value_set(z4, d, 0, 2)


def test_block_conjugation_acts_by_transpose_and_inverse(z4):
    # conjugating row-0 matrices by an embedded block sends the coefficient
    # vector u to u*B; column-0 matrices transform by B^-1 on the left
    d, keep = 3, (1, 2)
    small = elementary_group(z4, 2)
    for b in small.elements:
        n = embed_block(z4, d, 0, b)
        ninv = qmat_inverse(z4, d, n)
        binv = qmat_inverse(z4, 2, b)
        for u1 in range(4):
            for u2 in range(4):
                m = list(qmat_identity(z4, d))
                m[0 * d + keep[0]] = u1
                m[0 * d + keep[1]] = u2
                got = conjugate(z4, d, ninv, n, tuple(m))
                expected = list(qmat_identity(z4, d))
                for c in range(2):
                    expected[0 * d + keep[c]] = z4.add(
                        z4.mul(u1, b[0 * 2 + c]), z4.mul(u2, b[1 * 2 + c]))
                assert got == tuple(expected)

                m = list(qmat_identity(z4, d))
                m[keep[0] * d + 0] = u1
                m[keep[1] * d + 0] = u2
                got = conjugate(z4, d, ninv, n, tuple(m))
                expected = list(qmat_identity(z4, d))
                for r in range(2):
                    expected[keep[r] * d + 0] = z4.add(
                        z4.mul(binv[r * 2 + 0], u1), z4.mul(binv[r * 2 + 1], u2))
                assert got == tuple(expected)


# ---------------------------------------------------------------------------
# normalizers and centralizers, exhaustively


def brute_normalizes(group, subset_gens, subset):
    ctx, d = group.ctx, group.d
    out = set()
    for idx, g in enumerate(group.elements):
        ginv = group.elements[group.inverses[idx]]
        if all(conjugate(ctx, d, g, ginv, t) in subset for t in subset_gens):
            out.add(g)
    return out


def test_normalizer_closed_form_exhaustive_mod_three():
    ctx = QuotientContext.integers_mod(3)
    group = elementary_group(ctx, 3)
    assert group.order == 5616
    for i in (0, 2):
        vgens = [qmat_elementary(ctx, 3, j, i, 1) for j in range(3) if j != i]
        brute = brute_normalizes(group, vgens, vertical_set(ctx, 3, i))
        assert brute == {g for g in group.elements if normalizes_vertical(ctx, 3, i, g)}
    hgens = [qmat_elementary(ctx, 3, 1, j, 1) for j in range(3) if j != 1]
    brute = brute_normalizes(group, hgens, horizontal_set(ctx, 3, 1))
    assert brute == {g for g in group.elements if normalizes_horizontal(ctx, 3, 1, g)}


def test_normalizer_over_embedded_block_reduces_to_one_entry():
    # within the copy of SL_2 fixing the last coordinate, normalizing the
    # first column group comes down to the (0, 1) entry vanishing
    ctx = QuotientContext.integers_mod(3)
    vset = vertical_set(ctx, 3, 0)
    vgens = [qmat_elementary(ctx, 3, j, 0, 1) for j in (1, 2)]
    for g in embedded_block_group(ctx, 3, 2):
        ginv = qmat_inverse(ctx, 3, g)
        brute = all(conjugate(ctx, 3, g, ginv, t) in vset for t in vgens)
        assert brute == normalizes_vertical(ctx, 3, 0, g)
        assert brute == (g[0 * 3 + 1] == ctx.zero)


def test_centralizer_of_unit_elementary_exhaustive():
    ctx = QuotientContext.integers_mod(2)
    group = elementary_group(ctx, 3)
    e = qmat_elementary(ctx, 3, 0, 1, 1)
    brute = {g for g in group.elements if commutes(ctx, 3, g, e)}
    assert brute == {g for g in group.elements
                     if centralizes_elementary(ctx, 3, 0, 1, 1, g)}


def test_centralizer_with_nontrivial_annihilator_exhaustive(z4, sl3_z4):
    # x = 2 over Z/4: every constraint is weighted by Ann(2) = (2), so the
    # relevant entries need only be even rather than zero
    e = qmat_elementary(z4, 3, 0, 1, 2)
    brute = {g for g in sl3_z4.elements if commutes(z4, 3, g, e)}
    assert brute == {g for g in sl3_z4.elements
                     if centralizes_elementary(z4, 3, 0, 1, 2, g)}

    unit = qmat_elementary(z4, 3, 0, 1, 1)
    brute_unit = {g for g in sl3_z4.elements if commutes(z4, 3, g, unit)}
    assert brute_unit == {g for g in sl3_z4.elements
                          if centralizes_elementary(z4, 3, 0, 1, 1, g)}
    # a unit entry pins the shape down strictly harder
    assert brute_unit < brute
    witness = list(qmat_identity(z4, 3))
    witness[2 * 3 + 0] = 2
    assert tuple(witness) in brute and tuple(witness) not in brute_unit


def test_centralizer_of_column_group_is_center_times_column(f4, sl3_f4):
    gens = [qmat_elementary(f4, 3, j, 0, v) for j in (1, 2)
            for v in range(1, len(f4.residues))]
    brute = {g for g in sl3_f4.elements
             if all(commutes(f4, 3, g, t) for t in gens)}
    center = {qmat_scalar(f4, 3, u) for u in f4.units_order_dividing(3)}
    assert brute == {qmat_mul(f4, 3, z, v)
                     for z in center for v in vertical_set(f4, 3, 0)}
    assert brute == {g for g in sl3_f4.elements if centralizes_vertical(f4, 3, 0, g)}
    hgens = [qmat_elementary(f4, 3, 1, j, v) for j in (0, 2)
             for v in range(1, len(f4.residues))]
    brute_h = {g for g in sl3_f4.elements
               if all(commutes(f4, 3, g, t) for t in hgens)}
    assert brute_h == {g for g in sl3_f4.elements if centralizes_horizontal(f4, 3, 1, g)}


def test_center_by_exhaustive_centralizer_oracle(f4, sl3_f4):
    ident = frozenset({qmat_identity(f4, 3)})
    brute = set(relative_center(sl3_f4, ident, sl3_f4.gens))
    expected = {qmat_scalar(f4, 3, u) for u in f4.units_order_dividing(3)}
    assert len(expected) == 3  # cube roots of unity in F_4
    assert brute == expected
    assert brute == {g for g in sl3_f4.elements if is_central(f4, 3, g)}


def _nullity_mod_p(rows, p):
    mat = [[v % p for v in row] for row in rows]
    ncols = len(mat[0])
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(mat)) if mat[r][col]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = pow(mat[rank][col], -1, p)
        mat[rank] = [v * inv % p for v in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col]:
                f = mat[r][col]
                mat[r] = [(a - f * b) % p for a, b in zip(mat[r], mat[rank])]
        rank += 1
    return ncols - rank


def test_center_mod_seven_via_linear_commutant():
    # solving [g, e_ij(1)] = 0 as linear equations in the nine entries of g
    # leaves only the scalar line, so the center consists of the scalars
    # with u^3 = 1 — no enumeration of the five-million-element group needed
    rows = []
    for i, j in ((0, 1), (1, 2), (2, 0)):
        for r in range(3):
            for c in range(3):
                row = [0] * 9
                if c == j:
                    row[3 * r + i] += 1
                if r == i:
                    row[3 * j + c] -= 1
                rows.append(row)
    assert _nullity_mod_p(rows, 7) == 1

    ctx = QuotientContext.integers_mod(7)
    cube_roots = ctx.units_order_dividing(3)
    assert cube_roots == [1, 2, 4]
    for u in range(1, 7):
        assert is_central(ctx, 3, qmat_scalar(ctx, 3, u)) == (u in cube_roots)


# ---------------------------------------------------------------------------
# normal structure, the central quotient, and congruence indices


def test_normalized_subgroups_sandwich_between_level_groups(z4, sl3_z4):
    rng = random.Random(11)
    ctx2 = QuotientContext.integers_mod(2)
    group2 = elementary_group(ctx2, 3)
    amb2 = elementary_generators(ctx2, 3)
    for _ in range(8):
        g = group2.elements[rng.randrange(group2.order)]
        closure = normal_closure(ctx2, 3, [g], amb2)
        level, lower_ok, upper_ok = sandwich_by_level(group2, closure.element_set())
        assert lower_ok and upper_ok

    amb4 = elementary_generators(z4, 3)
    seeds = [
        qmat_identity(z4, 3),
        qmat_elementary(z4, 3, 0, 1, 2),
        qmat_mul(z4, 3, qmat_elementary(z4, 3, 0, 1, 2),
                 qmat_elementary(z4, 3, 1, 2, 2)),
    ]
    for g in seeds:
        closure = normal_closure(z4, 3, [g], amb4)
        level, lower_ok, upper_ok = sandwich_by_level(sl3_z4, closure.element_set())
        assert lower_ok and upper_ok


def test_sandwich_levels_are_the_expected_ideals(z4, sl3_z4):
    ring = z4.ring
    whole = sandwich_by_level(sl3_z4, sl3_z4.element_set())[0]
    assert whole.contains(ring.coerce(1))
    kernel = elementary_congruence_group(z4, 3, Ideal(ring, ["2"]))
    level = scalar_level_ideal(z4, 3, kernel.elements)
    assert level.contains("2") and not level.contains("1")
    only_identity = scalar_level_ideal(z4, 3, [qmat_identity(z4, 3)])
    assert not only_identity.contains("2")


def test_central_quotient_matches_scalar_congruence_set(z4, f4):
    # the commutator description of the center of EL_3(Q)/EL_3(J) against
    # the scalar congruence filter, computed independently
    match, center_size, kernel_size = central_quotient_match(
        z4, 3, Ideal(z4.ring, ["2"]))
    assert match
    assert (center_size, kernel_size) == (256, 256)

    match, center_size, kernel_size = central_quotient_match(
        f4, 3, Ideal(f4.ring, []))
    assert match
    assert (center_size, kernel_size) == (3, 1)


def test_congruence_indices_reported_exactly(z4, sl3_z4, f4, sl3_f4):
    strict, scalar = congruence_sets(sl3_z4, Ideal(z4.ring, ["2"]))
    assert subgroup_index(sl3_z4.elements, strict) == 168
    assert subgroup_index(scalar, strict) == 1

    strict_f4, scalar_f4 = congruence_sets(sl3_f4, Ideal(f4.ring, []))
    assert strict_f4 == {qmat_identity(f4, 3)}
    assert subgroup_index(scalar_f4, strict_f4) == 3

    with pytest.raises(ValidationError):
        subgroup_index(sl3_z4.elements[:7], sl3_z4.elements[:3])
