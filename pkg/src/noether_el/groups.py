"""Breadth-first enumeration of matrix groups over finite quotients.

Groups are generated explicitly: a :class:`GroupTable` stores every element
(a flat tuple of residue indices) in discovery order, together with the
index of each element's inverse.  Discovery order is deterministic — FIFO
over the generator list as given — so two runs with the same inputs list
elements identically.
"""

from __future__ import annotations

import itertools
from collections import deque
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

from .caps import Caps, default_caps
from .errors import CapExceeded, ValidationError
from .ideals import Ideal
from .matgroup import qmat_elementary, qmat_identity, qmat_inverse, qmat_mul
from .quotients import QuotientContext

QMat = Tuple[int, ...]


class GroupTable:
    """A finite matrix group, fully enumerated."""

    def __init__(self, ctx: QuotientContext, d: int, elements: List[QMat],
                 inverses: List[int], gens: List[QMat]):
        self.ctx = ctx
        self.d = d
        self.elements = elements
        self.index: Dict[QMat, int] = {g: i for i, g in enumerate(elements)}
        self.inverses = inverses
        self.gens = gens

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, mat: QMat) -> bool:
        return mat in self.index

    def __len__(self) -> int:
        return len(self.elements)

    def inverse_of(self, mat: QMat) -> QMat:
        return self.elements[self.inverses[self.index[mat]]]

    def element_set(self) -> FrozenSet[QMat]:
        return frozenset(self.elements)

    def is_subset_of(self, other: "GroupTable") -> bool:
        return all(g in other.index for g in self.elements)

    def mul(self, a: QMat, b: QMat) -> QMat:
        return qmat_mul(self.ctx, self.d, a, b)

    def element_order(self, mat: QMat) -> int:
        ident = qmat_identity(self.ctx, self.d)
        k, x = 1, mat
        while x != ident:
            x = self.mul(x, mat)
            k += 1
        return k


def generate_subgroup(ctx: QuotientContext, d: int, gens: Sequence[QMat],
                      caps: Caps | None = None) -> GroupTable:
    """Enumerate the subgroup generated by the given matrices."""
    caps = caps or default_caps()
    ident = qmat_identity(ctx, d)
    gen_list: List[QMat] = []
    for g in gens:
        if g not in gen_list:
            gen_list.append(g)
    # walk with both a generator and its inverse so inverses of new
    # elements come for free: (g s)^-1 = s^-1 g^-1
    steps: List[Tuple[QMat, QMat]] = []

    def push_step(a: QMat, ainv: QMat) -> None:
        if all(s != a for s, _ in steps):
            steps.append((a, ainv))

    for g in gen_list:
        ginv = qmat_inverse(ctx, d, g, caps)
        push_step(g, ginv)
        push_step(ginv, g)

    elements: List[QMat] = [ident]
    index: Dict[QMat, int] = {ident: 0}
    inverses: List[int] = [0]
    queue = deque([0])
    while queue:
        i = queue.popleft()
        g = elements[i]
        ginv = elements[inverses[i]]
        for s, sinv in steps:
            h = qmat_mul(ctx, d, g, s)
            if h in index:
                continue
            hinv = qmat_mul(ctx, d, sinv, ginv)
            if len(elements) + 2 > caps.max_elements:
                raise CapExceeded(
                    f"group enumeration passed the cap {caps.max_elements}"
                )
            index[h] = len(elements)
            elements.append(h)
            if hinv == h:
                inverses.append(index[h])
            else:
                index[hinv] = len(elements)
                inverses.append(index[hinv])
                elements.append(hinv)
                inverses.append(index[h])
            queue.append(index[h])
            if hinv != h:
                queue.append(index[hinv])
    return GroupTable(ctx, d, elements, inverses, gen_list)


def elementary_generators(ctx: QuotientContext, d: int,
                          values: Iterable[int] | None = None) -> List[QMat]:
    """The matrices e_ij(v) for i != j, v over an additive generating set.

    With no explicit values, an additive basis of the whole quotient is
    used; products of the resulting matrices then reach e_ij(x) for every
    residue x, since e_ij is additive in its argument.
    """
    if values is None:
        values = ctx.additive_generators()
    vals = [v for v in values if v != ctx.zero]
    out = []
    for i in range(d):
        for j in range(d):
            if i != j:
                for v in vals:
                    out.append(qmat_elementary(ctx, d, i, j, v))
    return out


def elementary_group(ctx: QuotientContext, d: int,
                     caps: Caps | None = None) -> GroupTable:
    """The group generated by all elementary matrices over the quotient."""
    return generate_subgroup(ctx, d, elementary_generators(ctx, d), caps)


def additive_basis(ctx: QuotientContext, subset: Iterable[int]) -> List[int]:
    """A small additive generating set for a subgroup of (R/K, +)."""
    basis: List[int] = []
    span = frozenset({ctx.zero})
    for s in sorted(set(subset)):
        if s not in span:
            basis.append(s)
            span = ctx.additive_closure(basis)
    return basis


def unstable_level_generators(ctx: QuotientContext, d: int,
                              ideal: Ideal) -> List[QMat]:
    """Generators e_ij(x) with x running over the image of the ideal."""
    image = ctx.image_of_ideal(ideal)
    return elementary_generators(ctx, d, additive_basis(ctx, image))


def unstable_level_group(ctx: QuotientContext, d: int, ideal: Ideal,
                         caps: Caps | None = None) -> GroupTable:
    """The subgroup generated by elementary matrices with entries in an
    ideal's image — not yet closed under conjugation."""
    return generate_subgroup(ctx, d, unstable_level_generators(ctx, d, ideal), caps)


def normal_closure(ctx: QuotientContext, d: int, seeds: Sequence[QMat],
                   ambient_gens: Sequence[QMat],
                   caps: Caps | None = None) -> GroupTable:
    """Smallest subgroup containing ``seeds`` that is normalized by the
    group generated by ``ambient_gens``.

    Conjugating generators by generators suffices: once every gamma t
    gamma^-1 of a generating pair lands back in N, products of either kind
    follow formally.
    """
    caps = caps or default_caps()
    amb = []
    for g in ambient_gens:
        if g not in amb:
            amb.append(g)
    amb_pairs = [(g, qmat_inverse(ctx, d, g, caps)) for g in amb]
    seed_list: List[QMat] = []
    for s in seeds:
        if s not in seed_list:
            seed_list.append(s)
    if not seed_list:
        return generate_subgroup(ctx, d, [], caps)
    group = generate_subgroup(ctx, d, seed_list, caps)
    changed = True
    while changed:
        changed = False
        fresh: List[QMat] = []
        for gamma, gamma_inv in amb_pairs:
            for t in seed_list:
                c = qmat_mul(ctx, d, qmat_mul(ctx, d, gamma, t), gamma_inv)
                if c not in group.index and c not in fresh:
                    fresh.append(c)
        if fresh:
            seed_list.extend(fresh)
            group = generate_subgroup(ctx, d, seed_list, caps)
            changed = True
    return group


def elementary_congruence_group(ctx: QuotientContext, d: int, ideal: Ideal,
                                caps: Caps | None = None) -> GroupTable:
    """Normal closure of the level generators inside the full elementary
    group over the quotient."""
    return normal_closure(
        ctx, d,
        unstable_level_generators(ctx, d, ideal),
        elementary_generators(ctx, d),
        caps,
    )


def relative_center(group: GroupTable, normal_set: FrozenSet[QMat],
                    ambient_gens: Sequence[QMat],
                    caps: Caps | None = None) -> List[QMat]:
    """Elements of the group whose commutator with every ambient generator
    lies in the given normal subgroup — the preimage of the center of
    group/normal when the set is a normal subgroup.

    Checking generators is enough when the subgroup is normal, because
    [g, h k] = [g, h] (h [g, k] h^-1).
    """
    caps = caps or default_caps()
    ctx, d = group.ctx, group.d
    amb_pairs = [(g, qmat_inverse(ctx, d, g, caps)) for g in ambient_gens]
    out: List[QMat] = []
    for i, g in enumerate(group.elements):
        ginv = group.elements[group.inverses[i]]
        good = True
        for gamma, gamma_inv in amb_pairs:
            c = qmat_mul(ctx, d, qmat_mul(ctx, d, qmat_mul(ctx, d, g, gamma), ginv), gamma_inv)
            if c not in normal_set:
                good = False
                break
        if good:
            out.append(g)
    return out


def is_normal_in(group: GroupTable, subgroup: GroupTable,
                 caps: Caps | None = None) -> bool:
    """Whether the subgroup is normalized by the (finite) ambient group."""
    if not subgroup.is_subset_of(group):
        raise ValidationError("subgroup elements must lie in the ambient group")
    ctx, d = group.ctx, group.d
    caps = caps or default_caps()
    for g in group.gens:
        ginv = qmat_inverse(ctx, d, g, caps)
        for t in subgroup.gens:
            if qmat_mul(ctx, d, qmat_mul(ctx, d, g, t), ginv) not in subgroup.index:
                return False
    return True


# ---------------------------------------------------------------------------
# distinguished subgroups, listed outright


def horizontal_set(ctx: QuotientContext, d: int, i: int) -> FrozenSet[QMat]:
    """All unipotent matrices supported on row i: identity plus arbitrary
    residues at (i, j) for j != i."""
    cols = [j for j in range(d) if j != i]
    ident = qmat_identity(ctx, d)
    out = set()
    for values in _tuples(len(ctx.residues), len(cols)):
        m = list(ident)
        for j, v in zip(cols, values):
            m[i * d + j] = v
        out.add(tuple(m))
    return frozenset(out)


def vertical_set(ctx: QuotientContext, d: int, i: int) -> FrozenSet[QMat]:
    """All unipotent matrices supported on column i."""
    rows = [j for j in range(d) if j != i]
    ident = qmat_identity(ctx, d)
    out = set()
    for values in _tuples(len(ctx.residues), len(rows)):
        m = list(ident)
        for j, v in zip(rows, values):
            m[j * d + i] = v
        out.add(tuple(m))
    return frozenset(out)


def elementary_value_set(ctx: QuotientContext, d: int, i: int,
                         j: int) -> FrozenSet[QMat]:
    """The one-parameter group e_ij(x) over every residue x."""
    return frozenset(
        qmat_elementary(ctx, d, i, j, v) for v in range(len(ctx.residues))
    )


def _tuples(size: int, length: int):
    return itertools.product(range(size), repeat=length)


def embed_block(ctx: QuotientContext, d: int, i: int, small: QMat) -> QMat:
    """Lift a (d-1) x (d-1) quotient matrix to size d by inserting a fixed
    coordinate at position i."""
    keep = [j for j in range(d) if j != i]
    m = list(qmat_identity(ctx, d))
    e = d - 1
    for r in range(e):
        for c in range(e):
            m[keep[r] * d + keep[c]] = small[r * e + c]
    return tuple(m)


def embedded_block_group(ctx: QuotientContext, d: int, i: int,
                         caps: Caps | None = None) -> FrozenSet[QMat]:
    """The copy of the full elementary group of size d-1 that fixes the
    i-th coordinate."""
    small = elementary_group(ctx, d - 1, caps)
    return frozenset(embed_block(ctx, d, i, g) for g in small.elements)


# ---------------------------------------------------------------------------
# levels of whole subgroups and the congruence filtration


def scalar_level_ideal(ctx: QuotientContext, d: int,
                       elements: Iterable[QMat]) -> Ideal:
    """Smallest ideal J (containing the modulus) with every element scalar
    modulo J."""
    from .matgroup import q_sltil_level

    gens = list(ctx.modulus.gens)
    seen = set()
    for m in elements:
        for g in q_sltil_level(ctx, d, m).gens:
            if g not in seen:
                seen.add(g)
                gens.append(g)
    return Ideal(ctx.ring, gens)


def congruence_sets(group: GroupTable,
                    ideal: Ideal) -> Tuple[FrozenSet[QMat], FrozenSet[QMat]]:
    """The pair (principal congruence subgroup, preimage of the center):
    elements of the group congruent to the identity, respectively to a
    scalar, modulo the ideal."""
    from .matgroup import qmat_in_sl_level, qmat_in_sltil_level

    ctx, d = group.ctx, group.d
    image = ctx.image_of_ideal(ideal)
    strict = frozenset(
        g for g in group.elements if qmat_in_sl_level(ctx, d, g, image)
    )
    scalar = frozenset(
        g for g in group.elements if qmat_in_sltil_level(ctx, d, g, image)
    )
    return strict, scalar


def sandwich_by_level(group: GroupTable, subgroup_elements: FrozenSet[QMat],
                      caps: Caps | None = None) -> Tuple[Ideal, bool, bool]:
    """Test the normal-structure sandwich for a subgroup of the elementary
    group: with J the smallest ideal making every element scalar, check
    that the elementary congruence group of J sits inside the subgroup and
    the subgroup inside the scalar congruence set.

    Returns (J, lower inclusion holds, upper inclusion holds).
    """
    ctx, d = group.ctx, group.d
    level = scalar_level_ideal(ctx, d, subgroup_elements)
    lower = elementary_congruence_group(ctx, d, level, caps)
    _, scalar = congruence_sets(group, level)
    return (
        level,
        all(g in subgroup_elements for g in lower.elements),
        subgroup_elements <= scalar,
    )


def central_quotient_match(ctx: QuotientContext, d: int, ideal: Ideal,
                           caps: Caps | None = None) -> Tuple[bool, int, int]:
    """Compare two descriptions of the center of EL_d(Q)/EL_d(J·Q): the
    relative center computed by commutators against the scalar congruence
    set of J.  Returns (exact match, center size, congruence kernel size).
    """
    caps = caps or default_caps()
    group = elementary_group(ctx, d, caps)
    kernel = elementary_congruence_group(ctx, d, ideal, caps)
    center = frozenset(
        relative_center(group, kernel.element_set(), group.gens, caps)
    )
    _, scalar = congruence_sets(group, ideal)
    return center == scalar, len(center), len(kernel.elements)


def subgroup_index(ambient: Iterable[QMat], subgroup: Iterable[QMat]) -> int:
    """Index of one listed subgroup in another, with the divisibility check
    Lagrange demands."""
    big, small = len(set(ambient)), len(set(subgroup))
    if small == 0 or big % small:
        raise ValidationError(
            f"index is not defined: {big} elements over {small}"
        )
    return big // small
