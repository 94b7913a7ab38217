"""Finite Pontryagin duals of Q^d and the elementary action on them.

For a finite quotient ring Q the additive group of Q^d splits as a product
of cyclic groups Z/n_1 x ... x Z/n_k -- d consecutive blocks of the
invariant factors of (Q, +), read off the Smith data behind the quotient.
A character of Q^d is stored as its tuple of exponents against those
factors: its value at a point with cyclic coordinates (a_1, ..., a_k) is
the root of unity exp(2*pi*i*q) with q = sum(c_i * a_i / n_i) mod 1, and
the exact ``Fraction`` q is what this module computes with.  Floating
point enters only downstream, when a Fourier sum asks for actual complex
numbers.

Matrices act on points by multiplication and on characters by the dual
action chi |-> chi o g^{-1}.  The exponents of an image character are
solved from the defining pairing equations on the coordinate basis points
and then re-verified against an independent additive generating set, so a
bookkeeping mistake in either coordinate map surfaces as a hard error
instead of a silently wrong orbit.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from .caps import Caps, default_caps
from .errors import CapExceeded, ValidationError
from .groups import elementary_generators
from .matgroup import qmat_apply, qmat_det, qmat_inverse
from .quotients import QuotientContext

Point = Tuple[int, ...]


@dataclass(frozen=True, order=True)
class DualCharacter:
    """A character of (Q^d, +), given by exponents against the cyclic factors."""

    exponents: Tuple[int, ...]


def _scale(ctx: QuotientContext, k: int, x: int) -> int:
    """k-fold additive multiple of a residue, by doubling."""
    out = ctx.zero
    base = x
    while k:
        if k & 1:
            out = ctx.add_table[out][base]
        base = ctx.add_table[base][base]
        k >>= 1
    return out


class DualModel:
    """The character group of Q^d with an exact rational pairing.

    Instances come out of :func:`build_model`, which also runs the
    consistency checks; the constructor only wires precomputed tables
    together.
    """

    def __init__(
        self,
        ctx: QuotientContext,
        d: int,
        comp_factors: Tuple[int, ...],
        comp_coords: List[Tuple[int, ...]],
        comp_basis: List[int],
    ):
        self.ctx = ctx
        self.d = d
        self.comp_factors = comp_factors
        self.factors: Tuple[int, ...] = comp_factors * d
        self.size = ctx.size ** d
        self._comp_coords = comp_coords
        self._comp_basis = comp_basis
        self.zero_point: Point = (ctx.zero,) * d
        self.zero_character = DualCharacter((0,) * len(self.factors))
        self.basis_points: Tuple[Point, ...] = tuple(
            self._basis_point(pos) for pos in range(len(self.factors))
        )

    def _basis_point(self, pos: int) -> Point:
        t = len(self.comp_factors)
        coord, offset = divmod(pos, t)
        point = [self.ctx.zero] * self.d
        point[coord] = self._comp_basis[offset]
        return tuple(point)

    # -- points of Q^d ----------------------------------------------------

    def iter_points(self) -> Iterator[Point]:
        """All points of Q^d in product order over residue indices."""
        return itertools.product(range(self.ctx.size), repeat=self.d)

    def check_point(self, point: Sequence[int]) -> Point:
        point = tuple(point)
        if len(point) != self.d:
            raise ValidationError(f"point has {len(point)} coordinates, expected {self.d}")
        for r in point:
            if not isinstance(r, int) or not 0 <= r < self.ctx.size:
                raise ValidationError(f"coordinate {r!r} is not a residue index")
        return point

    def add_points(self, x: Point, y: Point) -> Point:
        add = self.ctx.add_table
        return tuple(add[a][b] for a, b in zip(x, y))

    def neg_point(self, x: Point) -> Point:
        neg = self.ctx.neg_table
        return tuple(neg[a] for a in x)

    def coords(self, point: Sequence[int]) -> Tuple[int, ...]:
        """Cyclic coordinates of a point, one block per Q-coordinate."""
        out: List[int] = []
        for r in point:
            out.extend(self._comp_coords[r])
        return tuple(out)

    def point_from_coords(self, coords: Sequence[int]) -> Point:
        t = len(self.comp_factors)
        if len(coords) != t * self.d:
            raise ValidationError(f"expected {t * self.d} coordinates, got {len(coords)}")
        point = []
        for i in range(self.d):
            r = self.ctx.zero
            for a, b, n in zip(coords[i * t : (i + 1) * t], self._comp_basis, self.comp_factors):
                r = self.ctx.add_table[r][_scale(self.ctx, a % n, b)]
            point.append(r)
        return tuple(point)

    # -- characters --------------------------------------------------------

    def iter_characters(self) -> Iterator[DualCharacter]:
        """All characters in product order over exponent tuples."""
        ranges = [range(n) for n in self.factors]
        return (DualCharacter(exps) for exps in itertools.product(*ranges))

    def check_character(self, chi: DualCharacter) -> DualCharacter:
        if not isinstance(chi, DualCharacter):
            raise ValidationError(f"{chi!r} is not a DualCharacter")
        if len(chi.exponents) != len(self.factors):
            raise ValidationError(
                f"character has {len(chi.exponents)} exponents, expected {len(self.factors)}"
            )
        for c, n in zip(chi.exponents, self.factors):
            if not isinstance(c, int) or not 0 <= c < n:
                raise ValidationError(f"exponent {c!r} is out of range for factor {n}")
        return chi

    def dual_add(self, a: DualCharacter, b: DualCharacter) -> DualCharacter:
        return DualCharacter(
            tuple((x + y) % n for x, y, n in zip(a.exponents, b.exponents, self.factors))
        )

    def dual_neg(self, a: DualCharacter) -> DualCharacter:
        return DualCharacter(tuple((-x) % n for x, n in zip(a.exponents, self.factors)))

    def pairing_exponent(self, chi: DualCharacter, point: Sequence[int]) -> Fraction:
        """The exact exponent q in chi(point) = exp(2*pi*i*q), reduced mod 1.

        Bi-additivity holds by construction in the character argument and is
        checked against the addition table in the point argument when the
        model is built; non-degeneracy follows from the coordinate map being
        a bijection.
        """
        total = Fraction(0)
        for c, a, n in zip(chi.exponents, self.coords(point), self.factors):
            total += Fraction(c * a, n)
        return total % 1


def build_model(ctx: QuotientContext, d: int, cap: int = 10**6) -> DualModel:
    """Construct the dual model of Q^d, checking the coordinate tables.

    Refuses models with more than ``cap`` points.  The cyclic coordinate map
    is verified to be a bijection, to invert exactly on every residue, and
    to be additive against the quotient's addition table on all pairs
    (residue, additive generator) -- which forces additivity everywhere.
    """
    if d < 1:
        raise ValidationError("the rank d must be at least 1")
    if ctx.size ** d > cap:
        raise CapExceeded(f"model would have {ctx.size ** d} points, cap is {cap}")
    structure = ctx.structure
    comp_factors = tuple(structure.invariant_factors)
    comp_coords = [structure.residue_coords(ctx.lift(r)) for r in range(ctx.size)]
    comp_basis = [ctx.index[p] for p in structure.basis_residues()]

    product = 1
    for n in comp_factors:
        product *= n
    if product != ctx.size or len(set(comp_coords)) != ctx.size:
        raise ValidationError("cyclic coordinates do not enumerate the quotient")
    model = DualModel(ctx, d, comp_factors, comp_coords, comp_basis)
    for r in range(ctx.size):
        rebuilt = model.point_from_coords(comp_coords[r] * d)
        if rebuilt != (r,) * d:
            raise ValidationError("cyclic coordinates do not invert on the residues")
    generators = ctx.additive_generators()
    for r in range(ctx.size):
        for s in generators:
            direct = comp_coords[ctx.add_table[r][s]]
            summed = tuple(
                (a + b) % n for a, b, n in zip(comp_coords[r], comp_coords[s], comp_factors)
            )
            if direct != summed:
                raise ValidationError("cyclic coordinates are not additive")
    return model


def _composed_character(model: DualModel, chi: DualCharacter, mat) -> DualCharacter:
    """The character chi o mat, solved from pairings on the basis points."""
    exponents = []
    for point, n in zip(model.basis_points, model.factors):
        q = model.pairing_exponent(chi, qmat_apply(model.ctx, model.d, mat, point)) * n
        if q.denominator != 1:
            raise ValidationError("pairing equations have no integral solution")
        exponents.append(int(q) % n)
    return DualCharacter(tuple(exponents))


def dual_action(
    model: DualModel, g, chi: DualCharacter, caps: Optional[Caps] = None
) -> DualCharacter:
    """Image of a character under g, i.e. the character gamma |-> chi(g^{-1} gamma).

    ``g`` is a flat d*d tuple of residue indices with determinant one.  The
    result is verified against the defining identity on an independent set
    of additive generators before it is returned.
    """
    caps = caps if caps is not None else default_caps()
    ctx, d = model.ctx, model.d
    model.check_character(chi)
    if len(g) != d * d:
        raise ValidationError(f"matrix has {len(g)} entries, expected {d * d}")
    if qmat_det(ctx, d, g, caps) != ctx.one:
        raise ValidationError("dual action needs determinant one in the quotient")
    ginv = qmat_inverse(ctx, d, g, caps)
    image = _composed_character(model, chi, ginv)
    for i in range(d):
        for s in ctx.additive_generators():
            point = list(model.zero_point)
            point[i] = s
            point = tuple(point)
            moved = qmat_apply(ctx, d, ginv, point)
            if model.pairing_exponent(image, point) != model.pairing_exponent(chi, moved):
                raise ValidationError("dual action failed verification on a generator")
    return image


def orbit(model: DualModel, start, generators, caps: Optional[Caps] = None) -> Tuple:
    """Orbit of a point of Q^d or of a character under the given matrices.

    Generators must have determinant one; since they then act by bijections
    of a finite set, closing under forward steps alone already yields the
    full group orbit.  Breadth-first search in generator order makes the
    returned discovery order deterministic.
    """
    caps = caps if caps is not None else default_caps()
    ctx, d = model.ctx, model.d
    mats = list(generators)
    for g in mats:
        if len(g) != d * d:
            raise ValidationError(f"generator has {len(g)} entries, expected {d * d}")
        if qmat_det(ctx, d, g, caps) != ctx.one:
            raise ValidationError("orbit generators must have determinant one")
    if isinstance(start, DualCharacter):
        model.check_character(start)
        inverses = [qmat_inverse(ctx, d, g, caps) for g in mats]
        steps = [
            (lambda chi, gi=gi: _composed_character(model, chi, gi)) for gi in inverses
        ]
    else:
        start = model.check_point(start)
        steps = [(lambda p, g=g: qmat_apply(ctx, d, g, p)) for g in mats]
    seen: Dict = {start: None}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for step in steps:
            image = step(current)
            if image not in seen:
                if len(seen) >= caps.max_elements:
                    raise CapExceeded(f"orbit exceeded {caps.max_elements} elements")
                seen[image] = None
                queue.append(image)
    return tuple(seen)


def _ideal_key(subset: FrozenSet[int]):
    return (len(subset), tuple(sorted(subset)))


def ideal_span(ctx: QuotientContext, seeds: Iterable[int]) -> FrozenSet[int]:
    """Smallest ideal of the quotient containing the given residues."""
    multiples = set()
    for r in seeds:
        multiples.update(ctx.mul_table[r])
    return ctx.additive_closure(sorted(multiples))


def model_ideals(ctx: QuotientContext) -> List[FrozenSet[int]]:
    """All ideals of the finite quotient, as residue sets sorted by size.

    Principal ideals are read off the multiplication table; every ideal is a
    sum of principal ones, so closing that family under pairwise sums is
    exhaustive.
    """
    ideals = {ideal_span(ctx, [r]) for r in range(ctx.size)}
    changed = True
    while changed:
        changed = False
        for a, b in itertools.combinations(sorted(ideals, key=_ideal_key), 2):
            joined = ctx.additive_closure(sorted(a | b))
            if joined not in ideals:
                ideals.add(joined)
                changed = True
    return sorted(ideals, key=_ideal_key)


def invariant_subgroup_check(
    model: DualModel, delta: Iterable[Sequence[int]], caps: Optional[Caps] = None
) -> Tuple[bool, FrozenSet[int]]:
    """Test whether a subgroup of Q^d is stable under every elementary matrix.

    A subgroup is stable exactly when it equals I^d for an ideal I, and the
    only candidate is the ideal spanned by the subgroup's coordinates: acting
    with e_ji(r) on a member and subtracting shows r times any coordinate
    can be steered into any slot, so stability forces all of I^d in, while
    I^d itself is clearly stable.  Returns the verdict together with that
    candidate ideal.
    """
    caps = caps if caps is not None else default_caps()
    points = {model.check_point(p) for p in delta}
    if not points:
        raise ValidationError("a subgroup contains at least the zero point")
    if len(points) ** 2 > caps.max_elements:
        raise CapExceeded("subgroup too large to validate additive closure")
    for a in points:
        for b in points:
            if model.add_points(a, b) not in points:
                raise ValidationError("the given set is not closed under addition")
    ideal = ideal_span(ctx=model.ctx, seeds={c for p in points for c in p})
    return len(points) == len(ideal) ** model.d, ideal


def _points_additive_closure(model: DualModel, seeds: Iterable[Point]) -> FrozenSet[Point]:
    seeds = list(dict.fromkeys(seeds))
    seen = {model.zero_point}
    frontier = [model.zero_point]
    while frontier:
        step = []
        for a in frontier:
            for s in seeds:
                v = model.add_points(a, s)
                if v not in seen:
                    seen.add(v)
                    step.append(v)
        frontier = step
    return frozenset(seen)


def all_invariant_subgroups(
    model: DualModel, caps: Optional[Caps] = None
) -> List[Tuple[FrozenSet[Point], FrozenSet[int]]]:
    """Every subgroup of Q^d stable under all elementary matrices.

    Exhaustive mode is deliberately small: it requires |Q| <= 8 and
    d in {2, 3}.  The additive closure of one point's orbit is the smallest
    stable subgroup containing it, and every stable subgroup is the join of
    the closures of its members, so closing those atoms under pairwise joins
    finds the whole family without walking the full subgroup lattice.  Each
    result is verified to be the d-th power of an ideal, and the ideals
    found are cross-checked against the quotient's full ideal inventory;
    either failing is reported as an error rather than papered over.
    """
    caps = caps if caps is not None else default_caps()
    ctx, d = model.ctx, model.d
    if ctx.size > 8 or d not in (2, 3):
        raise ValidationError("exhaustive enumeration is limited to |Q| <= 8 and d in {2, 3}")
    generators = elementary_generators(ctx, d)
    atoms = set()
    for point in model.iter_points():
        atoms.add(_points_additive_closure(model, orbit(model, point, generators, caps)))
    subgroups = set(atoms)
    changed = True
    while changed:
        changed = False
        for a, b in itertools.combinations(sorted(subgroups, key=_ideal_key), 2):
            joined = _points_additive_closure(model, sorted(a | b))
            if joined not in subgroups:
                subgroups.add(joined)
                changed = True
    results = []
    for subgroup in sorted(subgroups, key=_ideal_key):
        is_power, ideal = invariant_subgroup_check(model, subgroup, caps)
        if not is_power:
            raise ValidationError("found a stable subgroup that is not the power of an ideal")
        results.append((subgroup, ideal))
    if {ideal for _, ideal in results} != set(model_ideals(ctx)):
        raise ValidationError("stable subgroups do not match the ideal inventory")
    return results
