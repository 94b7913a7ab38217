"""Invariant probability measures on a finite dual model.

Masses are exact rationals from construction through convolution and
pushforward; the single place a measure meets floating point is `fourier`,
which sums roots of unity in double precision (tolerance `Caps.fourier_tol`
where a caller compares).  The classification routine expands every
(ideal, coset-orbit) parameter pair into an explicit distribution, decomposes
the dual into matrix orbits by an independent search, and reports the
verified correspondence between the two routes: expansions that are invariant
but spread over several orbits are flagged as non-ergodic rather than
dropped, and distinct parameter pairs whose expansions coincide are reported
as collisions.
"""

from __future__ import annotations

import cmath
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from .caps import Caps, default_caps
from .dual import (
    DualCharacter,
    DualModel,
    Point,
    build_model,
    dual_action,
    ideal_span,
    model_ideals,
    orbit,
)
from .errors import ValidationError
from .groups import additive_basis, elementary_generators
from .ideals import Ideal
from .quotients import QuotientContext

IdealLike = Union[FrozenSet[int], Iterable[int], Ideal]


def _as_ideal_residues(ctx: QuotientContext, ideal: IdealLike) -> FrozenSet[int]:
    """Normalise an ideal argument to its residue set, and verify it is one."""
    if isinstance(ideal, Ideal):
        residues = ctx.image_of_ideal(ideal)
    else:
        residues = frozenset(ideal)
        for r in residues:
            if not isinstance(r, int) or not 0 <= r < ctx.size:
                raise ValidationError(f"residue {r!r} is out of range for the quotient")
    if not residues:
        raise ValidationError("an ideal contains at least zero")
    if ideal_span(ctx, residues) != residues:
        raise ValidationError("the given residues are not an ideal of the quotient")
    return residues


@dataclass
class InvariantMeasure:
    """A probability distribution on the characters of a dual model.

    Zero masses are stripped on construction, so equality of two measures is
    plain equality of their mass dictionaries.
    """

    masses: Dict[DualCharacter, Fraction]

    def __post_init__(self):
        cleaned: Dict[DualCharacter, Fraction] = {}
        total = Fraction(0)
        for chi, mass in self.masses.items():
            mass = Fraction(mass)
            if mass < 0:
                raise ValidationError(f"mass of {chi} is negative")
            total += mass
            if mass:
                cleaned[chi] = mass
        if total != 1:
            raise ValidationError(f"masses sum to {total}, expected 1")
        self.masses = cleaned

    def mass(self, chi: DualCharacter) -> Fraction:
        return self.masses.get(chi, Fraction(0))

    def support(self) -> Tuple[DualCharacter, ...]:
        return tuple(sorted(self.masses))

    def canonical(self) -> Tuple[Tuple[Tuple[int, ...], Fraction], ...]:
        """A hashable canonical form, for deduplication and sorting."""
        return tuple(sorted((chi.exponents, mass) for chi, mass in self.masses.items()))


def point_mass(chi: DualCharacter) -> InvariantMeasure:
    return InvariantMeasure({chi: Fraction(1)})


def uniform(support: Iterable[DualCharacter]) -> InvariantMeasure:
    support = list(support)
    if not support:
        raise ValidationError("uniform measure needs a non-empty support")
    if len(set(support)) != len(support):
        raise ValidationError("uniform support has repeated characters")
    share = Fraction(1, len(support))
    return InvariantMeasure({chi: share for chi in support})


def annihilator_in_dual(
    model: DualModel, ideal: IdealLike
) -> Tuple[DualCharacter, ...]:
    """Characters vanishing on I^d, i.e. the dual of the quotient by I^d.

    It is enough to test a character against x*e_i for x in a small additive
    generating set of the ideal and every coordinate slot i.
    """
    ctx = model.ctx
    residues = _as_ideal_residues(ctx, ideal)
    tests: List[Point] = []
    for x in additive_basis(ctx, residues):
        for i in range(model.d):
            point = [ctx.zero] * model.d
            point[i] = x
            tests.append(tuple(point))
    zero = Fraction(0)
    return tuple(
        chi
        for chi in model.iter_characters()
        if all(model.pairing_exponent(chi, point) == zero for point in tests)
    )


def annihilator_points(
    model: DualModel, characters: Iterable[DualCharacter]
) -> Tuple[Point, ...]:
    """Points of Q^d on which every one of the given characters is trivial."""
    characters = [model.check_character(chi) for chi in characters]
    zero = Fraction(0)
    return tuple(
        point
        for point in model.iter_points()
        if all(model.pairing_exponent(chi, point) == zero for chi in characters)
    )


def haar(model: DualModel, subgroup: Iterable[DualCharacter]) -> InvariantMeasure:
    """The uniform measure on a subgroup of the dual.

    The subgroup law is actually verified -- pointwise closure under
    addition -- before any mass is assigned.
    """
    members = [model.check_character(chi) for chi in subgroup]
    member_set = set(members)
    if len(member_set) != len(members):
        raise ValidationError("subgroup listed with repetitions")
    for a in members:
        for b in members:
            if model.dual_add(a, b) not in member_set:
                raise ValidationError("the given characters are not closed under addition")
    return uniform(members)


def translate(
    model: DualModel, measure: InvariantMeasure, shift: DualCharacter
) -> InvariantMeasure:
    model.check_character(shift)
    return InvariantMeasure(
        {model.dual_add(chi, shift): mass for chi, mass in measure.masses.items()}
    )


def pushforward(
    model: DualModel, g, measure: InvariantMeasure, caps: Optional[Caps] = None
) -> InvariantMeasure:
    """Image measure under the dual action of g."""
    return InvariantMeasure(
        {dual_action(model, g, chi, caps): mass for chi, mass in measure.masses.items()}
    )


def is_invariant(
    model: DualModel, measure: InvariantMeasure, generators, caps: Optional[Caps] = None
) -> bool:
    return all(pushforward(model, g, measure, caps) == measure for g in generators)


def fourier(model: DualModel, measure: InvariantMeasure, point: Sequence[int]) -> complex:
    """The transform sum(mass(chi) * chi(point)) as a complex number.

    Summation runs in sorted support order so that reruns produce bitwise
    identical floats.
    """
    point = model.check_point(point)
    total = 0j
    for chi, mass in sorted(measure.masses.items()):
        q = model.pairing_exponent(chi, point)
        total += float(mass) * cmath.exp(2j * math.pi * float(q))
    return total


def convolve(
    model: DualModel, left: InvariantMeasure, right: InvariantMeasure
) -> InvariantMeasure:
    masses: Dict[DualCharacter, Fraction] = {}
    for chi_l, mass_l in left.masses.items():
        for chi_r, mass_r in right.masses.items():
            key = model.dual_add(chi_l, chi_r)
            masses[key] = masses.get(key, Fraction(0)) + mass_l * mass_r
    return InvariantMeasure(masses)


def has_atoms(measure: InvariantMeasure) -> bool:
    """Whether any single character carries positive mass.

    On a finite model every probability measure is purely atomic, so this is
    true for every valid measure; it exists so that the atom bookkeeping of
    convolutions can be exercised literally -- a convolution has atoms
    exactly when both factors do.
    """
    return any(mass > 0 for mass in measure.masses.values())


@dataclass(frozen=True)
class ParametricMeasure:
    """An (ideal, coset orbit) parameter pair.

    ``ideal`` is a residue set I of the quotient; ``orbit`` lists the
    canonical (minimal) representatives of a single matrix orbit of cosets
    of the annihilator of I^d in the dual, in sorted order.
    """

    ideal: FrozenSet[int]
    orbit: Tuple[DualCharacter, ...]


def expand_parametric(model: DualModel, parametric: ParametricMeasure) -> InvariantMeasure:
    """The measure a parameter pair denotes: uniform on its union of cosets."""
    annihilator = annihilator_in_dual(model, parametric.ideal)
    share = Fraction(1, len(parametric.orbit) * len(annihilator))
    masses: Dict[DualCharacter, Fraction] = {}
    for representative in parametric.orbit:
        for offset in annihilator:
            chi = model.dual_add(representative, offset)
            masses[chi] = masses.get(chi, Fraction(0)) + share
    return InvariantMeasure(masses)


@dataclass
class ClassifiedMeasure:
    """One parameter pair, its expansion, and whether that expansion is ergodic."""

    parametric: ParametricMeasure
    measure: InvariantMeasure
    ergodic: bool


@dataclass
class MeasureClassification:
    """Both routes to the invariant measures of a finite model, reconciled.

    ``entries`` lists every (ideal, coset-orbit) pair with its expanded
    measure; ``orbits`` and ``orbit_measures`` come from an independent
    decomposition of the dual into matrix orbits.  ``ergodic_measures`` is
    the deduplicated list of ergodic expansions, ``collisions`` groups
    parameter pairs whose expansions coincide, and ``bijection_ok`` records
    whether the deduplicated ergodic expansions match the orbit measures
    exactly.
    """

    model: DualModel
    orbits: Tuple[Tuple[DualCharacter, ...], ...]
    orbit_measures: Tuple[InvariantMeasure, ...]
    entries: List[ClassifiedMeasure]
    ergodic_measures: Tuple[InvariantMeasure, ...]
    collisions: Tuple[Tuple[ParametricMeasure, ...], ...]
    bijection_ok: bool


def classify_measures(
    ctx: QuotientContext, d: int, caps: Optional[Caps] = None, cap: int = 10**6
) -> MeasureClassification:
    """Classify the invariant measures on the dual of Q^d.

    Route one runs over all ideals I of the quotient and all matrix orbits
    of cosets of the annihilator of I^d, expanding each pair to the uniform
    measure on its union of cosets and verifying invariance of the result
    exactly.  Route two decomposes the dual into matrix orbits directly and
    takes the uniform measure on each.  The two routes must meet in the
    ergodic expansions, and the report says whether they do.
    """
    caps = caps if caps is not None else default_caps()
    model = build_model(ctx, d, cap=cap)
    generators = elementary_generators(ctx, d)

    characters = list(model.iter_characters())
    orbit_index: Dict[DualCharacter, int] = {}
    orbits: List[Tuple[DualCharacter, ...]] = []
    for chi in characters:
        if chi in orbit_index:
            continue
        found = orbit(model, chi, generators, caps)
        for member in found:
            orbit_index[member] = len(orbits)
        orbits.append(tuple(sorted(found)))
    orbit_measures = tuple(uniform(members) for members in orbits)

    entries: List[ClassifiedMeasure] = []
    for ideal in model_ideals(ctx):
        annihilator = annihilator_in_dual(model, ideal)
        representative: Dict[DualCharacter, DualCharacter] = {}
        for chi in characters:
            if chi in representative:
                continue
            coset = [model.dual_add(chi, offset) for offset in annihilator]
            smallest = min(coset)
            for member in coset:
                representative[member] = smallest
        claimed = set()
        for chi in characters:
            root = representative[chi]
            if root in claimed:
                continue
            members = {root}
            queue = deque([root])
            while queue:
                current = queue.popleft()
                for g in generators:
                    moved = representative[dual_action(model, g, current, caps)]
                    if moved not in members:
                        members.add(moved)
                        queue.append(moved)
            claimed |= members
            parametric = ParametricMeasure(ideal, tuple(sorted(members)))
            measure = expand_parametric(model, parametric)
            if not is_invariant(model, measure, generators, caps):
                raise ValidationError("expanded measure failed the invariance check")
            touched = {orbit_index[member] for member in measure.masses}
            entries.append(ClassifiedMeasure(parametric, measure, len(touched) == 1))

    by_canonical: Dict[tuple, List[ClassifiedMeasure]] = {}
    for entry in entries:
        by_canonical.setdefault(entry.measure.canonical(), []).append(entry)
    collisions = tuple(
        tuple(entry.parametric for entry in group)
        for _, group in sorted(by_canonical.items())
        if len(group) >= 2
    )
    ergodic_by_canonical: Dict[tuple, InvariantMeasure] = {}
    for entry in entries:
        if entry.ergodic:
            ergodic_by_canonical.setdefault(entry.measure.canonical(), entry.measure)
    ergodic_measures = tuple(
        measure for _, measure in sorted(ergodic_by_canonical.items())
    )
    bijection_ok = sorted(m.canonical() for m in ergodic_measures) == sorted(
        m.canonical() for m in orbit_measures
    )
    return MeasureClassification(
        model=model,
        orbits=tuple(orbits),
        orbit_measures=orbit_measures,
        entries=entries,
        ergodic_measures=ergodic_measures,
        collisions=collisions,
        bijection_ok=bijection_ok,
    )
