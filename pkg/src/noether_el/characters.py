"""Irreducible characters of finite matrix groups and induced traces.

The finite side first: a :class:`FiniteGroup` wraps an enumerated matrix
group over a quotient, possibly folded along a normal subgroup so that its
elements are canonical coset representatives.  Conjugacy classes come from
a breadth-first orbit walk, and the full character table from the classic
simultaneous-eigenvector computation on class-sum matrices: a random real
combination of the structure-constant matrices is diagonalised in floating
point, retried on degenerate eigenvalues, re-orthogonalised, and the result
is accepted only if both orthogonality relations hold at the configured
tolerance.

On top of that sit character triples (level ideal, kernel ideal, orbit of
characters of the congruence subquotient between them) and the traces they
induce: zero off the matrices that are scalar modulo the level, and an
orbit average of normalised character values at the subquotient image
otherwise.  Evaluation happens on exact integer or polynomial matrices and
reduces into the finite model only at the last step, so entries never grow
past the configured bound unnoticed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .caps import Caps, default_caps
from .dual import ideal_span
from .errors import CapExceeded, ValidationError
from .finiteness import compute_depth
from .groups import (
    GroupTable,
    additive_basis,
    elementary_generators,
    generate_subgroup,
    normal_closure,
)
from .ideals import Ideal, Ring, ideal_equal, ideal_sum
from .matgroup import (
    check_entry_bound,
    mat_identity,
    mat_inverse_unimodular,
    mat_mul,
    elementary_matrix,
    qmat_identity,
    qmat_in_sltil_level,
    qmat_inverse,
    qmat_mul,
    sltil_level,
)
from .quotients import QuotientContext

QMat = Tuple[int, ...]
IdealLike = Union[Ideal, Iterable[int]]

# contract limits: conjugacy enumeration, the eigenvector solve, the
# numeric axiom sample, and the character-orbit walk
_GROUP_CAP = 100_000
_CLASS_CAP = 60
_SAMPLE_CAP = 64
_ORBIT_CAP = 10_000
_EIG_RETRIES = 8


# ---------------------------------------------------------------------------
# finite groups, plain or folded


@dataclass(eq=False)
class FiniteGroup:
    """A finite matrix group over a quotient, with optional coset folding.

    ``elements`` are canonical representatives in ascending order.  For a
    plain subgroup ``fold`` is ``None`` and arithmetic is ordinary matrix
    arithmetic.  For a quotient S/N, ``fold`` maps every member of the
    ambient enumeration to the smallest element of its N-coset; products
    and inverses of representatives are folded back before use, which is
    sound because N is normal.

    ``ambient_generators`` hold representatives of the generators of the
    enclosing group when this group is a normal subquotient of it; they
    drive the conjugation action on characters and are allowed to lie
    outside the group itself.
    """

    ctx: QuotientContext
    d: int
    elements: Tuple[QMat, ...]
    generators: Tuple[QMat, ...]
    fold: Optional[Dict[QMat, QMat]] = None
    ambient_generators: Tuple[QMat, ...] = ()
    _classes: Optional[Tuple[Tuple[QMat, ...], ...]] = field(
        default=None, repr=False)
    _class_of: Optional[Dict[QMat, int]] = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    def fold_of(self, mat: QMat) -> QMat:
        if self.fold is None:
            return mat
        try:
            return self.fold[mat]
        except KeyError:
            raise ValidationError(
                "matrix lies outside the enumerated ambient group") from None

    def identity(self) -> QMat:
        return self.fold_of(qmat_identity(self.ctx, self.d))

    def mul(self, a: QMat, b: QMat) -> QMat:
        return self.fold_of(qmat_mul(self.ctx, self.d, a, b))

    def inverse(self, a: QMat) -> QMat:
        return self.fold_of(qmat_inverse(self.ctx, self.d, a))

    def conjugate(self, x: QMat, g: QMat) -> QMat:
        """The fold of g^-1 x g."""
        gi = qmat_inverse(self.ctx, self.d, g)
        return self.fold_of(
            qmat_mul(self.ctx, self.d,
                     qmat_mul(self.ctx, self.d, gi, x), g))

    def __contains__(self, mat: QMat) -> bool:
        return mat in self._member_set()

    def _member_set(self) -> FrozenSet[QMat]:
        if not hasattr(self, "_members"):
            self._members = frozenset(self.elements)
        return self._members

    def class_index(self, x: QMat) -> int:
        """Index of the conjugacy class of an element."""
        conjugacy_classes(self)
        try:
            return self._class_of[x]
        except KeyError:
            raise ValidationError("element is not in the group") from None


def group_from_table(table: GroupTable) -> FiniteGroup:
    """Wrap an enumerated subgroup for conjugacy and character work."""
    return FiniteGroup(
        ctx=table.ctx,
        d=table.d,
        elements=tuple(sorted(table.elements)),
        generators=tuple(table.gens),
    )


def conjugacy_classes(group: FiniteGroup,
                      caps: Caps | None = None) -> Tuple[Tuple[QMat, ...], ...]:
    """Partition of the group into conjugacy classes.

    Classes are conjugation orbits under the group's own generators,
    discovered by scanning the sorted element list; the identity class is
    always first and every class is sorted internally, so the order of the
    partition is reproducible.  The result is cached on the group.
    """
    if group._classes is not None:
        return group._classes
    if group.order > _GROUP_CAP:
        raise CapExceeded(
            f"conjugacy enumeration is capped at {_GROUP_CAP} elements, "
            f"the group has {group.order}")
    pairs = [(g, group.inverse(g)) for g in group.generators]
    ident = group.identity()
    class_of: Dict[QMat, int] = {}
    classes: List[Tuple[QMat, ...]] = []
    for x in (ident,) + group.elements:
        if x in class_of:
            continue
        seen = {x}
        queue = [x]
        while queue:
            y = queue.pop()
            for g, gi in pairs:
                z = group.fold_of(
                    qmat_mul(group.ctx, group.d,
                             qmat_mul(group.ctx, group.d, gi, y), g))
                if z not in seen:
                    seen.add(z)
                    queue.append(z)
        cls = tuple(sorted(seen))
        idx = len(classes)
        for y in cls:
            class_of[y] = idx
        classes.append(cls)
    if sum(len(c) for c in classes) != group.order:
        raise ValidationError(
            "conjugation left the element set; the group is not closed")
    group._classes = tuple(classes)
    group._class_of = class_of
    return group._classes


# ---------------------------------------------------------------------------
# class functions and the character table


@dataclass(frozen=True)
class ClassFunction:
    """One complex value per conjugacy class, in partition order.

    ``degree`` is the integer value at the identity class for characters;
    generic class functions may carry any positive label there.
    """

    values: Tuple[complex, ...]
    degree: int

    def value_on(self, group: FiniteGroup, x: QMat) -> complex:
        return self.values[group.class_index(x)]


def irreducible_characters(group: FiniteGroup,
                           caps: Caps | None = None) -> Tuple[ClassFunction, ...]:
    """The full table of irreducible complex characters.

    Works over the class-sum structure constants: the character columns are
    the common eigenvectors of the class-sum multiplication matrices, so a
    random real combination of those matrices has them as its eigenbasis.
    Draws with degenerate eigenvalues are retried with fresh coefficients;
    the surviving eigenvectors get one modified Gram-Schmidt pass in the
    size-weighted inner product, are rescaled to characters, and must then
    satisfy both orthogonality relations and the degree-square count at the
    configured tolerance.  Fixed seed in, identical floats out.
    """
    caps = caps or default_caps()
    classes = conjugacy_classes(group, caps)
    k = len(classes)
    if k > _CLASS_CAP:
        raise CapExceeded(
            f"the character solve is capped at {_CLASS_CAP} classes, "
            f"the group has {k}")
    order = group.order
    sizes = np.array([len(c) for c in classes], dtype=float)
    class_of = group._class_of
    inverse_of = {x: group.inverse(x) for cls in classes for x in cls}
    mult = [np.zeros((k, k)) for _ in range(k)]
    for l in range(k):
        z = classes[l][0]
        for i in range(k):
            for x in classes[i]:
                j = class_of[group.mul(inverse_of[x], z)]
                mult[i][j, l] += 1.0

    rng = random.Random(caps.seed)
    eigvecs = None
    for _ in range(_EIG_RETRIES):
        coeffs = [rng.uniform(0.5, 1.5) for _ in range(k)]
        combo = np.zeros((k, k))
        for c, m in zip(coeffs, mult):
            combo += c * m
        vals, vecs = np.linalg.eig(combo)
        by = np.lexsort((vals.imag.round(9), vals.real.round(9)))
        vals, vecs = vals[by], vecs[:, by]
        gap = (min(abs(vals[i + 1] - vals[i]) for i in range(k - 1))
               if k > 1 else 1.0)
        if gap > 1e-6 * (1.0 + float(abs(vals).max())):
            eigvecs = vecs
            break
    if eigvecs is None:
        raise ValidationError(
            "class-sum eigenvalues stayed degenerate after "
            f"{_EIG_RETRIES} random combinations")

    # clean up in the geometry where character rows are orthonormal
    ys = eigvecs.astype(complex) / np.sqrt(sizes)[:, None]
    for a in range(k):
        for b in range(a):
            ys[:, a] -= (np.vdot(ys[:, b], ys[:, a])) * ys[:, b]
        nrm = float(np.linalg.norm(ys[:, a]))
        if nrm < 1e-9:
            raise ValidationError(
                "an eigenvector collapsed during re-orthogonalisation")
        ys[:, a] /= nrm

    chars: List[ClassFunction] = []
    for c in range(k):
        v = ys[:, c] * np.sqrt(sizes)
        if abs(v[0]) < 1e-12:
            raise ValidationError(
                "an eigenvector vanishes at the identity class")
        v = v / v[0]
        deg = float(order / np.sum(np.abs(v) ** 2 / sizes)) ** 0.5
        deg_int = round(deg)
        if deg_int <= 0 or abs(deg - deg_int) > caps.dixon_tol * max(1.0, deg):
            raise ValidationError(
                f"character degree {deg!r} is not close to an integer")
        values = deg * v / sizes
        chars.append(ClassFunction(
            values=tuple(complex(x) for x in values), degree=deg_int))
    chars.sort(key=lambda f: (
        f.degree,
        tuple((round(z.real, 8), round(z.imag, 8)) for z in f.values)))

    if sum(f.degree ** 2 for f in chars) != order:
        raise ValidationError(
            "character degrees do not account for the group order")
    table = np.array([f.values for f in chars])
    gram = (table * sizes) @ table.conj().T / order
    if float(np.abs(gram - np.eye(k)).max()) > caps.dixon_tol:
        raise ValidationError("row orthogonality failed at the tolerance")
    cols = table.T @ table.conj()
    scale = np.sqrt(np.outer(sizes, sizes)) / order
    if float(np.abs(cols * scale - np.eye(k)).max()) > caps.dixon_tol:
        raise ValidationError("column orthogonality failed at the tolerance")
    return tuple(chars)


# ---------------------------------------------------------------------------
# the congruence subquotient between a kernel and a level


def _ideal_residues(ctx: QuotientContext, ideal: IdealLike) -> FrozenSet[int]:
    if isinstance(ideal, Ideal):
        return ctx.image_of_ideal(ideal)
    residues = frozenset(ideal)
    for r in residues:
        if not isinstance(r, int) or not 0 <= r < ctx.size:
            raise ValidationError(
                f"residue {r!r} is out of range for the quotient")
    if not residues or ideal_span(ctx, residues) != residues:
        raise ValidationError(
            "the given residues are not an ideal of the quotient")
    return residues


def subquotient_A(ctx: QuotientContext, d: int, level: IdealLike,
                  kernel: IdealLike,
                  caps: Caps | None = None) -> Tuple[FiniteGroup, int]:
    """The layer between two congruence levels, as an explicit quotient.

    Takes the matrices in the elementary group over the quotient that are
    scalar modulo ``level``, modulo the normal closure of the elementary
    matrices with entries in ``kernel``.  Returns that group (canonical
    coset representatives, folded arithmetic) together with its index over
    the part that is central in the whole elementary quotient — the piece
    that measures how far the layer is from being central outright.
    """
    caps = caps or default_caps()
    level_res = _ideal_residues(ctx, level)
    kernel_res = _ideal_residues(ctx, kernel)
    if not kernel_res <= level_res:
        raise ValidationError(
            "the kernel ideal must be contained in the level ideal")
    amb_gens = elementary_generators(ctx, d)
    full = generate_subgroup(ctx, d, amb_gens, caps)
    seeds = elementary_generators(ctx, d, additive_basis(ctx, kernel_res))
    closure = normal_closure(ctx, d, seeds, amb_gens, caps)

    # coset fold over the full group; scanning in ascending order makes the
    # first unseen member of each coset its minimum
    fold: Dict[QMat, QMat] = {}
    reps: List[QMat] = []
    for g in sorted(full.elements):
        if g in fold:
            continue
        reps.append(g)
        for n in closure.elements:
            fold[qmat_mul(ctx, d, g, n)] = g

    members = tuple(
        r for r in reps if qmat_in_sltil_level(ctx, d, r, level_res))
    member_set = frozenset(members)

    # a small generating set: start from the folds of the level-elementary
    # matrices (always inside the layer), then extend greedily
    gens: List[QMat] = []
    ident = fold[qmat_identity(ctx, d)]
    span = {ident}
    for e in elementary_generators(ctx, d, additive_basis(ctx, level_res)):
        r = fold[e]
        if r not in span:
            gens.append(r)
            span = _folded_span(ctx, d, gens, fold)
    for m in members:
        if m not in span:
            gens.append(m)
            span = _folded_span(ctx, d, gens, fold)
    if span != member_set:
        raise ValidationError(
            "the layer's representatives do not close under folded products")

    amb_reps: List[QMat] = []
    for g in amb_gens:
        r = fold[g]
        if r not in amb_reps:
            amb_reps.append(r)
    central = [
        z for z in members
        if all(fold[qmat_mul(ctx, d, z, g)] == fold[qmat_mul(ctx, d, g, z)]
               for g in amb_reps)
    ]
    group = FiniteGroup(
        ctx=ctx, d=d, elements=members, generators=tuple(gens),
        fold=fold, ambient_generators=tuple(amb_reps))
    return group, len(members) // len(central)


def _folded_span(ctx: QuotientContext, d: int, gens: Sequence[QMat],
                 fold: Dict[QMat, QMat]) -> set:
    """Subgroup generated by coset representatives under folded products.

    Right-multiplying by generators from the identity reaches every finite
    product, and in a finite group that set already contains all inverses.
    """
    ident = fold[qmat_identity(ctx, d)]
    span = {ident}
    queue = [ident]
    while queue:
        x = queue.pop()
        for g in gens:
            y = fold[qmat_mul(ctx, d, x, g)]
            if y not in span:
                span.add(y)
                queue.append(y)
    return span


# ---------------------------------------------------------------------------
# the conjugation action of the ambient group on characters


def character_orbit(group: FiniteGroup, start: ClassFunction,
                    caps: Caps | None = None) -> Tuple[ClassFunction, ...]:
    """Orbit of a class function under conjugation by the ambient
    generators: moving by g sends f to x -> f(g^-1 x g).

    Breadth-first with a rounded-value key, so the orbit order is
    deterministic.  Groups without ambient generators (plain subgroups)
    only ever produce the singleton orbit.
    """
    classes = conjugacy_classes(group, caps)
    k = len(classes)
    if len(start.values) != k:
        raise ValidationError(
            "class function length does not match the class count")
    perms = []
    for g in group.ambient_generators:
        perms.append([group._class_of[group.conjugate(cls[0], g)]
                      for cls in classes])

    def key(f: ClassFunction):
        return tuple((round(z.real, 9), round(z.imag, 9)) for z in f.values)

    seen: Dict[tuple, ClassFunction] = {key(start): start}
    queue = [start]
    while queue:
        f = queue.pop(0)
        for p in perms:
            moved = ClassFunction(
                values=tuple(f.values[p[c]] for c in range(k)),
                degree=f.degree)
            mk = key(moved)
            if mk not in seen:
                if len(seen) >= _ORBIT_CAP:
                    raise CapExceeded(
                        f"character orbit passed the cap {_ORBIT_CAP}")
                seen[mk] = moved
                queue.append(moved)
    return tuple(seen.values())


# ---------------------------------------------------------------------------
# character triples and their validation


@dataclass(eq=False)
class CharacterTriple:
    """A level ideal, a kernel ideal below it, and an orbit of irreducible
    characters of the congruence layer between them.

    ``subquotient`` is the finite model of that layer the orbit lives on;
    triples without one can still be checked for the level/kernel relation
    but carry no verifiable orbit.
    """

    level: Ideal
    kernel: Ideal
    orbit: Tuple[ClassFunction, ...]
    subquotient: Optional[FiniteGroup] = None


@dataclass(frozen=True)
class TripleReport:
    """Outcome of the three triple conditions; ``None`` marks a check that
    had no finite model to run against."""

    depth_ok: bool
    depth_status: str
    depth_ideal: Ideal
    orbit_ok: Optional[bool]
    essential_ok: Optional[bool]

    @property
    def passed(self) -> bool:
        return self.depth_ok and bool(self.orbit_ok) and bool(self.essential_ok)


def _match_to_table(fns: Sequence[ClassFunction],
                    table: Sequence[ClassFunction],
                    tol: float) -> Optional[List[int]]:
    out: List[int] = []
    for f in fns:
        hit = None
        for i, t in enumerate(table):
            if len(t.values) == len(f.values) and max(
                    abs(a - b) for a, b in zip(f.values, t.values)) <= tol:
                hit = i
                break
        if hit is None:
            return None
        out.append(hit)
    return out


def validate_triple(triple: CharacterTriple,
                    caps: Caps | None = None) -> TripleReport:
    """Check the three conditions a character triple must satisfy.

    (1) the kernel's finiteness depth equals the level (with the depth
    engine's own certified/bound-limited status), (2) the orbit is a single
    closed orbit of irreducible characters under the ambient conjugation
    action, and (3) the orbit is essential: elements on which every orbit
    member looks like the identity must already be scalar modulo the
    kernel.  Failures are reported, not raised.
    """
    caps = caps or default_caps()
    depth_ideal, depth_status = compute_depth(triple.kernel, caps)
    depth_ok = ideal_equal(depth_ideal, triple.level, caps)
    group = triple.subquotient
    if group is None:
        return TripleReport(depth_ok, depth_status, depth_ideal, None, None)

    table = irreducible_characters(group, caps)
    orbit_ok = False
    essential_ok = False
    matched = _match_to_table(triple.orbit, table, caps.dixon_tol)
    if matched is not None and len(set(matched)) == len(triple.orbit) > 0:
        closure = character_orbit(group, table[matched[0]], caps)
        closed = _match_to_table(closure, table, caps.dixon_tol)
        orbit_ok = closed is not None and set(closed) == set(matched)

    if triple.orbit:
        kernel_res = _ideal_residues(group.ctx, triple.kernel)
        conjugacy_classes(group, caps)
        annihilated = []
        for a in group.elements:
            c = group._class_of[a]
            if all(abs(f.values[c] - f.degree) <= caps.dixon_tol * f.degree
                   for f in triple.orbit):
                annihilated.append(a)
        essential_ok = all(
            qmat_in_sltil_level(group.ctx, group.d, a, kernel_res)
            for a in annihilated)
    return TripleReport(depth_ok, depth_status, depth_ideal,
                        orbit_ok, essential_ok)


# ---------------------------------------------------------------------------
# word balls: the truncated evaluation domain over the base ring


@dataclass(frozen=True)
class WordBall:
    """All products of at most ``radius`` elementary letters over the base
    ring, deduplicated, in breadth-first order."""

    ring: Ring
    d: int
    radius: int
    elements: Tuple[tuple, ...]


def word_ball(ring: Ring, d: int, radius: int,
              values: Sequence = (1, -1),
              caps: Caps | None = None) -> WordBall:
    """Enumerate the truncated ball of elementary words.

    ``values`` are the letter arguments (integers stay integers so the
    entry bound applies; anything else is coerced into the ring).  The
    element order is breadth-first over the letter list, hence stable.
    """
    caps = caps or default_caps()
    if d < 2:
        raise ValidationError("elementary words need dimension at least 2")
    if radius < 0:
        raise ValidationError("the radius must be nonnegative")
    letters = []
    for i in range(d):
        for j in range(d):
            if i != j:
                for v in values:
                    entry = v if isinstance(v, int) else ring.coerce(v)
                    letters.append(elementary_matrix(d, i, j, entry))
    ident = mat_identity(d)
    ball = {ident}
    order = [ident]
    frontier = [ident]
    for _ in range(radius):
        grown = []
        for g in frontier:
            for e in letters:
                h = mat_mul(g, e)
                if h not in ball:
                    check_entry_bound(h, caps)
                    if len(ball) >= caps.max_elements:
                        raise CapExceeded(
                            f"word ball passed the cap {caps.max_elements}")
                    ball.add(h)
                    order.append(h)
                    grown.append(h)
        frontier = grown
    return WordBall(ring=ring, d=d, radius=radius, elements=tuple(order))


def sample_ball(ball: WordBall, count: int, seed: int) -> List[tuple]:
    """A reproducible sample of ball elements (the whole ball if small)."""
    if count <= 0:
        raise ValidationError("sample count must be positive")
    if count >= len(ball.elements):
        return list(ball.elements)
    rng = random.Random(seed)
    return rng.sample(ball.elements, count)


# ---------------------------------------------------------------------------
# induced traces


@dataclass(eq=False)
class TraceFunction:
    """Pointwise evaluator for the trace induced by a character triple.

    The value at a matrix is zero unless the matrix is scalar modulo the
    level; otherwise the matrix is reduced into the finite subquotient
    model and the orbit's character values there are averaged, each
    normalised by its degree.  ``value`` accepts matrices as rows of
    integers or ring elements.
    """

    level: Ideal
    kernel: Ideal
    orbit_size: int
    _group: FiniteGroup = field(repr=False, default=None)
    _orbit: Tuple[ClassFunction, ...] = field(repr=False, default=())
    _caps: Caps = field(repr=False, default=None)

    def value(self, rows) -> complex:
        mat = tuple(tuple(r) for r in rows)
        d = self._group.d
        if len(mat) != d or any(len(r) != d for r in mat):
            raise ValidationError(
                f"expected a {d} x {d} matrix over the base ring")
        check_entry_bound(mat, self._caps)
        lvl = sltil_level(mat, self.level.ring)
        if not self.level.contains_ideal(lvl, self._caps):
            return 0j
        ctx = self._group.ctx
        flat = tuple(ctx.reduce(x) for row in mat for x in row)
        rep = self._group.fold_of(flat)
        c = self._group.class_index(rep)
        total = 0j
        for f in self._orbit:
            total += f.values[c] / f.degree
        return total / self.orbit_size

    __call__ = value


def induced_trace(triple: CharacterTriple, model: WordBall,
                  caps: Caps | None = None) -> TraceFunction:
    """The trace induced by a triple, as an evaluator over a word ball.

    The ball fixes the ring and dimension the evaluator expects and is the
    sampling domain for the numeric checks; evaluation itself only needs
    the entries to stay under the configured bound.
    """
    caps = caps or default_caps()
    group = triple.subquotient
    if group is None:
        raise ValidationError(
            "the triple carries no finite subquotient model to induce from")
    if not triple.orbit:
        raise ValidationError("the triple's orbit is empty")
    if not isinstance(model, WordBall):
        raise ValidationError("the evaluation model must be a word ball")
    if model.d != group.d:
        raise ValidationError("ball and subquotient dimensions differ")
    if model.ring != triple.level.ring or model.ring != triple.kernel.ring:
        raise ValidationError("ball and triple live over different rings")
    k = len(conjugacy_classes(group, caps))
    for f in triple.orbit:
        if len(f.values) != k:
            raise ValidationError(
                "an orbit member does not match the subquotient's classes")
        if f.degree <= 0:
            raise ValidationError("character degrees must be positive")
    return TraceFunction(
        level=triple.level, kernel=triple.kernel,
        orbit_size=len(triple.orbit), _group=group,
        _orbit=tuple(triple.orbit), _caps=caps)


# ---------------------------------------------------------------------------
# numeric trace axioms on a finite sample


@dataclass(frozen=True)
class TraceChecks:
    """Measured deviations and verdicts for the trace axioms on a sample.

    ``kernel_ideal`` is the level recovered from sample points where the
    trace equals one; the verdict is containment in the declared kernel.
    Mathematical failures land in the booleans, never in exceptions.
    """

    gram_min_eig: float
    gram_ok: bool
    conj_deviation: float
    conj_ok: bool
    unit_deviation: float
    unit_ok: bool
    absq_min_eig: float
    absq_gram_ok: bool
    absq_conj_deviation: float
    absq_conj_ok: bool
    absq_unit_deviation: float
    absq_unit_ok: bool
    schur_deviation: float
    schur_ok: bool
    kernel_ideal: Ideal
    kernel_ok: bool

    @property
    def passed(self) -> bool:
        return (self.gram_ok and self.conj_ok and self.unit_ok
                and self.absq_gram_ok and self.absq_conj_ok
                and self.absq_unit_ok and self.schur_ok and self.kernel_ok)


def trace_checks(phi: TraceFunction, sample: Sequence,
                 caps: Caps | None = None) -> TraceChecks:
    """Run the trace axioms numerically on a sample of matrices.

    Positive semidefiniteness of the Gram matrix [phi(h^-1 g)], invariance
    under conjugation, value one at the identity, the same three for the
    squared modulus of the trace, multiplicativity against scalar sample
    members, and recovery of a kernel ideal contained in the declared one.
    The sample must consist of matrices invertible over the ring (words of
    elementary matrices always are).
    """
    caps = caps or default_caps()
    mats = [tuple(tuple(r) for r in g) for g in sample]
    if not mats:
        raise ValidationError("the sample is empty")
    if len(mats) > _SAMPLE_CAP:
        raise CapExceeded(
            f"trace checks are capped at {_SAMPLE_CAP} sample matrices")
    d = phi._group.d
    if any(len(m) != d or any(len(r) != d for r in m) for m in mats):
        raise ValidationError(f"sample matrices must all be {d} x {d}")
    ring = phi.level.ring
    ident = mat_identity(d)
    inverses = [mat_inverse_unimodular(m, caps) for m in mats]
    cache: Dict[tuple, complex] = {}

    def ev(m) -> complex:
        if m not in cache:
            cache[m] = phi.value(m)
        return cache[m]

    n = len(mats)
    raw = np.empty((n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            raw[a, b] = ev(mat_mul(inverses[b], mats[a]))
    gram = (raw + raw.conj().T) / 2
    gram_min = float(np.linalg.eigvalsh(gram).min())
    absq = (np.abs(raw) ** 2 + np.abs(raw.T) ** 2) / 2
    absq_min = float(np.linalg.eigvalsh(absq).min())

    conj_dev = 0.0
    absq_conj_dev = 0.0
    for g in mats:
        base = ev(g)
        for h, hinv in zip(mats, inverses):
            moved = ev(mat_mul(mat_mul(hinv, g), h))
            conj_dev = max(conj_dev, abs(moved - base))
            absq_conj_dev = max(absq_conj_dev,
                                abs(abs(moved) ** 2 - abs(base) ** 2))

    unit = ev(ident)
    unit_dev = abs(unit - 1)
    absq_unit_dev = abs(abs(unit) ** 2 - 1)

    zero = ring.coerce(0)
    scalars = [ident]
    for m in mats:
        entries = [ring.coerce(x) for row in m for x in row]
        diag = entries[0]
        if all(entries[i * d + j] == (diag if i == j else zero)
               for i in range(d) for j in range(d)) and m not in scalars:
            scalars.append(m)
    schur_dev = 0.0
    for z in scalars:
        vz = ev(z)
        for g in mats:
            schur_dev = max(schur_dev,
                            abs(ev(mat_mul(g, z)) - ev(g) * vz))

    recovered = Ideal(ring, ())
    for m in mats + [ident]:
        if abs(ev(m) - 1) <= caps.dixon_tol:
            recovered = ideal_sum(recovered, sltil_level(m, ring))
    kernel_ok = phi.kernel.contains_ideal(recovered, caps)

    return TraceChecks(
        gram_min_eig=gram_min,
        gram_ok=gram_min >= -caps.psd_tol,
        conj_deviation=conj_dev,
        conj_ok=conj_dev <= caps.conj_tol,
        unit_deviation=unit_dev,
        unit_ok=unit_dev <= caps.dixon_tol,
        absq_min_eig=absq_min,
        absq_gram_ok=absq_min >= -caps.psd_tol,
        absq_conj_deviation=absq_conj_dev,
        absq_conj_ok=absq_conj_dev <= caps.conj_tol,
        absq_unit_deviation=absq_unit_dev,
        absq_unit_ok=absq_unit_dev <= caps.dixon_tol,
        schur_deviation=schur_dev,
        schur_ok=schur_dev <= caps.conj_tol,
        kernel_ideal=recovered,
        kernel_ok=kernel_ok,
    )


# ---------------------------------------------------------------------------
# re-extraction of a triple from trace values


@dataclass(frozen=True)
class RecoveredTriple:
    """Level and kernel ideals rebuilt from trace values on a ball, plus
    the indices of the orbit members in the subquotient's character table."""

    level: Ideal
    kernel: Ideal
    orbit_indices: Tuple[int, ...]


def recover_triple(phi: TraceFunction, ball: WordBall,
                   caps: Caps | None = None) -> RecoveredTriple:
    """Rebuild (level, kernel, orbit) from the trace's values on a ball.

    The level accumulates scalar-mod levels of points with nonzero trace,
    the kernel those where the trace is one; both are lower bounds that
    reach the declared ideals once the ball is rich enough.  The orbit is
    read off by expanding the per-class restriction of the trace in the
    character table; a ball that misses a conjugacy class, or a restriction
    that is not an orbit average, is refused.
    """
    caps = caps or default_caps()
    ring = phi.level.ring
    group = phi._group
    classes = conjugacy_classes(group, caps)
    level_hat = Ideal(ring, ())
    kernel_hat = Ideal(ring, ())
    per_class: Dict[int, complex] = {}
    for g in ball.elements:
        v = phi.value(g)
        lvl = sltil_level(g, ring)
        if abs(v) > caps.dixon_tol and not level_hat.contains_ideal(lvl, caps):
            level_hat = ideal_sum(level_hat, lvl)
        if abs(v - 1) <= caps.dixon_tol and not kernel_hat.contains_ideal(lvl, caps):
            kernel_hat = ideal_sum(kernel_hat, lvl)
        if phi.level.contains_ideal(lvl, caps):
            flat = tuple(group.ctx.reduce(x) for row in g for x in row)
            c = group.class_index(group.fold_of(flat))
            prev = per_class.get(c)
            if prev is not None and abs(prev - v) > caps.dixon_tol:
                raise ValidationError(
                    "trace values disagree within a conjugacy class")
            per_class[c] = v
    if len(per_class) != len(classes):
        raise ValidationError(
            f"the ball reaches only {len(per_class)} of "
            f"{len(classes)} classes; enlarge the radius")

    table = irreducible_characters(group, caps)
    order = group.order
    sizes = [len(c) for c in classes]
    restriction = [per_class[c] for c in range(len(classes))]
    chosen = []
    for i, f in enumerate(table):
        coeff = sum(sizes[c] * restriction[c] * f.values[c].conjugate()
                    for c in range(len(classes))) / order
        if abs(coeff) > caps.dixon_tol:
            chosen.append(i)
    if not chosen:
        raise ValidationError("the restriction expands to nothing")
    rebuilt = [
        sum(table[i].values[c] / table[i].degree for i in chosen) / len(chosen)
        for c in range(len(classes))
    ]
    dev = max(abs(a - b) for a, b in zip(rebuilt, restriction))
    if dev > caps.dixon_tol:
        raise ValidationError(
            "the restriction is not an orbit average of irreducible "
            "characters")
    return RecoveredTriple(
        level=level_hat, kernel=kernel_hat, orbit_indices=tuple(chosen))
