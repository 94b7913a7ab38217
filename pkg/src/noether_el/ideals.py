"""Ideals of Z[x1..xk] and of finitely presented quotients of it.

A :class:`Ring` is Z[x1..xk]/(relations); the free case has no relations.
An :class:`Ideal` stores its user generators and works with the *effective*
generator list (user generators plus ring relations), so every computation
downstream sees the preimage ideal in the free ring.  The binary operations
(sum, product, intersection, colon, saturation) follow the usual elimination
and exact-division constructions, carried out with strong Groebner bases so
they are valid over the integers, not just over a field.
"""

from __future__ import annotations

import json
from typing import List, Sequence, Tuple, Union

from .caps import Caps, default_caps
from .errors import CapExceeded, ParseError
from .groebner import normal_form, poly_sort_key, strong_groebner
from .poly import GREVLEX, Polynomial, TermOrder, block_order, divexact, order_by_name

PolyLike = Union[Polynomial, str, int]


class Ring:
    """Z[x1..xk]/(relations) with a presentation term order."""

    __slots__ = ("nvars", "order", "relations")

    def __init__(
        self,
        nvars: int,
        relations: Sequence[PolyLike] = (),
        order: TermOrder = GREVLEX,
    ):
        self.nvars = nvars
        self.order = order
        rels = tuple(
            sorted(
                {self.coerce(r) for r in relations if self.coerce(r) != 0},
                key=lambda p: poly_sort_key(p, order),
            )
        )
        self.relations = rels

    def coerce(self, f: PolyLike) -> Polynomial:
        if isinstance(f, Polynomial):
            if f.nvars != self.nvars:
                raise ParseError(
                    f"polynomial in {f.nvars} variables used in a {self.nvars}-variable ring"
                )
            return f
        if isinstance(f, int):
            return Polynomial.constant(self.nvars, f)
        if isinstance(f, str):
            return Polynomial.parse(f, self.nvars)
        raise ParseError(f"cannot interpret {f!r} as a ring element")

    def is_free(self) -> bool:
        return not self.relations

    def __eq__(self, other):
        return (
            isinstance(other, Ring)
            and self.nvars == other.nvars
            and self.order == other.order
            and self.relations == other.relations
        )

    def __hash__(self):
        return hash((self.nvars, self.order, self.relations))

    def __repr__(self):
        if self.is_free():
            return f"Ring(Z[{self._vars_repr()}])"
        rels = ", ".join(r.format(self.order) for r in self.relations)
        return f"Ring(Z[{self._vars_repr()}] / ({rels}))"

    def _vars_repr(self) -> str:
        if self.nvars == 0:
            return ""
        if self.nvars == 1:
            return "x"
        return ", ".join(f"x{i + 1}" for i in range(self.nvars))


class Ideal:
    """An ideal of a :class:`Ring`, with a cached strong Groebner basis."""

    __slots__ = ("ring", "gens", "_gb")

    def __init__(self, ring: Ring, gens: Sequence[PolyLike] = ()):
        self.ring = ring
        coerced = []
        for g in gens:
            p = ring.coerce(g)
            if not p.is_zero() and p not in coerced:
                coerced.append(p)
        self.gens: Tuple[Polynomial, ...] = tuple(coerced)
        self._gb = None

    def effective_gens(self) -> Tuple[Polynomial, ...]:
        return self.gens + self.ring.relations

    def groebner(self, caps: Caps | None = None) -> List[Polynomial]:
        if self._gb is None:
            self._gb = strong_groebner(
                list(self.effective_gens()), self.ring.order, caps or default_caps()
            )
        return self._gb

    def normal_form(self, f: PolyLike, caps: Caps | None = None) -> Polynomial:
        return normal_form(self.ring.coerce(f), self.groebner(caps), self.ring.order)

    def contains(self, f: PolyLike, caps: Caps | None = None) -> bool:
        return self.normal_form(f, caps).is_zero()

    def contains_ideal(self, other: "Ideal", caps: Caps | None = None) -> bool:
        return all(self.contains(g, caps) for g in other.gens)

    def is_unit(self, caps: Caps | None = None) -> bool:
        gb = self.groebner(caps)
        return len(gb) == 1 and gb[0] == 1

    def is_zero(self, caps: Caps | None = None) -> bool:
        return not self.groebner(caps)

    def integer_part(self, caps: Caps | None = None) -> int:
        """The nonnegative generator of I intersected with the integers."""
        for g in self.groebner(caps):
            if g.is_constant():
                return abs(g.constant_coefficient())
        return 0

    def __eq__(self, other):
        if not isinstance(other, Ideal) or self.ring != other.ring:
            return NotImplemented
        return ideal_equal(self, other)

    def __hash__(self):  # hash by canonical basis
        return hash((self.ring, tuple(self.groebner())))

    def __repr__(self):
        gens = ", ".join(g.format(self.ring.order) for g in self.gens) or "0"
        return f"Ideal({gens})"


# ---------------------------------------------------------------------------
# operations


def _require_same_ring(a: Ideal, b: Ideal) -> None:
    if a.ring != b.ring:
        raise ParseError("ideal operation across different rings")


def ideal_sum(a: Ideal, b: Ideal) -> Ideal:
    _require_same_ring(a, b)
    return Ideal(a.ring, list(a.gens) + list(b.gens))


def ideal_product(a: Ideal, b: Ideal) -> Ideal:
    _require_same_ring(a, b)
    prods = [f * g for f in a.gens for g in b.gens]
    return Ideal(a.ring, prods)


def _eliminate_first_var(
    gens_a: Sequence[Polynomial],
    gens_b: Sequence[Polynomial],
    nvars: int,
    caps: Caps,
) -> List[Polynomial]:
    """Generators of (a) intersect (b) in the free ring Z[x1..x_nvars].

    Uses a tag variable t placed in front: the intersection is the ideal
    (t*a, (1-t)*b) with every monomial containing t eliminated by a block
    order.
    """
    wide = nvars + 1

    def widen(p: Polynomial) -> Polynomial:
        return Polynomial(wide, {(0,) + e: c for e, c in p.terms.items()})

    t = Polynomial.variable(wide, 0)
    one = Polynomial.one(wide)
    tagged = [t * widen(f) for f in gens_a]
    tagged += [(one - t) * widen(g) for g in gens_b]
    gb = strong_groebner(tagged, block_order(1), caps)
    out = []
    for g in gb:
        if all(e[0] == 0 for e in g.terms):
            out.append(Polynomial(nvars, {e[1:]: c for e, c in g.terms.items()}))
    return out


def ideal_intersect(a: Ideal, b: Ideal, caps: Caps | None = None) -> Ideal:
    _require_same_ring(a, b)
    caps = caps or default_caps()
    gens = _eliminate_first_var(
        a.effective_gens(), b.effective_gens(), a.ring.nvars, caps
    )
    return Ideal(a.ring, gens)


def ideal_quotient(j: Ideal, i: Ideal, caps: Caps | None = None) -> Ideal:
    """The colon ideal j : i = {r : r*i contained in j}."""
    _require_same_ring(j, i)
    caps = caps or default_caps()
    ring = j.ring
    divisors = [g for g in i.gens if not g.is_zero()]
    if not divisors:
        return Ideal(ring, [1])  # j : (0) is everything
    result: Ideal | None = None
    for g in divisors:
        # j : (g) in the quotient ring is the free-ring colon of the preimage
        # of j by the principal ideal (g) of the *free* ring.
        meet = _eliminate_first_var(j.effective_gens(), [g], ring.nvars, caps)
        part = Ideal(ring, [divexact(f, g, ring.order) for f in meet])
        if result is None:
            result = part
        else:
            result = ideal_intersect(result, part, caps)
    return result


def ideal_saturate(j: Ideal, f: Ideal, caps: Caps | None = None) -> Ideal:
    """Stable value of repeated colon by f."""
    caps = caps or default_caps()
    current = j
    for _ in range(caps.saturation_iters):
        bigger = ideal_quotient(current, f, caps)
        if ideal_equal(bigger, current, caps):
            return current
        current = bigger
    raise CapExceeded(f"saturation did not stabilise in {caps.saturation_iters} steps")


def ideal_equal(a: Ideal, b: Ideal, caps: Caps | None = None) -> bool:
    _require_same_ring(a, b)
    return all(b.contains(g, caps) for g in a.gens) and all(
        a.contains(g, caps) for g in b.gens
    )


# ---------------------------------------------------------------------------
# JSON representation
#
#   {"schema": 1,
#    "ring": {"vars": 1, "order": "grevlex", "relations": []},
#    "generators": ["4*x", "x^2"]}


def ring_to_dict(ring: Ring) -> dict:
    return {
        "vars": ring.nvars,
        "order": ring.order.name,
        "relations": [r.format(ring.order) for r in ring.relations],
    }


def ring_from_dict(data: dict) -> Ring:
    if "vars" not in data:
        raise ParseError("ring object needs a 'vars' field")
    nvars = data["vars"]
    if not isinstance(nvars, int) or nvars < 0:
        raise ParseError(f"bad variable count {nvars!r}")
    order = order_by_name(data.get("order", "grevlex"))
    relations = data.get("relations", [])
    if not isinstance(relations, list):
        raise ParseError("'relations' must be a list of polynomial strings")
    return Ring(nvars, relations, order)


def ideal_to_dict(ideal: Ideal) -> dict:
    return {
        "schema": 1,
        "ring": ring_to_dict(ideal.ring),
        "generators": [g.format(ideal.ring.order) for g in ideal.gens],
    }


def ideal_from_dict(data: dict) -> Ideal:
    if not isinstance(data, dict):
        raise ParseError("ideal JSON must be an object")
    if "ring" not in data or "generators" not in data:
        raise ParseError("ideal JSON needs 'ring' and 'generators'")
    ring = ring_from_dict(data["ring"])
    gens = data["generators"]
    if not isinstance(gens, list):
        raise ParseError("'generators' must be a list")
    return Ideal(ring, gens)


def load_ideal(path: str) -> Ideal:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON ({exc})") from None
    return ideal_from_dict(data)


def dump_ideal(ideal: Ideal, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(ideal_to_dict(ideal), fh, indent=2, sort_keys=True)
        fh.write("\n")
