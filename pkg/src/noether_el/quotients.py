"""Finite models of quotient rings R/K, with table-driven arithmetic.

A :class:`QuotientContext` enumerates every residue of a finite-index ideal
once, in the canonical mixed-radix order of the staircase, and represents
ring elements as integer indices into that list.  Addition, multiplication
and negation are table lookups, which keeps the matrix-group enumerations
built on top of this honest about where their time goes.

Everything downstream identifies elements by index; polynomials appear only
at the boundary (`reduce` / `lift`).
"""

from __future__ import annotations

from typing import Dict, FrozenSet, List, Sequence

from .caps import Caps, default_caps
from .errors import CapExceeded, NotInvertible, ValidationError
from .finiteness import quotient_structure
from .ideals import Ideal, Ring
from .poly import Polynomial


class QuotientContext:
    """R/K as an indexed list of canonical residues plus operation tables."""

    def __init__(self, modulus: Ideal, caps: Caps | None = None):
        caps = caps or default_caps()
        self.ring = modulus.ring
        self.modulus = modulus
        self.structure = quotient_structure(modulus, caps)
        self.size = self.structure.order
        if self.size > caps.max_quotient:
            raise CapExceeded(
                f"quotient has {self.size} elements, above the cap {caps.max_quotient}"
            )
        self.residues: List[Polynomial] = list(self.structure.iter_residues())
        self.index: Dict[Polynomial, int] = {
            p: i for i, p in enumerate(self.residues)
        }
        self.zero = self.index[Polynomial.zero(self.ring.nvars)]
        self.one = self.reduce(Polynomial.one(self.ring.nvars))
        n = self.size
        lifts = self.residues
        self.add_table = [
            [self.index[modulus.normal_form(lifts[i] + lifts[j])] for j in range(n)]
            for i in range(n)
        ]
        self.mul_table = [
            [self.index[modulus.normal_form(lifts[i] * lifts[j])] for j in range(n)]
            for i in range(n)
        ]
        self.neg_table = [
            self.index[modulus.normal_form(-lifts[i])] for i in range(n)
        ]
        self.units: FrozenSet[int] = frozenset(
            i for i in range(n) if self.one in self.mul_table[i]
        )
        self._inv = {}
        for i in self.units:
            self._inv[i] = self.mul_table[i].index(self.one)

    # -- constructors

    @classmethod
    def integers_mod(cls, m: int, caps: Caps | None = None) -> "QuotientContext":
        if m < 2:
            raise ValidationError("modulus must be at least 2")
        return cls(Ideal(Ring(0), [str(m)]), caps)

    # -- element plumbing

    def reduce(self, f) -> int:
        """Index of the canonical residue of a ring element."""
        nf = self.modulus.normal_form(self.ring.coerce(f))
        return self.index[nf]

    def lift(self, i: int) -> Polynomial:
        return self.residues[i]

    def describe(self, i: int) -> str:
        return self.residues[i].format(self.ring.order)

    def add(self, i: int, j: int) -> int:
        return self.add_table[i][j]

    def mul(self, i: int, j: int) -> int:
        return self.mul_table[i][j]

    def neg(self, i: int) -> int:
        return self.neg_table[i]

    def sub(self, i: int, j: int) -> int:
        return self.add_table[i][self.neg_table[j]]

    def inv(self, i: int) -> int:
        if i not in self._inv:
            raise NotInvertible(f"{self.describe(i)} is not a unit")
        return self._inv[i]

    def power(self, i: int, k: int) -> int:
        if k < 0:
            return self.power(self.inv(i), -k)
        out = self.one
        base = i
        while k:
            if k & 1:
                out = self.mul_table[out][base]
            base = self.mul_table[base][base]
            k >>= 1
        return out

    def element_order_add(self, i: int) -> int:
        """Additive order of residue i."""
        k, x = 1, i
        while x != self.zero:
            x = self.add_table[x][i]
            k += 1
        return k

    # -- subsets

    def additive_generators(self) -> List[int]:
        """Indices of the staircase monomial residues (they span additively)."""
        nvars = self.ring.nvars
        out = []
        for m in self.structure.monomials:
            out.append(self.index[Polynomial.term(nvars, m, 1)])
        return out

    def additive_closure(self, seeds: Sequence[int]) -> FrozenSet[int]:
        """Subgroup of (R/K, +) generated by the given residues.

        Repeatedly adding seeds reaches every integer combination because the
        group is finite (so -s is a positive multiple of s).
        """
        seen = {self.zero}
        frontier = [self.zero]
        while frontier:
            nxt = []
            for a in frontier:
                for s in seeds:
                    v = self.add_table[a][s]
                    if v not in seen:
                        seen.add(v)
                        nxt.append(v)
            frontier = nxt
        return frozenset(seen)

    def image_of_ideal(self, ideal: Ideal) -> FrozenSet[int]:
        """The subset of R/K covered by an ideal of the same ring."""
        if ideal.ring != self.ring:
            raise ValidationError("ideal lives in a different ring")
        seeds = []
        for g in ideal.gens:
            gi = self.reduce(g)
            for r in range(self.size):
                seeds.append(self.mul_table[gi][r])
        return self.additive_closure(sorted(set(seeds)))

    def units_order_dividing(self, d: int) -> List[int]:
        """Unit residues u with u^d = 1, sorted by index."""
        if d <= 0:
            raise ValidationError("the exponent must be positive")
        return sorted(u for u in self.units if self.power(u, d) == self.one)

    def __repr__(self):
        return f"QuotientContext({self.modulus!r}, size={self.size})"
