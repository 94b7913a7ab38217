"""Multivariate polynomials over the integers, with explicit term orders.

A polynomial in ``Z[x1, ..., xk]`` is stored as a dict mapping exponent
tuples of length ``k`` to nonzero integer coefficients.  Instances are
treated as immutable: all arithmetic builds new dicts.  Term orders are
separate objects so the same polynomial can be viewed under grevlex, lex,
or a block (elimination) order without copying.

The text format is the one used throughout the JSON interfaces: integer
coefficients, variables ``x1 .. xk`` (plain ``x`` is accepted and printed
when there is a single variable), ``*`` for products and ``^`` for powers,
e.g. ``2*x1^2*x2 - 3``.
"""

from __future__ import annotations

from typing import Dict, Iterator, Tuple

from .errors import InexactDivision, ParseError

Expo = Tuple[int, ...]


# ---------------------------------------------------------------------------
# exponent-tuple helpers


def expo_mul(a: Expo, b: Expo) -> Expo:
    return tuple(x + y for x, y in zip(a, b))


def expo_divides(a: Expo, b: Expo) -> bool:
    """True when the monomial with exponents `a` divides the one with `b`."""
    return all(x <= y for x, y in zip(a, b))


def expo_div(a: Expo, b: Expo) -> Expo:
    """Exponents of x^a / x^b; caller must ensure divisibility."""
    return tuple(x - y for x, y in zip(a, b))


def expo_lcm(a: Expo, b: Expo) -> Expo:
    return tuple(max(x, y) for x, y in zip(a, b))


def expo_degree(a: Expo) -> int:
    return sum(a)


# ---------------------------------------------------------------------------
# term orders


class TermOrder:
    """A monomial order given by a sort key on exponent tuples.

    Keys compare ascending: ``order.key(a) < order.key(b)`` iff the monomial
    ``x^a`` is smaller than ``x^b``.  All orders here are global (the constant
    monomial is minimal), which the reduction loops rely on.
    """

    __slots__ = ("name", "key")

    def __init__(self, name: str, key):
        self.name = name
        self.key = key

    def __repr__(self):
        return f"TermOrder({self.name!r})"

    def __eq__(self, other):
        return isinstance(other, TermOrder) and self.name == other.name

    def __hash__(self):
        return hash(self.name)

    def greater(self, a: Expo, b: Expo) -> bool:
        return self.key(a) > self.key(b)


def _grevlex_key(a: Expo):
    # degree first, ties broken by *smallest* exponent in the *last* variable
    # winning, i.e. compare reversed exponents negated.
    return (sum(a),) + tuple(-e for e in reversed(a))


def _lex_key(a: Expo):
    return a


GREVLEX = TermOrder("grevlex", _grevlex_key)
LEX = TermOrder("lex", _lex_key)


def block_order(front: int) -> TermOrder:
    """Elimination order: grevlex on the first `front` variables dominates,
    ties broken by grevlex on the rest.  Monomials free of the front block
    are exactly those minimal in the first component."""

    def key(a: Expo):
        return (_grevlex_key(a[:front]), _grevlex_key(a[front:]))

    return TermOrder(f"block{front}", key)


_ORDERS = {"grevlex": GREVLEX, "lex": LEX}


def order_by_name(name: str) -> TermOrder:
    if name in _ORDERS:
        return _ORDERS[name]
    if name.startswith("block"):
        try:
            return block_order(int(name[5:]))
        except ValueError:
            pass
    raise ParseError(f"unknown term order {name!r}")


# ---------------------------------------------------------------------------
# polynomials


class Polynomial:
    """An element of Z[x1..xk].

    >>> p = Polynomial.parse("2*x1^2*x2 - 3", 2)
    >>> p.format()
    '2*x1^2*x2 - 3'
    >>> (p * p).format()
    '4*x1^4*x2^2 - 12*x1^2*x2 + 9'
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Dict[Expo, int]):
        self.nvars = nvars
        self.terms = {e: c for e, c in terms.items() if c}

    # -- constructors

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls(nvars, {})

    @classmethod
    def one(cls, nvars: int) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: 1})

    @classmethod
    def constant(cls, nvars: int, c: int) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "Polynomial":
        """The variable x_{i+1} (0-based index)."""
        if not 0 <= i < nvars:
            raise ParseError(f"variable index {i} out of range for {nvars} variables")
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def term(cls, nvars: int, expo: Expo, coeff: int) -> "Polynomial":
        return cls(nvars, {tuple(expo): coeff})

    # -- predicates and views

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or set(self.terms) == {(0,) * self.nvars}

    def constant_coefficient(self) -> int:
        return self.terms.get((0,) * self.nvars, 0)

    def total_degree(self) -> int:
        """Degree of the zero polynomial is -1 by convention."""
        if not self.terms:
            return -1
        return max(expo_degree(e) for e in self.terms)

    def sorted_terms(self, order: TermOrder = GREVLEX):
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def leading_term(self, order: TermOrder = GREVLEX) -> Tuple[Expo, int]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=order.key)
        return e, self.terms[e]

    def content(self) -> int:
        """Gcd of the coefficients (0 for the zero polynomial)."""
        from math import gcd

        g = 0
        for c in self.terms.values():
            g = gcd(g, c)
        return g

    # -- arithmetic

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, 0) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return Polynomial(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "Polynomial":
        other = self._coerce(other)
        terms: Dict[Expo, int] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = expo_mul(ea, eb)
                s = terms.get(e, 0) + ca * cb
                if s:
                    terms[e] = s
                else:
                    del terms[e]
        return Polynomial(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Polynomial.one(self.nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError("mixed variable counts")
            return other
        if isinstance(other, int):
            return Polynomial.constant(self.nvars, other)
        return NotImplemented

    # -- comparisons

    def __eq__(self, other):
        if isinstance(other, int):
            return self.is_constant() and self.constant_coefficient() == other
        return (
            isinstance(other, Polynomial)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"<{self.format()}>"

    # -- text format

    def format(self, order: TermOrder = GREVLEX) -> str:
        if not self.terms:
            return "0"
        short = self.nvars == 1
        pieces = []
        for e, c in self.sorted_terms(order):
            factors = []
            for i, p in enumerate(e):
                if p == 0:
                    continue
                name = "x" if short else f"x{i + 1}"
                factors.append(name if p == 1 else f"{name}^{p}")
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            pieces.append(("-" if c < 0 else "+", body))
        sign, body = pieces[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    @classmethod
    def parse(cls, text: str, nvars: int) -> "Polynomial":
        """Parse the textual format; inverse of :meth:`format`.

        >>> Polynomial.parse("x^2 - x", 1).terms
        {(2,): 1, (1,): -1}
        """
        tokens = _tokenize(text)
        if not tokens:
            raise ParseError("empty polynomial")
        terms: Dict[Expo, int] = {}
        pos = 0
        first = True
        while pos < len(tokens):
            sign = 1
            # optional chain of leading signs (first term) or required +/- joiner
            saw_sign = False
            while pos < len(tokens) and tokens[pos] in ("+", "-"):
                if tokens[pos] == "-":
                    sign = -sign
                saw_sign = True
                pos += 1
            if not first and not saw_sign:
                raise ParseError(f"expected + or - in {text!r}")
            coeff = sign
            expo = [0] * nvars
            expect_factor = True
            saw_factor = False
            while pos < len(tokens):
                tok = tokens[pos]
                if tok in ("+", "-"):
                    break
                if tok == "*":
                    if expect_factor:
                        raise ParseError(f"misplaced '*' in {text!r}")
                    expect_factor = True
                    pos += 1
                    continue
                if not expect_factor:
                    raise ParseError(f"missing '*' before {tok!r} in {text!r}")
                if tok.isdigit():
                    coeff *= int(tok)
                    pos += 1
                else:
                    idx = _var_index(tok, nvars, text)
                    power = 1
                    pos += 1
                    if pos < len(tokens) and tokens[pos] == "^":
                        pos += 1
                        if pos >= len(tokens) or not tokens[pos].isdigit():
                            raise ParseError(f"'^' needs an integer exponent in {text!r}")
                        power = int(tokens[pos])
                        pos += 1
                    expo[idx] += power
                expect_factor = False
                saw_factor = True
            if not saw_factor:
                raise ParseError(f"dangling sign in {text!r}")
            e = tuple(expo)
            s = terms.get(e, 0) + coeff
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
            first = False
        return cls(nvars, terms)


def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "+-*^":
            tokens.append(ch)
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(text[i:j])
            i = j
        elif ch == "x":
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(text[i:j])
            i = j
        else:
            raise ParseError(f"unexpected character {ch!r} in {text!r}")
    return tokens


def _var_index(tok: str, nvars: int, text: str) -> int:
    if not tok.startswith("x"):
        raise ParseError(f"expected a factor, got {tok!r} in {text!r}")
    if tok == "x":
        if nvars != 1:
            raise ParseError(f"plain 'x' is only valid with one variable ({text!r})")
        return 0
    idx = int(tok[1:]) - 1
    if not 0 <= idx < nvars:
        raise ParseError(f"variable {tok!r} out of range for {nvars} variables")
    return idx


def divexact(f: Polynomial, g: Polynomial, order: TermOrder = GREVLEX) -> Polynomial:
    """Quotient f/g when it is exact; raises InexactDivision otherwise."""
    if g.is_zero():
        raise InexactDivision("division by the zero polynomial")
    quotient = Polynomial.zero(f.nvars)
    rem = f
    ge, gc = g.leading_term(order)
    while not rem.is_zero():
        re, rc = rem.leading_term(order)
        if not expo_divides(ge, re) or rc % gc:
            raise InexactDivision(f"{g.format()} does not divide {f.format()}")
        t = Polynomial.term(f.nvars, expo_div(re, ge), rc // gc)
        quotient = quotient + t
        rem = rem - t * g
    return quotient


def iter_monomials(nvars: int, max_degree: int) -> Iterator[Expo]:
    """All exponent tuples of total degree <= max_degree, grevlex-ascending."""
    if nvars == 0:
        yield ()
        return
    out = []

    def rec(prefix, remaining, budget):
        if remaining == 1:
            for d in range(budget + 1):
                out.append(prefix + (d,))
            return
        for d in range(budget + 1):
            rec(prefix + (d,), remaining - 1, budget - d)

    rec((), nvars, max_degree)
    out.sort(key=_grevlex_key)
    yield from out
