"""Exact sparse multivariate polynomial arithmetic over the rationals.

A polynomial is a dictionary mapping exponent tuples to nonzero ``Fraction``
coefficients.  One exponent tuple has one entry per ring variable, so the
representation is canonical: two polynomials over the same ring are equal
exactly when their term dictionaries are equal.

The canonical term order (used for all textual output) is *graded
lexicographic*: higher total degree first, ties broken lexicographically on
the exponent vector with earlier variables weighing more.

A configurable cap on the number of stored terms guards against coefficient
explosion in iterated flows; exceeding it raises :class:`TermBudgetExceeded`
rather than truncating silently.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import (
    ArityMismatch,
    ParseError,
    RingMismatch,
    TermBudgetExceeded,
    UnknownVariable,
)

#: Default cap on the number of stored terms per polynomial.
DEFAULT_TERM_LIMIT = 200_000

_term_limit = DEFAULT_TERM_LIMIT


def set_term_limit(limit: int) -> int:
    """Set the global term-count cap, returning the previous value."""
    global _term_limit
    previous = _term_limit
    _term_limit = int(limit)
    return previous


def get_term_limit() -> int:
    return _term_limit


_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z_0-9]*$")


class Ring:
    """An ordered list of distinct variable names, fixed for its lifetime.

    Rings compare (and hash) by their variable tuple, so two independently
    constructed rings over the same names are interchangeable.
    """

    __slots__ = ("variables", "_index")

    def __init__(self, variables: Sequence[str]):
        names = tuple(variables)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names: {names}")
        for name in names:
            if not _NAME_RE.match(name):
                raise ValueError(f"invalid variable name: {name!r}")
        self.variables = names
        self._index = {name: i for i, name in enumerate(names)}

    @property
    def arity(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariable(f"variable {name!r} not in ring {self.variables}") from None

    def extend(self, name: str) -> "Ring":
        """A new ring with one extra variable appended."""
        if name in self._index:
            raise ValueError(f"variable {name!r} already in ring")
        return Ring(self.variables + (name,))

    def fresh_name(self, base: str = "t") -> str:
        """A variable name based on ``base`` that does not collide with the ring."""
        if base not in self._index:
            return base
        i = 1
        while f"{base}{i}" in self._index:
            i += 1
        return f"{base}{i}"

    def __eq__(self, other) -> bool:
        return isinstance(other, Ring) and self.variables == other.variables

    def __hash__(self) -> int:
        return hash(self.variables)

    def __repr__(self) -> str:
        return f"Ring({list(self.variables)})"


def grlex_key(exponents: tuple) -> tuple:
    """Sort key realizing graded lexicographic order (ascending)."""
    return (sum(exponents), exponents)


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot coerce {type(value).__name__} to a rational")


class Polynomial:
    """Immutable multivariate polynomial with exact rational coefficients."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: Mapping[tuple, Fraction], *, _clean: bool = False):
        self.ring = ring
        if _clean:
            self.terms = dict(terms)
        else:
            clean = {}
            arity = ring.arity
            for exps, coeff in terms.items():
                coeff = _as_fraction(coeff)
                if coeff == 0:
                    continue
                exps = tuple(exps)
                if len(exps) != arity:
                    raise ArityMismatch(
                        f"exponent vector {exps} has length {len(exps)}, ring arity is {arity}"
                    )
                clean[exps] = coeff
            self.terms = clean
        if len(self.terms) > _term_limit:
            raise TermBudgetExceeded(
                f"polynomial has {len(self.terms)} terms, cap is {_term_limit}"
            )

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, ring: Ring) -> "Polynomial":
        return cls(ring, {}, _clean=True)

    @classmethod
    def constant(cls, ring: Ring, value) -> "Polynomial":
        value = _as_fraction(value)
        if value == 0:
            return cls.zero(ring)
        return cls(ring, {(0,) * ring.arity: value}, _clean=True)

    @classmethod
    def variable(cls, ring: Ring, name: str) -> "Polynomial":
        i = ring.index(name)
        exps = tuple(1 if j == i else 0 for j in range(ring.arity))
        return cls(ring, {exps: Fraction(1)}, _clean=True)

    @classmethod
    def monomial(cls, ring: Ring, exponents: Sequence[int], coeff=1) -> "Polynomial":
        return cls(ring, {tuple(exponents): _as_fraction(coeff)})

    # -- basic queries ------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Fraction:
        """The value of a constant polynomial (raises if non-constant)."""
        if self.is_zero:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def coefficient(self, exponents: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exponents), Fraction(0))

    def variables_used(self) -> set:
        used = set()
        for exps in self.terms:
            for i, e in enumerate(exps):
                if e:
                    used.add(self.ring.variables[i])
        return used

    def _check_ring(self, other: "Polynomial") -> None:
        if self.ring != other.ring:
            raise RingMismatch(
                f"rings differ: {self.ring.variables} vs {other.ring.variables}"
            )

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.ring, other)
        self._check_ring(other)
        terms = dict(self.terms)
        for exps, coeff in other.terms.items():
            new = terms.get(exps, 0) + coeff
            if new:
                terms[exps] = new
            else:
                terms.pop(exps, None)
        return Polynomial(self.ring, terms, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(
            self.ring, {e: -c for e, c in self.terms.items()}, _clean=True
        )

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.ring, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            coeff = _as_fraction(other)
            if coeff == 0:
                return Polynomial.zero(self.ring)
            return Polynomial(
                self.ring, {e: c * coeff for e, c in self.terms.items()}, _clean=True
            )
        self._check_ring(other)
        product: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                new = product.get(exps, 0) + c1 * c2
                if new:
                    product[exps] = new
                else:
                    product.pop(exps, None)
        return Polynomial(self.ring, product, _clean=True)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        coeff = _as_fraction(scalar)
        if coeff == 0:
            raise ZeroDivisionError("division of polynomial by zero")
        return self * (Fraction(1) / coeff)

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result = Polynomial.constant(self.ring, 1)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(self.ring, other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ring, frozenset(self.terms.items())))

    # -- calculus and substitution -------------------------------------------

    def evaluate(self, point: Sequence) -> Fraction:
        """Exact value at a rational point (length must match ring arity)."""
        if len(point) != self.ring.arity:
            raise ArityMismatch(
                f"point has length {len(point)}, ring arity is {self.ring.arity}"
            )
        values = [_as_fraction(v) for v in point]
        total = Fraction(0)
        for exps, coeff in self.terms.items():
            term = coeff
            for v, e in zip(values, exps):
                if e:
                    term *= v ** e
            total += term
        return total

    def partial(self, var: str) -> "Polynomial":
        """Formal partial derivative with respect to a ring variable."""
        i = self.ring.index(var)
        terms: dict = {}
        for exps, coeff in self.terms.items():
            e = exps[i]
            if e == 0:
                continue
            new_exps = exps[:i] + (e - 1,) + exps[i + 1 :]
            terms[new_exps] = terms.get(new_exps, 0) + coeff * e
        return Polynomial(self.ring, terms)

    def substitute(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute one polynomial per ring variable.

        The images may live in a different ring; the result lives in the
        images' ring.  Powers of each image are cached, so repeated exponents
        cost one multiplication each.
        """
        if len(images) != self.ring.arity:
            raise ArityMismatch(
                f"{len(images)} images for ring arity {self.ring.arity}"
            )
        if not images:
            raise ArityMismatch("substitution needs at least one variable")
        target = images[0].ring
        for img in images:
            if img.ring != target:
                raise RingMismatch("substitution images must share one ring")
        powers: list[list[Polynomial]] = [[Polynomial.constant(target, 1)] for _ in images]
        result = Polynomial.zero(target)
        for exps, coeff in self.terms.items():
            term = Polynomial.constant(target, coeff)
            for i, e in enumerate(exps):
                if not e:
                    continue
                cache = powers[i]
                while len(cache) <= e:
                    cache.append(cache[-1] * images[i])
                term = term * cache[e]
            result = result + term
        return result

    def truncate(self, max_degree: int) -> "Polynomial":
        """Drop every term of total degree greater than ``max_degree``."""
        return Polynomial(
            self.ring,
            {e: c for e, c in self.terms.items() if sum(e) <= max_degree},
            _clean=True,
        )

    def homogeneous_part(self, degree: int) -> "Polynomial":
        return Polynomial(
            self.ring,
            {e: c for e, c in self.terms.items() if sum(e) == degree},
            _clean=True,
        )

    def is_homogeneous(self, degree: int) -> bool:
        return all(sum(e) == degree for e in self.terms)

    # -- textual form ----------------------------------------------------------

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial({format_polynomial(self)!r})"


def format_rational(value: Fraction) -> str:
    value = _as_fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_polynomial(p: Polynomial) -> str:
    """Canonical text: graded-lex descending, ``coeff*x^e*y^f`` terms."""
    if p.is_zero:
        return "0"
    parts = []
    for exps in sorted(p.terms, key=grlex_key, reverse=True):
        coeff = p.terms[exps]
        factors = []
        for name, e in zip(p.ring.variables, exps):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        magnitude = abs(coeff)
        if not factors:
            body = format_rational(magnitude)
        elif magnitude == 1:
            body = "*".join(factors)
        else:
            body = format_rational(magnitude) + "*" + "*".join(factors)
        if not parts:
            parts.append(body if coeff > 0 else "-" + body)
        else:
            parts.append((" + " if coeff > 0 else " - ") + body)
    return "".join(parts)


_FACTOR_RE = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)(?:\^(\d+))?$")


def parse_polynomial(text: str, ring: Ring) -> Polynomial:
    """Parse the textual polynomial format (any term order accepted).

    Grammar per term: ``[rational][*]factor[*factor...]`` with factors
    ``name`` or ``name^k``; terms joined by ``+``/``-``.  ``**`` is accepted
    as a synonym for ``^``.
    """
    cleaned = text.replace("**", "^").strip()
    if not cleaned:
        raise ParseError("empty polynomial text")
    # Split into signed terms at top level (no parentheses in the grammar).
    pieces: list[tuple[int, str]] = []
    sign, buf = 1, []
    i = 0
    first = True
    while i < len(cleaned):
        ch = cleaned[i]
        if ch in "+-" and (first or buf):
            if buf and "".join(buf).strip():
                pieces.append((sign, "".join(buf).strip()))
                buf = []
                sign = 1
            if ch == "-":
                sign = -sign
            first = False
            i += 1
            continue
        if ch in "+-" and not buf:
            if ch == "-":
                sign = -sign
            i += 1
            continue
        buf.append(ch)
        first = False
        i += 1
    if "".join(buf).strip():
        pieces.append((sign, "".join(buf).strip()))
    if not pieces:
        raise ParseError(f"cannot parse polynomial: {text!r}")

    terms: dict = {}
    for sign, term in pieces:
        coeff = Fraction(sign)
        exps = [0] * ring.arity
        for factor in (f.strip() for f in term.split("*")):
            if not factor:
                raise ParseError(f"empty factor in term {term!r}")
            m = _FACTOR_RE.match(factor)
            if m and m.group(1) in ring.variables:
                exps[ring.index(m.group(1))] += int(m.group(2) or 1)
                continue
            try:
                coeff *= Fraction(factor)
            except ValueError:
                raise ParseError(
                    f"unknown factor {factor!r} (not a ring variable or rational)"
                ) from None
        key = tuple(exps)
        terms[key] = terms.get(key, 0) + coeff
    return Polynomial(ring, terms)
