"""Locally nilpotent derivations, exponential flows, and automorphism words.

A derivation is stored as one coefficient polynomial per ring variable,
``D = sum_i coeffs[i] * d/dx_i``.  Nilpotency is semi-decided: derivations
whose variable-dependency graph is acyclic (triangular in some variable
order) are certified structurally; everything else is iterated up to a bound.

Automorphism words follow the convention that the LAST step of a word acts
first on points, matching the product notation h_1 * ... * h_s applied to x.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    ArityMismatch,
    NotCertifiedNilpotent,
    NotInvariant,
    RingMismatch,
    SymbolicTimeError,
    ValueMismatch,
)
from .linalg import rank as matrix_rank
from .poly import Polynomial, Ring
from .polymaps import PolyMap, compose, jacobian_det

#: Default iteration cap for the nilpotency semi-decision.
DEFAULT_NILPOTENCY_BOUND = 64

#: Marker for symbolic flow time ("leave t as a formal variable").
SYMBOLIC = "t"


class Derivation:
    """A candidate LND: one image polynomial per ring variable."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: Ring, coeffs: Sequence[Polynomial]):
        coeffs = tuple(coeffs)
        if len(coeffs) != ring.arity:
            raise ArityMismatch(
                f"{len(coeffs)} coefficients for ring arity {ring.arity}"
            )
        for c in coeffs:
            if c.ring != ring:
                raise RingMismatch("derivation coefficients must live in its ring")
        self.ring = ring
        self.coeffs = coeffs

    @classmethod
    def from_dict(cls, ring: Ring, images: dict) -> "Derivation":
        """Build from a {variable name: polynomial} mapping; missing names map to 0."""
        coeffs = []
        for v in ring.variables:
            img = images.get(v)
            coeffs.append(img if img is not None else Polynomial.zero(ring))
        return cls(ring, coeffs)

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.coeffs)

    def __call__(self, f: Polynomial) -> Polynomial:
        return derive(self, f)

    def velocity(self, point: Sequence[Fraction]) -> tuple:
        """The tangent vector D(p): each coefficient evaluated at the point."""
        return tuple(c.evaluate(point) for c in self.coeffs)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Derivation)
            and self.ring == other.ring
            and self.coeffs == other.coeffs
        )

    def __repr__(self) -> str:
        body = ", ".join(
            f"{v} -> {c}" for v, c in zip(self.ring.variables, self.coeffs)
        )
        return f"Derivation({body})"


def derive(d: Derivation, f: Polynomial) -> Polynomial:
    """Apply the derivation once: sum_i coeffs[i] * df/dx_i."""
    if d.ring != f.ring:
        raise RingMismatch("derivation and polynomial rings differ")
    result = Polynomial.zero(d.ring)
    for coeff, var in zip(d.coeffs, d.ring.variables):
        if coeff.is_zero:
            continue
        partial = f.partial(var)
        if not partial.is_zero:
            result = result + coeff * partial
    return result


def in_kernel(d: Derivation, f: Polynomial) -> bool:
    return derive(d, f).is_zero


def replica(d: Derivation, f: Polynomial) -> Derivation:
    """The derivation f*D for an invariant f (raises NotInvariant otherwise)."""
    if not in_kernel(d, f):
        raise NotInvariant(f"{f} is not in the kernel of the derivation")
    return Derivation(d.ring, [f * c for c in d.coeffs])


@dataclass(frozen=True)
class NilpotencyCertificate:
    """Outcome of the nilpotency semi-decision.

    ``orders`` maps each variable to the smallest n with D^n(x) = 0 when the
    status is Nilpotent.  ExceededBound is *not* a proof of non-nilpotency.
    """

    status: str  # "Nilpotent" or "ExceededBound"
    orders: dict | None
    bound: int

    @property
    def is_nilpotent(self) -> bool:
        return self.status == "Nilpotent"


def _is_triangular(d: Derivation) -> bool:
    """True when the variable-dependency graph of D is acyclic.

    Variable x depends on y when y appears in D(x).  Acyclicity means the
    derivation is triangular in some variable order, which certifies local
    nilpotency without iteration.
    """
    deps = {
        v: c.variables_used() for v, c in zip(d.ring.variables, d.coeffs)
    }
    seen: dict = {}

    def has_cycle(v: str, stack: set) -> bool:
        state = seen.get(v)
        if state == "done":
            return False
        if v in stack:
            return True
        stack.add(v)
        for w in deps[v]:
            if has_cycle(w, stack):
                return True
        stack.discard(v)
        seen[v] = "done"
        return False

    return not any(has_cycle(v, set()) for v in d.ring.variables)


def certify_nilpotent(d: Derivation, bound: int = DEFAULT_NILPOTENCY_BOUND) -> NilpotencyCertificate:
    """Semi-decide local nilpotency by iterating D on each variable.

    Triangular derivations (acyclic dependency graph) are certified without a
    cap: iteration is then guaranteed to terminate.  Otherwise each variable
    is iterated at most ``bound`` times.
    """
    if bound < 1:
        raise ValueError("nilpotency bound must be >= 1")
    triangular = _is_triangular(d)
    orders: dict = {}
    for v in d.ring.variables:
        current = Polynomial.variable(d.ring, v)
        steps = 0
        while not current.is_zero:
            if not triangular and steps >= bound:
                return NilpotencyCertificate("ExceededBound", None, bound)
            current = derive(d, current)
            steps += 1
        orders[v] = steps
    return NilpotencyCertificate("Nilpotent", orders, bound)


class FlowStep:
    """One exponential flow exp(time * D), with a nilpotency certificate.

    ``time`` is an exact rational, or the marker :data:`SYMBOLIC` meaning
    "leave t as an extra formal variable" (the step then represents the whole
    one-parameter subgroup rather than a single element).
    """

    __slots__ = ("derivation", "time", "certificate")

    def __init__(self, derivation: Derivation, time, certificate: NilpotencyCertificate | None = None,
                 bound: int = DEFAULT_NILPOTENCY_BOUND):
        if certificate is None:
            certificate = certify_nilpotent(derivation, bound)
        if not certificate.is_nilpotent:
            raise NotCertifiedNilpotent(
                "flow admitted only for derivations certified nilpotent "
                f"(status {certificate.status} at bound {certificate.bound})"
            )
        self.derivation = derivation
        self.certificate = certificate
        if time == SYMBOLIC:
            self.time = SYMBOLIC
        else:
            self.time = Fraction(time)

    @property
    def is_symbolic(self) -> bool:
        return self.time == SYMBOLIC

    def __repr__(self) -> str:
        return f"FlowStep(time={self.time}, {self.derivation!r})"


class PolyAutomorphism:
    """A polynomial map together with its verified inverse."""

    __slots__ = ("forward", "inverse")

    def __init__(self, forward: PolyMap, inverse: PolyMap):
        if forward.ring != inverse.ring:
            raise RingMismatch("forward and inverse maps must share one ring")
        if not compose(forward, inverse).is_identity() or not compose(inverse, forward).is_identity():
            raise ValueMismatch("inverse check failed: maps do not compose to the identity")
        self.forward = forward
        self.inverse = inverse

    @property
    def ring(self) -> Ring:
        return self.forward.ring

    def apply(self, point: Sequence[Fraction]) -> tuple:
        return self.forward.apply(point)

    def inverted(self) -> "PolyAutomorphism":
        return PolyAutomorphism(self.inverse, self.forward)


def _exponential_images(d: Derivation, ring: Ring, time_poly: Polynomial,
                        lift=None) -> list:
    """Images x_i -> sum_j time^j D^j(x_i) / j! over ``ring``.

    ``lift`` maps polynomials from d.ring into ``ring`` (identity when the
    rings coincide).
    """
    if lift is None:
        lift = lambda p: p
    images = []
    for v in d.ring.variables:
        term = Polynomial.variable(d.ring, v)
        total = lift(term)
        j = 1
        factorial = 1
        power = Polynomial.constant(ring, 1)
        while True:
            term = derive(d, term)
            if term.is_zero:
                break
            factorial *= j
            power = power * time_poly
            total = total + lift(term) * power * Fraction(1, factorial)
            j += 1
        images.append(total)
    return images


def exp_flow(d: Derivation, time, certificate: NilpotencyCertificate | None = None,
             bound: int = DEFAULT_NILPOTENCY_BOUND):
    """Exponential of a certified-nilpotent derivation.

    Rational ``time`` returns a :class:`PolyAutomorphism` (inverse = flow at
    -time).  Symbolic time returns a :class:`PolyMap` over the ring extended
    by one fresh formal variable.
    """
    step = FlowStep(d, time, certificate, bound)
    return step_to_map(step)


def step_to_map(step: FlowStep):
    d = step.derivation
    if step.is_symbolic:
        t_name = d.ring.fresh_name("t")
        big = d.ring.extend(t_name)

        def lift(p: Polynomial) -> Polynomial:
            return Polynomial(big, {e + (0,): c for e, c in p.terms.items()})

        t_poly = Polynomial.variable(big, t_name)
        images = _exponential_images(d, big, t_poly, lift)
        images.append(t_poly)  # the formal time is carried along unchanged
        return PolyMap(big, images)
    t = step.time
    forward = PolyMap(d.ring, _exponential_images(
        d, d.ring, Polynomial.constant(d.ring, t)))
    inverse = PolyMap(d.ring, _exponential_images(
        d, d.ring, Polynomial.constant(d.ring, -t)))
    return PolyAutomorphism(forward, inverse)


def step_apply_point(step: FlowStep, point: Sequence[Fraction]) -> tuple:
    """Evaluate exp(t*D) at a point without building the full symbolic map."""
    if step.is_symbolic:
        raise SymbolicTimeError("cannot apply a symbolic-time step to a point")
    d = step.derivation
    if len(point) != d.ring.arity:
        raise ArityMismatch("point arity does not match ring")
    values = [Fraction(v) for v in point]
    t = step.time
    result = []
    for v in d.ring.variables:
        term = Polynomial.variable(d.ring, v)
        total = term.evaluate(values)
        j = 1
        factorial = 1
        tpow = Fraction(1)
        while True:
            term = derive(d, term)
            if term.is_zero:
                break
            factorial *= j
            tpow *= t
            total += term.evaluate(values) * tpow / factorial
            j += 1
        result.append(total)
    return tuple(result)


class AutWord:
    """An ordered list of flow steps; the empty word is the identity.

    Convention (documented, asserted in tests): the LAST step acts first on
    points, so ``word_apply([s1, s2], p) = s1(s2(p))``.
    """

    __slots__ = ("ring", "steps")

    def __init__(self, ring: Ring, steps: Iterable[FlowStep] = ()):
        steps = tuple(steps)
        symbolic = 0
        for s in steps:
            if s.derivation.ring != ring:
                raise RingMismatch("all steps of a word must share one ring")
            if s.is_symbolic:
                symbolic += 1
        if symbolic > 1:
            raise SymbolicTimeError(
                "at most one symbolic-time step per word (variable capture)"
            )
        self.ring = ring
        self.steps = steps

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def has_symbolic(self) -> bool:
        return any(s.is_symbolic for s in self.steps)

    def __repr__(self) -> str:
        return f"AutWord({len(self.steps)} steps over {self.ring.variables})"


def word_apply(w: AutWord, point: Sequence[Fraction]) -> tuple:
    """Apply the word to a point (last step first)."""
    p = tuple(Fraction(v) for v in point)
    for step in reversed(w.steps):
        p = step_apply_point(step, p)
    return p


def word_compose(w1: AutWord, w2: AutWord) -> AutWord:
    """Concatenation, so that applying the result = apply w2, then w1."""
    if w1.ring != w2.ring:
        raise RingMismatch("composed words must share one ring")
    return AutWord(w1.ring, w1.steps + w2.steps)


def word_inverse(w: AutWord) -> AutWord:
    """Reverse the step order and negate every time."""
    steps = []
    for step in reversed(w.steps):
        if step.is_symbolic:
            raise SymbolicTimeError("cannot invert a word with symbolic time")
        steps.append(FlowStep(step.derivation, -step.time, step.certificate))
    return AutWord(w.ring, steps)


def word_to_map(w: AutWord) -> PolyAutomorphism:
    """Fold the word into a single automorphism (rational times only)."""
    if w.has_symbolic:
        raise SymbolicTimeError("word_to_map demands rational times")
    forward = PolyMap.identity(w.ring)
    inverse = PolyMap.identity(w.ring)
    for step in w.steps:
        auto = step_to_map(step)
        forward = compose(forward, auto.forward)
        inverse = compose(auto.inverse, inverse)
    return PolyAutomorphism(forward, inverse)


def volume_check(a: PolyAutomorphism) -> bool:
    """True exactly when the Jacobian determinant of the forward map is 1."""
    return jacobian_det(a.forward) == Polynomial.constant(a.ring, 1)


def tangent_of_replica_flow(d: Derivation, f: Polynomial, point: Sequence[Fraction]) -> list:
    """Tangent map of exp(f*D) at a zero of the invariant f.

    Returns the matrix of w -> w + df_p(w) * D(p), i.e. the identity plus the
    outer product D(p) * grad f(p)^T, acting on column vectors.
    """
    if not in_kernel(d, f):
        raise NotInvariant("coefficient is not in the kernel of the derivation")
    values = [Fraction(v) for v in point]
    if f.evaluate(values) != 0:
        raise ValueMismatch("the invariant must vanish at the base point")
    velocity = d.velocity(values)
    gradient = [f.partial(v).evaluate(values) for v in d.ring.variables]
    n = d.ring.arity
    return [
        [Fraction(1 if i == j else 0) + velocity[i] * gradient[j] for j in range(n)]
        for i in range(n)
    ]


def flex_rank(derivations: Sequence[Derivation], point: Sequence[Fraction]) -> int:
    """Rank of the span of the velocity vectors D_i(p) over the rationals.

    Equals the ambient dimension exactly when p is a flexible point for the
    group generated by the given fields.
    """
    derivations = list(derivations)
    if not derivations:
        return 0
    ring = derivations[0].ring
    for d in derivations:
        if d.ring != ring:
            raise RingMismatch("flex_rank derivations must share one ring")
    if len(point) != ring.arity:
        raise ArityMismatch("point arity does not match ring")
    rows = [list(d.velocity(point)) for d in derivations]
    return matrix_rank(rows)


def conjugate_derivation(auto: PolyAutomorphism, d: Derivation) -> Derivation:
    """The pushforward of D under the automorphism g.

    The returned derivation D' satisfies exp(t*D') = g o exp(t*D) o g^{-1} as
    point maps: D'(x_i) = (D(x_i o g)) o g^{-1}.
    """
    if auto.ring != d.ring:
        raise RingMismatch("automorphism and derivation rings differ")
    coeffs = []
    for img in auto.forward.images:
        coeffs.append(derive(d, img).substitute(auto.inverse.images))
    return Derivation(d.ring, coeffs)
