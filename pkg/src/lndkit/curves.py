"""Interpolation of finite point sets by orbits of additive-group actions.

The construction is fully explicit on affine n-space (n >= 2): a shear makes
the first coordinates pairwise distinct, coordinate shears interpolate the
remaining coordinates along x1, and the resulting word conjugates the
translation field d/dx1 into a field whose orbit is a polynomial curve
through every prescribed point.  Avoidance of a finite point set is checked
exactly and resolved by re-randomizing the separation shear.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from .errors import (
    ArityMismatch,
    DuplicatePoint,
    SearchBudgetExceeded,
    UnknownVariable,
)
from .flows import (
    AutWord,
    Derivation,
    FlowStep,
    PolyAutomorphism,
    conjugate_derivation,
    word_apply,
    word_compose,
    word_inverse,
    word_to_map,
)
from .poly import Polynomial, Ring


class PointSet:
    """Pairwise distinct rational points in an affine space of dimension >= 2."""

    __slots__ = ("ring", "points")

    def __init__(self, ring: Ring, points: Sequence[Sequence[Fraction]]):
        if ring.arity < 2:
            raise ArityMismatch("interpolation needs at least two variables")
        pts = tuple(tuple(Fraction(x) for x in p) for p in points)
        for p in pts:
            if len(p) != ring.arity:
                raise ArityMismatch("point arity does not match ring")
        if len(set(pts)) != len(pts):
            raise DuplicatePoint("interpolation points must be pairwise distinct")
        self.ring = ring
        self.points = pts

    def __len__(self) -> int:
        return len(self.points)


def shear(ring: Ring, var: str, coefficient: Polynomial) -> FlowStep:
    """Flow step of the shear field coefficient * d/d(var), at time 1.

    The coefficient must not involve the sheared variable, which makes the
    field triangular and hence structurally nilpotent.
    """
    index = ring.index(var)
    if coefficient.ring != ring:
        raise UnknownVariable("shear coefficient must live in the given ring")
    if var in coefficient.variables_used():
        raise UnknownVariable(f"shear coefficient must be free of {var!r}")
    coeffs = [
        coefficient if i == index else Polynomial.zero(ring)
        for i in range(ring.arity)
    ]
    return FlowStep(Derivation(ring, coeffs), Fraction(1))


def _separation_candidates(ring: Ring, rng: random.Random | None):
    """Shear coefficients Q(x2..xn) in deterministic order of complexity.

    Yields the zero polynomial first (no shear needed), then integer
    combinations of x_j^d for growing boxes and degrees; a seeded rng
    shuffles within each box for the avoidance retries.
    """
    tail = ring.variables[1:]
    yield Polynomial.zero(ring)
    for degree in (1, 2, 3):
        for radius in (1, 2, 3):
            box = list(range(-radius, radius + 1))
            combos = [c for c in product(box, repeat=len(tail)) if any(c)]
            if rng is not None:
                rng.shuffle(combos)
            for combo in combos:
                q = Polynomial.zero(ring)
                for coeff, name in zip(combo, tail):
                    if coeff:
                        q = q + Polynomial.variable(ring, name) ** degree * coeff
                yield q


def _first_coordinates_distinct(points) -> bool:
    firsts = [p[0] for p in points]
    return len(set(firsts)) == len(firsts)


def separate_first_coordinates(z: PointSet, rng: random.Random | None = None,
                               budget: int = 4000) -> AutWord:
    """A word (single shear of x1) after which first coordinates are distinct."""
    ring = z.ring
    tried = 0
    for q in _separation_candidates(ring, rng):
        tried += 1
        if tried > budget:
            break
        if q.is_zero:
            word = AutWord(ring, [])
        else:
            word = AutWord(ring, [shear(ring, ring.variables[0], q)])
        images = [word_apply(word, p) for p in z.points]
        if _first_coordinates_distinct(images):
            return word
    raise SearchBudgetExceeded(
        "no separating shear found (search family exhausted)"
    )


@dataclass
class ParamCurve:
    """A polynomial map from one parameter variable into affine n-space."""

    ring: Ring  # one-variable parameter ring
    images: tuple

    def apply(self, t) -> tuple:
        value = [Fraction(t)]
        return tuple(img.evaluate(value) for img in self.images)


@dataclass
class CurveCertificate:
    """An explicit additive-group orbit through prescribed points.

    ``word`` maps the x1-axis onto the curve, ``derivation`` is the
    conjugated translation field, ``times`` are the parameters at which the
    curve passes through the input points, and ``parameterization`` is the
    curve itself.
    """

    word: AutWord
    derivation: Derivation
    times: tuple
    parameterization: ParamCurve


def _lagrange_in_first_variable(ring: Ring, times, values) -> Polynomial:
    """The Lagrange interpolation polynomial in x1 with exact coefficients."""
    x1 = Polynomial.variable(ring, ring.variables[0])
    total = Polynomial.zero(ring)
    for i, (t_i, v_i) in enumerate(zip(times, values)):
        if v_i == 0:
            continue
        basis = Polynomial.constant(ring, v_i)
        for j, t_j in enumerate(times):
            if j == i:
                continue
            basis = basis * (x1 - Polynomial.constant(ring, t_j)) * (
                Fraction(1) / (t_i - t_j)
            )
        total = total + basis
    return total


def _interpolation_word(z: PointSet, separation: AutWord) -> tuple:
    """The word, its times, and the coordinate shears for a separation choice."""
    ring = z.ring
    moved = [word_apply(separation, p) for p in z.points]
    times = tuple(p[0] for p in moved)
    steps = []
    shears = []
    for j in range(1, ring.arity):
        values = [p[j] for p in moved]
        p_j = _lagrange_in_first_variable(ring, times, values)
        shears.append(p_j)
        if not p_j.is_zero:
            steps.append(shear(ring, ring.variables[j], p_j))
    word = word_compose(word_inverse(separation), AutWord(ring, steps))
    return word, times, shears


def ga_orbit_through(z: PointSet, avoid: PointSet | None = None,
                     seed: int = 0, retry_budget: int = 200) -> CurveCertificate:
    """An additive-group orbit (polynomial curve) through every point of z.

    When an avoidance set is given, the curve is re-randomized until it
    misses every avoid point; disjointness is decided exactly because the
    pre-curve (t, P_2(t), ..., P_n(t)) meets a point a' at most at t = a'_1.
    """
    ring = z.ring
    if avoid is not None:
        if avoid.ring != ring:
            raise ArityMismatch("avoid set must live in the same ring")
        overlap = set(avoid.points) & set(z.points)
        if overlap:
            raise DuplicatePoint("avoid set meets the interpolation set")

    rng = random.Random(seed)
    attempts = 0
    for q_candidate in _separation_candidates(ring, rng):
        attempts += 1
        if attempts > retry_budget:
            break
        if q_candidate.is_zero:
            separation = AutWord(ring, [])
        else:
            separation = AutWord(ring, [shear(ring, ring.variables[0], q_candidate)])
        moved = [word_apply(separation, p) for p in z.points]
        if not _first_coordinates_distinct(moved):
            continue
        word, times, shears = _interpolation_word(z, separation)
        if avoid is not None and _curve_hits_any(separation, shears, avoid):
            continue
        # defining property, checked exactly before certifying
        for t_i, p in zip(times, z.points):
            base = (t_i,) + (Fraction(0),) * (ring.arity - 1)
            if word_apply(word, base) != p:
                raise AssertionError("internal error: curve misses an input point")
        auto = word_to_map(word)
        translation = Derivation.from_dict(
            ring, {ring.variables[0]: Polynomial.constant(ring, 1)}
        )
        derivation = conjugate_derivation(auto, translation)
        parameterization = _parameterize(auto, ring)
        return CurveCertificate(word, derivation, times, parameterization)
    raise SearchBudgetExceeded(
        "avoidance retry budget exhausted", budget=retry_budget
    )


def _curve_hits_any(separation: AutWord, shears, avoid: PointSet) -> bool:
    """Exact hit test: the pre-curve passes (t, P_2(t), ...) so an avoid
    point a is on the curve iff its separated image a' satisfies
    P_j(a'_1) = a'_j for every j >= 2."""
    for a in avoid.points:
        moved = word_apply(separation, a)
        t_candidate = moved[0]
        hit = True
        for j, p_j in enumerate(shears, start=1):
            value = p_j.evaluate((t_candidate,) + (Fraction(0),) * (len(moved) - 1))
            if value != moved[j]:
                hit = False
                break
        if hit:
            return True
    return False


def _parameterize(auto: PolyAutomorphism, ring: Ring) -> ParamCurve:
    param_ring = Ring(["t"])
    t_poly = Polynomial.variable(param_ring, "t")
    zero = Polynomial.zero(param_ring)
    axis = [t_poly] + [zero] * (ring.arity - 1)
    images = tuple(img.substitute(axis) for img in auto.forward.images)
    return ParamCurve(param_ring, images)