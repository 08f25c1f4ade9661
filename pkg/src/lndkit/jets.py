"""Order-m jets of automorphism words at fixed points.

A jet is stored in coordinates translated so the base point sits at the
origin: images have zero constant term and no monomial of total degree
above the jet order.

Conventions fixed here (the underlying algebra does not force a choice):

* ``psi`` of an order-1 jet is the full linear part (so composition of
  1-jets multiplies linear parts); for order m >= 2 it is the degree-m part
  of (jet - identity), and composition adds.
* HomForm data is stored tangent-side with column-vector action: the linear
  part A acts as x -> A x.
* The contraction ``kappa`` is coordinate divergence of the form tuple.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (
    ArityMismatch,
    DeterminantNotOne,
    FrozenPointConflict,
    JetOrderError,
    NotFixedPoint,
    NotHomogeneous,
    SymbolicTimeError,
)
from .flows import (
    AutWord,
    Derivation,
    FlowStep,
    step_apply_point,
    step_to_map,
    word_apply,
    word_compose,
    word_inverse,
    word_to_map,
)
from .linalg import det, mat_mul, sl_factor_transvections
from .poly import Polynomial, Ring
from .polymaps import PolyMap


class Jet:
    """Order-m truncation of an automorphism at a fixed point."""

    __slots__ = ("ring", "base", "order", "images")

    def __init__(self, ring: Ring, base: Sequence[Fraction], order: int,
                 images: Sequence[Polynomial]):
        if order < 1:
            raise JetOrderError("jet order must be >= 1")
        base = tuple(Fraction(b) for b in base)
        if len(base) != ring.arity:
            raise ArityMismatch("base point arity does not match ring")
        images = tuple(images)
        if len(images) != ring.arity:
            raise ArityMismatch("one image per ring variable required")
        for img in images:
            if img.ring != ring:
                raise ArityMismatch("jet images must live in the jet ring")
            if img.coefficient((0,) * ring.arity) != 0:
                raise NotFixedPoint("jet images must have zero constant term")
            if img.total_degree() > order:
                raise JetOrderError("jet images must be truncated at the jet order")
        self.ring = ring
        self.base = base
        self.order = order
        self.images = images

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Jet)
            and self.ring == other.ring
            and self.base == other.base
            and self.order == other.order
            and self.images == other.images
        )

    def is_identity(self) -> bool:
        return all(
            img == Polynomial.variable(self.ring, v)
            for img, v in zip(self.images, self.ring.variables)
        )

    def identity_to_order(self, k: int) -> bool:
        """True when jet == identity modulo terms of degree > k."""
        for img, v in zip(self.images, self.ring.variables):
            difference = img - Polynomial.variable(self.ring, v)
            if not difference.truncate(k).is_zero:
                return False
        return True

    def linear_part(self) -> list:
        """The matrix A with A[i][j] = coefficient of x_j in image i."""
        n = self.ring.arity
        unit = [tuple(1 if k == j else 0 for k in range(n)) for j in range(n)]
        return [
            [self.images[i].coefficient(unit[j]) for j in range(n)]
            for i in range(n)
        ]

    def compose(self, other: "Jet") -> "Jet":
        """Jet of the composition (other acts first); orders must agree."""
        if self.ring != other.ring or self.base != other.base or self.order != other.order:
            raise JetOrderError("jets must share ring, base, and order to compose")
        images = [
            img.substitute(other.images).truncate(self.order)
            for img in self.images
        ]
        return Jet(self.ring, self.base, self.order, images)

    def __repr__(self) -> str:
        body = ", ".join(str(img) for img in self.images)
        return f"Jet(order={self.order}, base={self.base}, images=({body}))"


def jet_of_map(pmap: PolyMap, point: Sequence[Fraction], order: int) -> Jet:
    """Jet of a polynomial map fixing ``point``: translate, expand, truncate."""
    ring = pmap.ring
    point = tuple(Fraction(v) for v in point)
    if pmap.apply(point) != point:
        raise NotFixedPoint(f"map does not fix the point {point}")
    shifted = [
        Polynomial.variable(ring, v) + Polynomial.constant(ring, c)
        for v, c in zip(ring.variables, point)
    ]
    images = []
    for img, c in zip(pmap.images, point):
        translated = img.substitute(shifted) - Polynomial.constant(ring, c)
        images.append(translated.truncate(order))
    return Jet(ring, point, order, images)


def _taylor_at(pmap: PolyMap, q, order: int) -> tuple:
    """Expansion of the map around q: (image point, delta -> M(q+delta)-M(q))."""
    ring = pmap.ring
    image_point = pmap.apply(q)
    shifted = [
        Polynomial.variable(ring, v) + Polynomial.constant(ring, c)
        for v, c in zip(ring.variables, q)
    ]
    deltas = []
    for img, c in zip(pmap.images, image_point):
        expansion = img.substitute(shifted) - Polynomial.constant(ring, c)
        deltas.append(expansion.truncate(order))
    return image_point, deltas


def jet_of(word: AutWord, point: Sequence[Fraction], order: int) -> Jet:
    """Jet of an automorphism word at a point it fixes (rational times only).

    Computed step by step with truncation after every composition, so the
    cost is bounded by the jet order even when the fully expanded word would
    have enormous degree.  The word's last step acts first.
    """
    if word.has_symbolic:
        raise SymbolicTimeError("jets demand rational times")
    point = tuple(Fraction(v) for v in point)
    ring = word.ring
    current = point
    taylor = [Polynomial.variable(ring, v) for v in ring.variables]
    for step in reversed(word.steps):
        step_map = step_to_map(step).forward
        current, deltas = _taylor_at(step_map, current, order)
        taylor = [d.substitute(taylor).truncate(order) for d in deltas]
    if current != point:
        raise NotFixedPoint(f"word does not fix the point {point}")
    return Jet(ring, point, order, taylor)


class HomForm:
    """One homogeneous degree-m form per variable (an element of V* (x) S^m V)."""

    __slots__ = ("ring", "degree", "forms")

    def __init__(self, ring: Ring, degree: int, forms: Sequence[Polynomial]):
        if degree < 1:
            raise NotHomogeneous("form degree must be >= 1")
        forms = tuple(forms)
        if len(forms) != ring.arity:
            raise ArityMismatch("one form per ring variable required")
        for form in forms:
            if form.ring != ring:
                raise ArityMismatch("forms must live in the given ring")
            if not form.is_homogeneous(degree):
                raise NotHomogeneous(
                    f"form {form} is not homogeneous of degree {degree}"
                )
        self.ring = ring
        self.degree = degree
        self.forms = forms

    @property
    def is_zero(self) -> bool:
        return all(f.is_zero for f in self.forms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, HomForm)
            and self.ring == other.ring
            and self.degree == other.degree
            and self.forms == other.forms
        )

    def add(self, other: "HomForm") -> "HomForm":
        if self.ring != other.ring or self.degree != other.degree:
            raise NotHomogeneous("added forms must share ring and degree")
        return HomForm(
            self.ring, self.degree,
            [a + b for a, b in zip(self.forms, other.forms)],
        )

    def scale(self, factor: Fraction) -> "HomForm":
        return HomForm(self.ring, self.degree, [f * factor for f in self.forms])

    def matrix(self) -> list:
        """For degree 1: the linear-part matrix (column-vector action)."""
        if self.degree != 1:
            raise NotHomogeneous("matrix form only exists at degree 1")
        n = self.ring.arity
        unit = [tuple(1 if k == j else 0 for k in range(n)) for j in range(n)]
        return [
            [self.forms[i].coefficient(unit[j]) for j in range(n)]
            for i in range(n)
        ]


def psi(jet: Jet) -> HomForm:
    """Linearize a near-identity jet into a vector-valued m-form.

    Order 1: the full linear part as linear forms (composition multiplies).
    Order m >= 2: requires the jet to be the identity to order m-1 and
    returns the degree-m part of (jet - identity) (composition adds).
    """
    m = jet.order
    ring = jet.ring
    if m == 1:
        return HomForm(ring, 1, jet.images)
    if not jet.identity_to_order(m - 1):
        raise JetOrderError(
            f"psi at order {m} needs a jet that is the identity to order {m - 1}"
        )
    forms = [
        (img - Polynomial.variable(ring, v)).homogeneous_part(m)
        for img, v in zip(jet.images, ring.variables)
    ]
    return HomForm(ring, m, forms)


def psi_inverse(form: HomForm, base: Sequence[Fraction] | None = None) -> Jet:
    """Reconstruct the unique jet with the given psi data (psi is bijective)."""
    ring = form.ring
    if base is None:
        base = [Fraction(0)] * ring.arity
    if form.degree == 1:
        images = form.forms
    else:
        images = [
            Polynomial.variable(ring, v) + f
            for v, f in zip(ring.variables, form.forms)
        ]
    return Jet(ring, base, form.degree, images)


def kappa(form: HomForm) -> Polynomial:
    """The contraction of the form tuple: coordinate divergence.

    Homogeneous of degree m-1; a volume-preserving m-jet (m >= 2) is exactly
    one whose psi lies in the kernel of this map.
    """
    result = Polynomial.zero(form.ring)
    for f, v in zip(form.forms, form.ring.variables):
        result = result + f.partial(v)
    return result


def is_volume_jet(jet: Jet) -> bool:
    """Volume criterion: order 1 -> det(linear part) = 1; order >= 2 ->
    divergence of psi vanishes (requires identity to order m-1)."""
    if jet.order == 1:
        return det(jet.linear_part()) == 1
    return kappa(psi(jet)).is_zero


def _shear_step(ring: Ring, direction: int, coefficient: Polynomial) -> FlowStep:
    """Flow step of coefficient * d/dx_direction (coefficient x_dir-free)."""
    coeffs = [
        coefficient if i == direction else Polynomial.zero(ring)
        for i in range(ring.arity)
    ]
    return FlowStep(Derivation(ring, coeffs), Fraction(1))


def realize_linear_part(matrix: Sequence[Sequence[Fraction]], point: Sequence[Fraction],
                        frozen: Sequence[Sequence[Fraction]] = (),
                        freeze_order: int = 1) -> AutWord:
    """An automorphism word fixing ``point`` with prescribed 1-jet there.

    The matrix must lie in SL_n (determinant-one obstruction).  The word is a
    product of shear flows exp(f * d/dx_j), one per transvection factor of
    the matrix; each coefficient f vanishes at the base point, is free of
    x_j, and vanishes to order ``freeze_order``+1 at every frozen point, so
    the word has the identity ``freeze_order``-jet at the frozen points.

    A frozen point that differs from the base point in fewer than two
    coordinates cannot be separated by the x_j-free coefficients directly;
    such configurations are first moved to general position by a conjugating
    shear word fixing the base point.
    """
    a = [[Fraction(x) for x in row] for row in matrix]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ArityMismatch("linear part must be square")
    point = tuple(Fraction(v) for v in point)
    if len(point) != n:
        raise ArityMismatch("point arity does not match matrix size")
    frozen = [tuple(Fraction(v) for v in q) for q in frozen]
    for q in frozen:
        if len(q) != n:
            raise ArityMismatch("frozen point arity does not match matrix size")
        if q == point:
            raise FrozenPointConflict("base point coincides with a frozen point")
    if det(a) != 1:
        raise DeterminantNotOne(f"determinant is {det(a)}, expected 1")

    ring = Ring([f"x{i + 1}" for i in range(n)])
    conjugator = _general_position_word(ring, point, frozen)
    if conjugator is None:
        return _realize_direct(ring, a, point, frozen, freeze_order)

    moved = [word_apply(conjugator, q) for q in frozen]
    u = jet_of(conjugator, point, 1).linear_part()
    u_inv = jet_of(word_inverse(conjugator), point, 1).linear_part()
    conjugated = mat_mul(mat_mul(u, a), u_inv)
    core = _realize_direct(ring, conjugated, point, moved, freeze_order)
    word = word_compose(
        word_inverse(conjugator), word_compose(core, conjugator)
    )
    realized = jet_of(word, point, 1).linear_part()
    if realized != a:
        raise AssertionError(
            "internal error: realized 1-jet differs from the prescribed matrix"
        )
    return word


def _realize_direct(ring: Ring, a, point, frozen, freeze_order: int) -> AutWord:
    """Realization core; every frozen point differs from ``point`` in >= 2 coords."""
    steps = []
    for (j, mu, c) in sl_factor_transvections(a):
        # Transvection I + c*E[j, mu] realized by exp(g * d/dx_j) with
        # g = c * (x_mu - p_mu) * h^(M+1), h = 1 at point and 0 at frozen.
        x_mu = Polynomial.variable(ring, ring.variables[mu])
        g = (x_mu - Polynomial.constant(ring, point[mu])) * c
        damp = _freeze_bump(ring, j, point, frozen)
        g = g * damp ** (freeze_order + 1)
        steps.append(_shear_step(ring, j, g))
    word = AutWord(ring, steps)
    realized = jet_of(word, point, 1).linear_part()
    if realized != [list(row) for row in a]:
        raise AssertionError(
            "internal error: realized 1-jet differs from the prescribed matrix"
        )
    return word


def _general_position_word(ring: Ring, point, frozen) -> AutWord | None:
    """A shear word fixing ``point`` after which every frozen point differs
    from it in at least two coordinates; None when no move is needed."""

    def bad_index(q) -> int | None:
        diffs = [r for r in range(ring.arity) if q[r] != point[r]]
        return diffs[0] if len(diffs) == 1 else None

    current = list(frozen)
    steps: list = []
    guard = 0
    while True:
        bad = next(((q, bad_index(q)) for q in current if bad_index(q) is not None), None)
        if bad is None:
            break
        guard += 1
        if guard > len(frozen) + ring.arity + 4:
            raise AssertionError("general-position normalization did not terminate")
        q, r = bad
        j = (r + 1) % ring.arity
        x_r = Polynomial.variable(ring, ring.variables[r])
        shift = x_r - Polynomial.constant(ring, point[r])
        for c in range(1, len(frozen) + 2):
            step = _shear_step(ring, j, shift * c)
            moved = [step_apply_point(step, z) for z in current]
            before = sum(1 for z in current if bad_index(z) is not None)
            after = sum(1 for z in moved if bad_index(z) is not None)
            if after < before:
                current = moved
                steps.append(step)
                break
        else:
            raise AssertionError("no shear multiplier fixed the frozen configuration")
    if not steps:
        return None
    # Steps were applied first-to-last; in word convention the last acts first.
    return AutWord(ring, list(reversed(steps)))


def _freeze_bump(ring: Ring, avoid_var: int, point, frozen) -> Polynomial:
    """A polynomial free of x_avoid that is 1 at ``point`` and 0 at each frozen point."""
    bump = Polynomial.constant(ring, 1)
    for q in frozen:
        index = next(
            (r for r in range(ring.arity) if r != avoid_var and point[r] != q[r]),
            None,
        )
        if index is None:
            raise FrozenPointConflict(
                f"frozen point {tuple(q)} differs from the base point only in "
                f"the flow direction x{avoid_var + 1}; no invariant separates them"
            )
        x_r = Polynomial.variable(ring, ring.variables[index])
        factor = (x_r - Polynomial.constant(ring, q[index])) * (
            Fraction(1) / (point[index] - q[index])
        )
        bump = bump * factor
    return bump
