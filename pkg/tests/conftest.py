"""Shared randomized generators (all deterministic via explicit seeds)."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from lndkit.flows import Derivation
from lndkit.matrixvars import (
    GENERIC,
    SKEW,
    SYMMETRIC,
    ElemGenerator,
    MatrixPoint,
    evaluate_invariant,
    invariant_basis,
)
from lndkit.poly import Polynomial, Ring
from lndkit.transport import ElemReplica, replica_apply


def random_fraction(rng, lo=-4, hi=4, den=(1, 2, 3)) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.choice(den))


def random_polynomial(rng, ring: Ring, max_degree=2, terms=3, allowed=None) -> Polynomial:
    """Random sparse polynomial, optionally restricted to a variable subset."""
    allowed = list(ring.variables) if allowed is None else list(allowed)
    result = Polynomial.zero(ring)
    for _ in range(rng.randint(1, terms)):
        exps = [0] * ring.arity
        for _ in range(rng.randint(0, max_degree)):
            if allowed:
                exps[ring.index(rng.choice(allowed))] += 1
        coeff = random_fraction(rng)
        if coeff:
            result = result + Polynomial.monomial(ring, exps, coeff)
    return result


def random_triangular_derivation(rng, ring: Ring, max_degree=2) -> Derivation:
    """Triangular: each image uses strictly earlier variables (always an LND)."""
    coeffs = []
    for i, _ in enumerate(ring.variables):
        earlier = list(ring.variables[:i])
        if not earlier:
            coeffs.append(Polynomial.constant(ring, rng.randint(-2, 2)))
        else:
            coeffs.append(random_polynomial(rng, ring, max_degree, 2, earlier))
    return Derivation(ring, coeffs)


def random_shear_derivation(rng, ring: Ring, max_degree=2) -> tuple:
    """A derivation moving a variable subset with coefficients in the fixed
    complement, together with one explicit kernel element."""
    n = ring.arity
    moved_count = rng.randint(1, n - 1)
    moved = rng.sample(range(n), moved_count)
    fixed = [ring.variables[i] for i in range(n) if i not in moved]
    coeffs = []
    for i in range(n):
        if i in moved:
            coeffs.append(random_polynomial(rng, ring, max_degree, 2, fixed))
        else:
            coeffs.append(Polynomial.zero(ring))
    invariant = random_polynomial(rng, ring, max_degree, 2, fixed)
    return Derivation(ring, coeffs), invariant


def random_matrix_point(rng, mode: str, n: int, m: int, lo=-3, hi=3) -> MatrixPoint:
    if mode == GENERIC:
        return MatrixPoint(
            mode, [[Fraction(rng.randint(lo, hi)) for _ in range(m)] for _ in range(n)]
        )
    raw = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            if mode == SYMMETRIC:
                raw[i][j] = raw[j][i] = Fraction(rng.randint(lo, hi))
            elif i < j:
                raw[i][j] = Fraction(rng.randint(lo, hi))
                raw[j][i] = -raw[i][j]
    return MatrixPoint(mode, raw)


def random_elem_generator(rng, mode: str, n: int, m: int) -> ElemGenerator:
    if mode == GENERIC:
        side = rng.choice(["row", "col"])
        bound = n if side == "row" else m
    else:
        side = "cong"
        bound = n
    k = rng.randrange(1, bound + 1)
    l = rng.randrange(1, bound + 1)
    while l == k:
        l = rng.randrange(1, bound + 1)
    return ElemGenerator(mode, n, m, side, k, l)


def bounded_replica_word_image(rng, mats, length, parameter_bound=6) -> list:
    """Apply a random admissible replica word, resampling any step whose
    elementary parameter would exceed the bound at some matrix (keeps
    round-trip instances at sane magnitudes)."""
    mode, n, m = mats[0].shape()
    steps = 0
    guard = 0
    while steps < length and guard < 120:
        guard += 1
        g = random_elem_generator(rng, mode, n, m)
        basis = invariant_basis(g)
        ref = rng.choice(mats)
        candidates = [h for h in basis if evaluate_invariant(h, ref) != 0]
        if not candidates:
            continue
        h = rng.choice(candidates)
        h = h * (Fraction(1) / evaluate_invariant(h, ref))
        t = Fraction(rng.choice([1, -1, 2, -2]), rng.choice([1, 2]))
        step = ElemReplica(g, h, t)
        parameters = [t * evaluate_invariant(h, b) for b in mats]
        if any(abs(p) > parameter_bound for p in parameters):
            continue
        mats = [replica_apply(step, b) for b in mats]
        steps += 1
    return mats


@pytest.fixture
def rng():
    return random.Random(20260810)
