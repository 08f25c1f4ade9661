"""Polynomial kernel: arithmetic, Jacobians, Pfaffians, textual format."""

import random
from fractions import Fraction
from itertools import permutations

import pytest

from lndkit.errors import ArityMismatch, NotSkewSymmetric, TermBudgetExceeded
from lndkit.linalg import det as rational_det
from lndkit.poly import (
    Polynomial,
    Ring,
    format_polynomial,
    parse_polynomial,
    set_term_limit,
)
from lndkit.polymaps import (
    PolyMap,
    compose,
    grid_determinant,
    jacobian_det,
    pfaffian,
)

from conftest import random_fraction, random_polynomial


def poly(text, ring):
    return parse_polynomial(text, ring)


class TestEvaluate:
    def test_direct_substitution(self):
        ring = Ring(["x", "y"])
        assert poly("x^2 + y", ring).evaluate([2, 3]) == 7

    def test_zero_polynomial(self):
        ring = Ring(["x", "y"])
        assert Polynomial.zero(ring).evaluate([5, -1]) == 0

    def test_hand_substitution(self):
        ring = Ring(["X", "Y", "Z"])
        assert poly("Y^2 - 2*X*Z", ring).evaluate([1, 3, 2]) == 5  # 9 - 4

    def test_arity_mismatch(self):
        ring = Ring(["x", "y"])
        with pytest.raises(ArityMismatch):
            poly("x", ring).evaluate([1])

    def test_multiplicative(self, rng):
        ring = Ring(["x", "y", "z"])
        for _ in range(25):
            p = random_polynomial(rng, ring)
            q = random_polynomial(rng, ring)
            point = [random_fraction(rng) for _ in range(3)]
            assert (p * q).evaluate(point) == p.evaluate(point) * q.evaluate(point)


class TestPartial:
    def test_simple(self):
        ring = Ring(["x", "y", "z"])
        assert poly("x^2*y", ring).partial("x") == poly("2*x*y", ring)
        assert poly("x^2*y", ring).partial("z").is_zero

    def test_quadratic(self):
        ring = Ring(["X", "Y", "Z"])
        assert poly("Y^2 - 2*X*Z", ring).partial("Y") == poly("2*Y", ring)


class TestCompose:
    def test_identity_neutral(self, rng):
        ring = Ring(["x", "y"])
        ident = PolyMap.identity(ring)
        g = PolyMap(ring, [random_polynomial(rng, ring) for _ in range(2)])
        assert compose(ident, g) == g
        assert compose(g, ident) == g

    def test_shear_inverse(self):
        ring = Ring(["x", "y"])
        f = PolyMap(ring, [poly("x", ring), poly("y + x^2", ring)])
        g = PolyMap(ring, [poly("x", ring), poly("y - x^2", ring)])
        assert compose(f, g).is_identity()

    def test_double_shear(self):
        ring = Ring(["x", "y"])
        f = PolyMap(ring, [poly("x", ring), poly("y + x", ring)])
        assert compose(f, f) == PolyMap(ring, [poly("x", ring), poly("y + 2*x", ring)])

    def test_associative(self, rng):
        ring = Ring(["x", "y"])
        for _ in range(10):
            maps = [
                PolyMap(ring, [random_polynomial(rng, ring, 2, 2) for _ in range(2)])
                for _ in range(3)
            ]
            f, g, h = maps
            assert compose(compose(f, g), h) == compose(f, compose(g, h))


class TestJacobian:
    def test_identity(self):
        ring = Ring(["a", "b", "c"])
        assert jacobian_det(PolyMap.identity(ring)) == Polynomial.constant(ring, 1)

    def test_shear_is_volume_preserving(self):
        ring = Ring(["x", "y"])
        f = PolyMap(ring, [poly("x", ring), poly("y + x^3 - 2*x", ring)])
        assert jacobian_det(f) == Polynomial.constant(ring, 1)

    def test_diagonal_scaling(self):
        ring = Ring(["x", "y"])
        f = PolyMap(ring, [poly("2*x", ring), poly("y", ring)])
        assert jacobian_det(f) == Polynomial.constant(ring, 2)

    def test_chain_rule(self, rng):
        ring = Ring(["x", "y"])
        for _ in range(10):
            f = PolyMap(ring, [random_polynomial(rng, ring, 2, 2) for _ in range(2)])
            g = PolyMap(ring, [random_polynomial(rng, ring, 2, 2) for _ in range(2)])
            lhs = jacobian_det(compose(f, g))
            rhs = jacobian_det(f).substitute(g.images) * jacobian_det(g)
            assert lhs == rhs


def all_perfect_matchings(items):
    if not items:
        yield []
        return
    first = items[0]
    for pos in range(1, len(items)):
        partner = items[pos]
        rest = [x for x in items[1:] if x != partner]
        for matching in all_perfect_matchings(rest):
            yield [(first, partner)] + matching


def permutation_sign(sequence):
    inversions = sum(
        1
        for i in range(len(sequence))
        for j in range(i + 1, len(sequence))
        if sequence[i] > sequence[j]
    )
    return -1 if inversions % 2 else 1


def brute_force_pfaffian(grid):
    """Perfect-matching sum with explicit permutation signs: the
    independent oracle for the Pfaffian."""
    n = len(grid)
    if n % 2:
        return Fraction(0)
    total = Fraction(0)
    for matching in all_perfect_matchings(list(range(n))):
        flat = [index for pair in matching for index in pair]
        term = Fraction(permutation_sign(flat))
        for (i, j) in matching:
            term *= grid[i][j]
        total += term
    return total


class TestPfaffian:
    def test_two_by_two(self):
        ring = Ring(["a"])
        a = Polynomial.variable(ring, "a")
        z = Polynomial.zero(ring)
        assert pfaffian([[z, a], [-a, z]]) == a

    def test_odd_order_is_zero(self, rng):
        for _ in range(5):
            raw = [[Fraction(0)] * 3 for _ in range(3)]
            for i in range(3):
                for j in range(i + 1, 3):
                    raw[i][j] = random_fraction(rng)
                    raw[j][i] = -raw[i][j]
            assert pfaffian(raw) == 0

    def test_four_by_four_closed_form(self):
        ring = Ring(list("abcdef"))
        a, b, c, d, e, f = (Polynomial.variable(ring, v) for v in "abcdef")
        z = Polynomial.zero(ring)
        grid = [[z, a, b, c], [-a, z, d, e], [-b, -d, z, f], [-c, -e, -f, z]]
        assert pfaffian(grid) == a * f - b * e + c * d

    def test_square_is_determinant(self, rng):
        for n in (2, 4, 6):
            for _ in range(8):
                raw = [[Fraction(0)] * n for _ in range(n)]
                for i in range(n):
                    for j in range(i + 1, n):
                        raw[i][j] = random_fraction(rng)
                        raw[j][i] = -raw[i][j]
                pf = pfaffian(raw)
                assert pf * pf == rational_det(raw)

    def test_matches_brute_force(self, rng):
        for n in (2, 4):
            for _ in range(6):
                raw = [[Fraction(0)] * n for _ in range(n)]
                for i in range(n):
                    for j in range(i + 1, n):
                        raw[i][j] = random_fraction(rng)
                        raw[j][i] = -raw[i][j]
                assert pfaffian(raw) == brute_force_pfaffian(raw)

    def test_rejects_non_skew(self):
        with pytest.raises(NotSkewSymmetric):
            pfaffian([[Fraction(1), Fraction(2)], [Fraction(-2), Fraction(0)]])
        with pytest.raises(NotSkewSymmetric):
            pfaffian([[Fraction(0), Fraction(2)], [Fraction(2), Fraction(0)]])


class TestGridDeterminant:
    def test_against_rational_det(self, rng):
        for n in (2, 3, 4):
            for _ in range(6):
                grid = [[random_fraction(rng) for _ in range(n)] for _ in range(n)]
                assert grid_determinant(grid) == rational_det(grid)


class TestTextualFormat:
    def test_round_trip_canonical(self, rng):
        ring = Ring(["x", "y", "z"])
        for _ in range(30):
            p = random_polynomial(rng, ring, 3, 4)
            assert parse_polynomial(format_polynomial(p), ring) == p

    def test_output_is_stable(self, rng):
        ring = Ring(["x", "y"])
        p = random_polynomial(rng, ring, 3, 5)
        assert format_polynomial(p) == format_polynomial(p)

    def test_any_input_order(self):
        ring = Ring(["x", "y"])
        canonical = poly("x^2 + 2*x*y - 3", ring)
        for terms in permutations(["x^2", "2*y*x", "-3"]):
            text = " + ".join(terms).replace("+ -", "- ")
            assert parse_polynomial(text, ring) == canonical

    def test_graded_lex_order(self):
        ring = Ring(["x", "y"])
        p = poly("y + x + x*y + y^2 + 1", ring)
        # graded lex descending: degree 2 first, x-heavier first inside a degree
        assert format_polynomial(p) == "x*y + y^2 + x + y + 1"

    def test_rationals_as_fractions(self):
        ring = Ring(["x"])
        assert format_polynomial(poly("3/2*x - 1/3", ring)) == "3/2*x - 1/3"


class TestTermBudget:
    def test_cap_is_enforced(self):
        ring = Ring(["x", "y"])
        previous = set_term_limit(16)
        try:
            dense = poly("x + y + 1", ring)
            with pytest.raises(TermBudgetExceeded):
                _ = dense ** 6
        finally:
            set_term_limit(previous)
