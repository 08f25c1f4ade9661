"""Exact rational quadratic form helpers for the symmetric transport planner.

Wraps the classical Legendre-equation machinery (through sympy's exact
Diophantine solver) to answer two questions about diagonal forms:

* is  a x^2 + b y^2 + c z^2 = 0  rationally solvable, and with what witness;
* which rational vector represents a prescribed value in a binary form.

sympy is imported lazily so that plain engine use never pays its startup.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Sequence


def _as_integer_coeffs(coeffs: Sequence[Fraction]) -> list:
    """Scale the equation by the lcm of denominators (same solution set)."""
    lcm = 1
    for c in coeffs:
        c = Fraction(c)
        lcm = lcm * c.denominator // _gcd(lcm, c.denominator)
    return [int(Fraction(c) * lcm) for c in coeffs]


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


_SMALL_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                 59, 61, 67, 71, 73, 79, 83, 89, 97]

#: Coefficients above this bit length are not handed to the exact solver
#: (their factorization may stall); callers fall back to bounded searches.
MAX_COEFF_BITS = 128

#: Wall-clock budget per exact solve when an interval timer is available.
SOLVE_SECONDS = 5.0


def _strip_small_squares(value: int) -> tuple:
    """value = reduced * scale^2 with scale built from small primes."""
    scale = 1
    for p in _SMALL_PRIMES:
        square = p * p
        while value % square == 0:
            value //= square
            scale *= p
    return value, scale


@lru_cache(maxsize=4096)
def _ternary_isotropic_int(ia: int, ib: int, ic: int):
    from sympy.abc import x, y, z
    from sympy.solvers.diophantine.diophantine import diop_ternary_quadratic

    sol = diop_ternary_quadratic(ia * x**2 + ib * y**2 + ic * z**2)
    if sol is None or any(s is None for s in sol) or all(s == 0 for s in sol):
        return None
    return tuple(int(s) for s in sol)


_timed_out: set = set()


def _solve_bounded(reduced: tuple):
    """Exact solve with a wall-clock guard.

    In the main thread an interval timer bounds each attempt; elsewhere (or
    for repeat offenders) oversized coefficients are declined instead.
    """
    if reduced in _timed_out:
        return None
    small = all(abs(v).bit_length() <= MAX_COEFF_BITS for v in reduced)
    import signal
    import threading

    if small:
        return _ternary_isotropic_int(*reduced)
    if threading.current_thread() is not threading.main_thread():
        return None
    if any(abs(v).bit_length() > 8 * MAX_COEFF_BITS for v in reduced):
        return None

    def _handler(signum, frame):
        raise TimeoutError

    previous = signal.signal(signal.SIGALRM, _handler)
    signal.setitimer(signal.ITIMER_REAL, SOLVE_SECONDS)
    try:
        return _ternary_isotropic_int(*reduced)
    except TimeoutError:
        _timed_out.add(reduced)
        return None
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, previous)


def ternary_isotropic(a, b, c):
    """A nonzero rational solution of a x^2 + b y^2 + c z^2 = 0, or None.

    Exact (Legendre reduction) for coefficients of moderate size; very large
    coefficients are declined (None) rather than risking an unbounded
    factorization, so callers can fall back to bounded searches.
    """
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    if a == 0:
        return (Fraction(1), Fraction(0), Fraction(0))
    if b == 0:
        return (Fraction(0), Fraction(1), Fraction(0))
    if c == 0:
        return (Fraction(0), Fraction(0), Fraction(1))
    coeffs = _as_integer_coeffs([a, b, c])
    g = _gcd(_gcd(coeffs[0], coeffs[1]), coeffs[2])
    coeffs = [v // g for v in coeffs]
    reduced, scales = [], []
    for v in coeffs:
        r, s = _strip_small_squares(v)
        reduced.append(r)
        scales.append(s)
    sol = _solve_bounded(tuple(reduced))
    if sol is None:
        return None
    witness = tuple(Fraction(s, scale) for s, scale in zip(sol, scales))
    if a * witness[0] ** 2 + b * witness[1] ** 2 + c * witness[2] ** 2 != 0:
        return None
    return witness


def rational_sqrt(q) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None."""
    import math

    q = Fraction(q)
    if q < 0:
        return None
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def represent_binary(d1, d2, value):
    """A rational (x, y) with d1 x^2 + d2 y^2 = value, or None.

    Complete over the rationals: reduces to the Legendre equation
    d1 x^2 + d2 y^2 - value z^2 = 0, using an isotropic vector of the binary
    form itself when the solver degenerates to z = 0.
    """
    d1, d2, value = Fraction(d1), Fraction(d2), Fraction(value)
    if value == 0:
        raise ValueError("use ternary_isotropic for the value 0")
    if d1 == 0 and d2 == 0:
        return None
    if d1 == 0:
        root = rational_sqrt(value / d2)
        return (Fraction(0), root) if root is not None else None
    if d2 == 0:
        root = rational_sqrt(value / d1)
        return (root, Fraction(0)) if root is not None else None
    sol = ternary_isotropic(d1, d2, -value)
    if sol is None:
        return None
    sx, sy, sz = sol
    if sz != 0:
        return (sx / sz, sy / sz)
    # (sx, sy) is an isotropic vector of the binary form; any value follows
    # from q(s*u + v) = 2 s B(u, v) + q(v) with v = e_1.
    bilinear = d1 * sx  # B(u, e_1)
    if bilinear == 0:
        return None  # unreachable for nonzero d1, d2; defensive
    s = (value - d1) / (2 * bilinear)
    return (s * sx + 1, s * sy)
