"""Executable reproductions of classical worked examples.

Each report runs a fixed list of exact checks (no tolerances anywhere) and
returns structured pass/fail records, so the same code doubles as an
integration test and as CLI output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .flows import (
    Derivation,
    PolyAutomorphism,
    certify_nilpotent,
    derive,
    exp_flow,
    in_kernel,
    replica,
    volume_check,
)
from .poly import Polynomial, Ring, parse_polynomial


@dataclass
class CheckRecord:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class GalleryReport:
    case: str
    checks: list = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(CheckRecord(name, bool(passed), detail))

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "case": self.case,
            "ok": self.ok,
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail}
                for c in self.checks
            ],
        }


def nagata() -> tuple:
    """The classical wild automorphism data on affine 3-space.

    Returns the derivation X d/dY + Y d/dZ, its invariant Y^2 - 2XZ, and the
    replica flow exp(f * D) at time 1 together with its verified inverse.
    """
    ring = Ring(["X", "Y", "Z"])
    d = Derivation.from_dict(ring, {
        "Y": Polynomial.variable(ring, "X"),
        "Z": Polynomial.variable(ring, "Y"),
    })
    f = parse_polynomial("Y^2 - 2*X*Z", ring)
    if not in_kernel(d, f):
        raise AssertionError("internal error: invariant fails the kernel check")
    auto = exp_flow(replica(d, f), Fraction(1))
    return d, f, auto


def nagata_report() -> GalleryReport:
    report = GalleryReport("nagata")
    d, f, auto = nagata()
    ring = d.ring
    report.add("derivation kills the invariant", derive(d, f).is_zero)
    report.add(
        "automorphism fixes X",
        auto.forward.images[0] == Polynomial.variable(ring, "X"),
    )
    report.add("volume form preserved", volume_check(auto))
    report.add(
        "invariant constant along the flow",
        f.substitute(auto.forward.images) == f,
    )
    inverse_check = exp_flow(replica(d, f), Fraction(-1))
    report.add(
        "inverse is the flow at time -1",
        auto.inverse == inverse_check.forward,
    )
    return report


def conter_report() -> GalleryReport:
    """Verification of the degree-3 kernel generators on affine 4-space.

    The derivation Y d/dX + Z d/dY + U d/dZ has invariants p1..p4 subject to
    the syzygy p1^2 p4 = p2^3 - p3^2; coordinates are recovered from
    invariant values by explicit sections on u != 0 and on u = 0, z != 0.
    """
    report = GalleryReport("conter")
    ring = Ring(["X", "Y", "Z", "U"])
    d1 = Derivation.from_dict(ring, {
        "X": Polynomial.variable(ring, "Y"),
        "Y": Polynomial.variable(ring, "Z"),
        "Z": Polynomial.variable(ring, "U"),
    })
    p1 = parse_polynomial("U", ring)
    p2 = parse_polynomial("Z^2 - 2*Y*U", ring)
    p3 = parse_polynomial("Z^3 - 3*Y*Z*U + 3*X*U^2", ring)
    p4 = parse_polynomial(
        "9*X^2*U^2 - 18*X*Y*Z*U + 6*X*Z^3 - 3*Y^2*Z^2 + 8*Y^3*U", ring
    )
    invariants = [p1, p2, p3, p4]
    for i, p in enumerate(invariants, start=1):
        report.add(f"p{i} lies in the kernel", in_kernel(d1, p))
    report.add("syzygy p1^2*p4 = p2^3 - p3^2", p1 * p1 * p4 == p2 * p2 * p2 - p3 * p3)
    composed = p1 * p1 * p4 - p2 ** 3 + p3 ** 2
    report.add("hypersurface equation vanishes on the image", composed.is_zero)

    def flow_point(point, t):
        auto = exp_flow(d1, Fraction(t))
        return auto.forward.apply(point)

    # section on u != 0: flow by t = -z/u, then recover y and x
    for point in [(1, 2, 3, 4), (Fraction(-2), Fraction(1, 2), Fraction(3), Fraction(5))]:
        point = tuple(Fraction(v) for v in point)
        u = point[3]
        a = flow_point(point, -point[2] / u)
        vals = {f"p{i}": p.evaluate(a) for i, p in enumerate(invariants, start=1)}
        y_ok = a[1] == -vals["p2"] / (2 * u)
        x_ok = a[0] == vals["p3"] / (3 * u * u)
        const_ok = all(
            p.evaluate(a) == p.evaluate(point) for p in invariants
        )
        report.add(f"section u!=0 recovers y at {tuple(map(str, point))}", y_ok)
        report.add(f"section u!=0 recovers x at {tuple(map(str, point))}", x_ok)
        report.add(f"invariants constant along flow at {tuple(map(str, point))}", const_ok)

    # section on u = 0, z != 0: flow by t = -y/z, then recover z and x
    for point in [(2, 3, 1, 0), (Fraction(1, 3), Fraction(-1), Fraction(2), Fraction(0))]:
        point = tuple(Fraction(v) for v in point)
        z = point[2]
        a = flow_point(point, -point[1] / z)
        vals = {f"p{i}": p.evaluate(a) for i, p in enumerate(invariants, start=1)}
        z_ok = a[2] == vals["p3"] / vals["p2"]
        x_ok = a[0] == vals["p4"] / (6 * a[2] ** 3)
        report.add(f"section u=0 recovers z at {tuple(map(str, point))}", z_ok)
        report.add(f"section u=0 recovers x at {tuple(map(str, point))}", x_ok)
    return report


def nonsep_report() -> GalleryReport:
    """Non-separation of two orbits by the invariants of one derivation.

    On affine 4-space the fields Y d/dX + Z d/dY and d/dU have kernels
    containing {Z, Y^2-2XZ, U} and {X, Y, Z}; every listed invariant of the
    first field takes equal values on the paired points (x, 1, 0, u) and
    (-x, -1, 0, u).
    """
    report = GalleryReport("nonsep")
    ring = Ring(["X", "Y", "Z", "U"])
    d1 = Derivation.from_dict(ring, {
        "X": Polynomial.variable(ring, "Y"),
        "Y": Polynomial.variable(ring, "Z"),
    })
    d2 = Derivation.from_dict(ring, {"U": Polynomial.constant(ring, 1)})
    gens1 = [
        parse_polynomial("Z", ring),
        parse_polynomial("Y^2 - 2*X*Z", ring),
        parse_polynomial("U", ring),
    ]
    gens2 = [parse_polynomial(v, ring) for v in ("X", "Y", "Z")]
    for g in gens1:
        report.add(f"{g} in ker of the first field", in_kernel(d1, g))
    for g in gens2:
        report.add(f"{g} in ker of the second field", in_kernel(d2, g))
    samples = [
        (Fraction(1), Fraction(2)),
        (Fraction(-3), Fraction(1, 2)),
        (Fraction(5, 7), Fraction(-4)),
    ]
    for (x, u) in samples:
        plus = (x, Fraction(1), Fraction(0), u)
        minus = (-x, Fraction(-1), Fraction(0), u)
        equal = all(g.evaluate(plus) == g.evaluate(minus) for g in gens1)
        report.add(
            f"invariants agree on paired points (x={x}, u={u})", equal
        )
    return report


@dataclass(frozen=True)
class Sl2Params:
    """Numeric data of the bigraded derivation construction."""

    p: int
    q: int
    m: int
    k: int
    a: int
    b: int
    c: int
    d: int
    r0: int
    d0: int
    s0: int

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in
                ("p", "q", "m", "k", "a", "b", "c", "d", "r0", "d0", "s0")}


def _solve_bezout(p: int, q: int, k: int) -> tuple:
    """The smallest natural solution (d0, s0) of d*q - s*p = k."""
    if p == 1:
        return 1, q - k
    inv = pow(q % p, -1, p)
    d0 = (k * inv) % p
    if d0 == 0:
        d0 = p
    s0 = (d0 * q - k) // p
    return d0, s0


def sl2_lnd(p: int, q: int, m: int) -> tuple:
    """The homogeneous locally nilpotent derivation on the 5-variable cone.

    Solves the integer constraints (Bezout equation and congruence) for the
    exponents, then returns the parameter record and the derivation with
    images D(X4) = b X2^c X3^d Y^(b-1), D(Y) = X1 X2^c X3^d, killing
    X1, X2, X3 and the hypersurface equation Y^b - X1 X4 + X2 X3.
    """
    if not (0 < p < q) or gcd(p, q) != 1 or m < 1:
        raise ValueError("need coprime 0 < p < q and m >= 1")
    k = gcd(q - p, m)
    a = m // k
    b = (q - p) // k
    d0, s0 = _solve_bezout(p, q, k)
    if d0 * q - s0 * p != k or d0 < 1 or s0 < 1:
        raise AssertionError("internal error: Bezout solution invalid")
    if (s0 - d0) % k != 0:
        raise AssertionError("internal error: k must divide s0 - d0")
    l = gcd(a, q - p)
    modulus = a // l
    if modulus == 1:
        r0 = 0
    else:
        lhs = ((q - p) // l) % modulus
        rhs = ((d0 - s0) // l) % modulus
        r0 = (rhs * pow(lhs, -1, modulus)) % modulus
    c = s0 + r0 * q - 1
    d = d0 + r0 * p

    params = Sl2Params(p=p, q=q, m=m, k=k, a=a, b=b, c=c, d=d, r0=r0, d0=d0, s0=s0)

    ring = Ring(["X1", "X2", "X3", "X4", "Y"])
    x1 = Polynomial.variable(ring, "X1")
    x2 = Polynomial.variable(ring, "X2")
    x3 = Polynomial.variable(ring, "X3")
    x4 = Polynomial.variable(ring, "X4")
    y = Polynomial.variable(ring, "Y")
    image_x4 = (x2 ** c) * (x3 ** d) * (y ** (b - 1)) * b
    image_y = x1 * (x2 ** c) * (x3 ** d)
    derivation = Derivation(ring, [
        Polynomial.zero(ring), Polynomial.zero(ring), Polynomial.zero(ring),
        image_x4, image_y,
    ])

    hypersurface = y ** b - x1 * x4 + x2 * x3
    if not derive(derivation, hypersurface).is_zero:
        raise AssertionError("internal error: hypersurface equation not killed")
    if -p - c * p + d * q != k:
        raise AssertionError("internal error: bidegree relation violated")
    if (c + 1 - d) % a != 0:
        raise AssertionError("internal error: congruence constraint violated")
    if not certify_nilpotent(derivation).is_nilpotent:
        raise AssertionError("internal error: derivation not certified nilpotent")
    return params, derivation


def run_case(case: str, **kwargs) -> dict:
    """Gallery dispatch used by the CLI and the service layer."""
    if case == "nagata":
        return nagata_report().as_dict()
    if case == "conter":
        return conter_report().as_dict()
    if case == "nonsep":
        return nonsep_report().as_dict()
    if case == "sl2":
        params, derivation = sl2_lnd(
            int(kwargs["p"]), int(kwargs["q"]), int(kwargs["m"])
        )
        from .serialize import derivation_to_dict

        return {
            "case": "sl2",
            "ok": True,
            "params": params.as_dict(),
            "derivation": derivation_to_dict(derivation),
        }
    raise ValueError(f"unknown gallery case {case!r}")
