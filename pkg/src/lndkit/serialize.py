"""JSON-able dict forms of the engine's values.

Conventions (stable interface, shared by the CLI and the HTTP service):
rationals are strings "num/den" (plain integers when the denominator is 1),
polynomials use the canonical graded-lex text, derivations are lists of
(variable, polynomial) pairs, flow times are rational strings or the
literal "t" for symbolic time, and matrices are row-major grids.
"""

from __future__ import annotations

from fractions import Fraction

from .curves import CurveCertificate, ParamCurve
from .errors import ParseError
from .flows import (
    AutWord,
    Derivation,
    FlowStep,
    NilpotencyCertificate,
    PolyAutomorphism,
    SYMBOLIC,
)
from .jets import HomForm, Jet
from .matrixvars import ElemGenerator, MatrixPoint, Signature
from .poly import (
    Polynomial,
    Ring,
    format_polynomial,
    format_rational,
    parse_polynomial,
)
from .polymaps import PolyMap
from .transport import ElemReplica, TransportCertificate


def fraction_from(text) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {text!r}: {exc}") from None


def point_to_list(point) -> list:
    return [format_rational(Fraction(x)) for x in point]


def point_from_list(values) -> tuple:
    return tuple(fraction_from(v) for v in values)


def ring_to_list(ring: Ring) -> list:
    return list(ring.variables)


def ring_from_list(names) -> Ring:
    return Ring([str(n) for n in names])


def polymap_to_dict(pmap: PolyMap) -> dict:
    return {
        "ring": ring_to_list(pmap.ring),
        "images": [format_polynomial(img) for img in pmap.images],
    }


def polymap_from_dict(data: dict) -> PolyMap:
    ring = ring_from_list(data["ring"])
    return PolyMap(ring, [parse_polynomial(s, ring) for s in data["images"]])


def automorphism_to_dict(auto: PolyAutomorphism) -> dict:
    return {
        "ring": ring_to_list(auto.ring),
        "forward": [format_polynomial(img) for img in auto.forward.images],
        "inverse": [format_polynomial(img) for img in auto.inverse.images],
    }


def derivation_to_dict(d: Derivation) -> dict:
    return {
        "ring": ring_to_list(d.ring),
        "coeffs": [
            [v, format_polynomial(c)]
            for v, c in zip(d.ring.variables, d.coeffs)
            if not c.is_zero
        ],
    }


def derivation_from_dict(data: dict) -> Derivation:
    ring = ring_from_list(data["ring"])
    images = {}
    for pair in data.get("coeffs", []):
        name, text = pair[0], pair[1]
        images[str(name)] = parse_polynomial(str(text), ring)
    return Derivation.from_dict(ring, images)


def certificate_to_dict(cert: NilpotencyCertificate) -> dict:
    out = {"status": cert.status, "bound": cert.bound}
    if cert.orders is not None:
        out["orders"] = dict(cert.orders)
    return out


def word_to_dict(word: AutWord) -> dict:
    return {
        "ring": ring_to_list(word.ring),
        "steps": [
            {
                "derivation": derivation_to_dict(step.derivation),
                "time": "t" if step.is_symbolic else format_rational(step.time),
            }
            for step in word.steps
        ],
    }


def word_from_dict(data: dict, bound: int | None = None) -> AutWord:
    ring = ring_from_list(data["ring"])
    steps = []
    kwargs = {} if bound is None else {"bound": bound}
    for record in data.get("steps", []):
        derivation = derivation_from_dict(record["derivation"])
        if derivation.ring != ring:
            raise ParseError("step ring does not match the word ring")
        time = record.get("time", "1")
        if time == SYMBOLIC:
            steps.append(FlowStep(derivation, SYMBOLIC, **kwargs))
        else:
            steps.append(FlowStep(derivation, fraction_from(time), **kwargs))
    return AutWord(ring, steps)


def jet_to_dict(jet: Jet) -> dict:
    return {
        "ring": ring_to_list(jet.ring),
        "base": point_to_list(jet.base),
        "order": jet.order,
        "images": [format_polynomial(img) for img in jet.images],
    }


def jet_from_dict(data: dict) -> Jet:
    ring = ring_from_list(data["ring"])
    return Jet(
        ring,
        point_from_list(data["base"]),
        int(data["order"]),
        [parse_polynomial(s, ring) for s in data["images"]],
    )


def homform_to_dict(form: HomForm) -> dict:
    return {
        "ring": ring_to_list(form.ring),
        "degree": form.degree,
        "forms": [format_polynomial(f) for f in form.forms],
    }


def homform_from_dict(data: dict) -> HomForm:
    ring = ring_from_list(data["ring"])
    return HomForm(
        ring, int(data["degree"]),
        [parse_polynomial(s, ring) for s in data["forms"]],
    )


def matrix_to_dict(b: MatrixPoint) -> dict:
    return {
        "mode": b.mode,
        "entries": [point_to_list(row) for row in b.entries],
    }


def matrix_from_dict(data: dict) -> MatrixPoint:
    return MatrixPoint(
        str(data["mode"]),
        [[fraction_from(x) for x in row] for row in data["entries"]],
    )


def signature_to_dict(sig: Signature) -> dict:
    out: dict = {"rank": sig.rank}
    if sig.det is not None:
        out["det"] = format_rational(sig.det)
    if sig.pf is not None:
        out["pf"] = format_rational(sig.pf)
    return out


def transport_certificate_to_dict(cert: TransportCertificate) -> dict:
    return {
        "problem": {
            "mode": cert.sources[0].mode if cert.sources else None,
            "sources": [matrix_to_dict(b)["entries"] for b in cert.sources],
            "targets": [matrix_to_dict(b)["entries"] for b in cert.targets],
        },
        "word": [
            {
                "generator": {
                    "side": step.generator.side,
                    "k": step.generator.k,
                    "l": step.generator.l,
                },
                "coeff": format_polynomial(step.coeff),
                "time": format_rational(step.time),
            }
            for step in cert.word
        ],
        "verified": cert.verified,
    }


def transport_certificate_from_dict(data: dict) -> TransportCertificate:
    problem = data["problem"]
    mode = str(problem["mode"])
    sources = tuple(
        MatrixPoint(mode, [[fraction_from(x) for x in row] for row in grid])
        for grid in problem["sources"]
    )
    targets = tuple(
        MatrixPoint(mode, [[fraction_from(x) for x in row] for row in grid])
        for grid in problem["targets"]
    )
    if not sources:
        return TransportCertificate((), (), (), bool(data.get("verified", False)))
    n, m = sources[0].n, sources[0].m
    from .matrixvars import entry_ring

    ring = entry_ring(mode, n, m)
    word = []
    for record in data.get("word", []):
        gen = record["generator"]
        generator = ElemGenerator(
            mode, n, m, str(gen["side"]), int(gen["k"]), int(gen["l"])
        )
        coeff = parse_polynomial(str(record["coeff"]), ring)
        word.append(ElemReplica(generator, coeff, fraction_from(record["time"])))
    return TransportCertificate(
        sources, targets, tuple(word), bool(data.get("verified", False))
    )


def curve_certificate_to_dict(cert: CurveCertificate) -> dict:
    return {
        "word": word_to_dict(cert.word),
        "derivation": derivation_to_dict(cert.derivation),
        "times": [format_rational(t) for t in cert.times],
        "parameterization": {
            "variable": cert.parameterization.ring.variables[0],
            "images": [
                format_polynomial(img) for img in cert.parameterization.images
            ],
        },
    }
