"""Operations behind both the HTTP endpoints and the CLI subcommands.

Handlers take and return plain dicts shaped like the pydantic models, so the
CLI can call them directly without a running server.  Domain failures raise
:class:`lndkit.errors.LndkitError`; the adapters translate them into exit
code 1 or HTTP 400 with the machine-readable error record.
"""

from __future__ import annotations

from fractions import Fraction

from .. import serialize as ser
from ..curves import PointSet, ga_orbit_through
from ..errors import ParseError
from ..flows import SYMBOLIC, certify_nilpotent, exp_flow, replica, word_apply
from ..gallery import run_case
from ..jets import jet_of, kappa, psi, realize_linear_part
from ..matrixvars import MatrixPoint
from ..poly import format_polynomial, parse_polynomial
from ..transport import transport, verify


def lnd_verify(doc: dict) -> dict:
    derivation = ser.derivation_from_dict(doc["derivation"])
    cert = certify_nilpotent(derivation, int(doc.get("bound", 64)))
    return ser.certificate_to_dict(cert)


def lnd_exp(doc: dict) -> dict:
    derivation = ser.derivation_from_dict(doc["derivation"])
    bound = int(doc.get("bound", 64))
    time = doc.get("time", "1")
    if time == SYMBOLIC:
        pmap = exp_flow(derivation, SYMBOLIC, bound=bound)
        return {
            "ring": ser.ring_to_list(pmap.ring),
            "forward": [format_polynomial(img) for img in pmap.images],
            "inverse": None,
            "symbolic": True,
        }
    auto = exp_flow(derivation, ser.fraction_from(time), bound=bound)
    return {
        "ring": ser.ring_to_list(auto.ring),
        "forward": [format_polynomial(img) for img in auto.forward.images],
        "inverse": [format_polynomial(img) for img in auto.inverse.images],
        "symbolic": False,
    }


def lnd_replica(doc: dict) -> dict:
    derivation = ser.derivation_from_dict(doc["derivation"])
    invariant = parse_polynomial(str(doc["invariant"]), derivation.ring)
    return {"derivation": ser.derivation_to_dict(replica(derivation, invariant))}


def aut_apply(doc: dict) -> dict:
    word = ser.word_from_dict(doc["word"], bound=int(doc.get("bound", 64)))
    point = ser.point_from_list(doc["point"])
    return {"point": ser.point_to_list(word_apply(word, point))}


def aut_jet(doc: dict) -> dict:
    word = ser.word_from_dict(doc["word"], bound=int(doc.get("bound", 64)))
    point = ser.point_from_list(doc["point"])
    jet = jet_of(word, point, int(doc.get("order", 1)))
    return ser.jet_to_dict(jet)


def jet_psi(doc: dict) -> dict:
    jet = ser.jet_from_dict(doc)
    return ser.homform_to_dict(psi(jet))


def jet_kappa(doc: dict) -> dict:
    form = ser.homform_from_dict(doc)
    divergence = kappa(form)
    return {
        "ring": ser.ring_to_list(form.ring),
        "polynomial": format_polynomial(divergence),
    }


def jet_realize(doc: dict) -> dict:
    matrix = [[ser.fraction_from(x) for x in row] for row in doc["matrix"]]
    point = ser.point_from_list(doc["point"])
    frozen = [ser.point_from_list(q) for q in doc.get("frozen", [])]
    word = realize_linear_part(
        matrix, point, frozen, freeze_order=int(doc.get("order", 1))
    )
    return ser.word_to_dict(word)


def matrix_transport(doc: dict) -> dict:
    mode = str(doc["mode"])
    sources = [
        MatrixPoint(mode, [[ser.fraction_from(x) for x in row] for row in grid])
        for grid in doc["sources"]
    ]
    targets = [
        MatrixPoint(mode, [[ser.fraction_from(x) for x in row] for row in grid])
        for grid in doc["targets"]
    ]
    cert = transport(
        sources, targets,
        seed=int(doc.get("seed", 0)),
        retry_budget=int(doc.get("budget", 32)),
    )
    return ser.transport_certificate_to_dict(cert)


def matrix_verify(doc: dict) -> dict:
    cert = ser.transport_certificate_from_dict(doc)
    return {"verified": verify(cert)}


def curve_interpolate(doc: dict) -> dict:
    points = [ser.point_from_list(p) for p in doc["points"]]
    if not points:
        raise ParseError("at least one interpolation point is required")
    names = doc.get("ring")
    ring = ser.ring_from_list(names) if names else ser.ring_from_list(
        [f"x{i + 1}" for i in range(len(points[0]))]
    )
    z = PointSet(ring, points)
    avoid_points = [ser.point_from_list(p) for p in doc.get("avoid", [])]
    avoid = PointSet(ring, avoid_points) if avoid_points else None
    cert = ga_orbit_through(
        z, avoid, seed=int(doc.get("seed", 0)),
        retry_budget=int(doc.get("budget", 200)),
    )
    return ser.curve_certificate_to_dict(cert)


def gallery(doc: dict) -> dict:
    case = str(doc["case"])
    kwargs = {}
    for key in ("p", "q", "m"):
        if doc.get(key) is not None:
            kwargs[key] = doc[key]
    return run_case(case, **kwargs)
