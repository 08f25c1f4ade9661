"""lndkit: exact symbolic engine for locally nilpotent derivations.

Core surface, re-exported for convenience:

* polynomial kernel: Ring, Polynomial, PolyMap, jacobian_det, pfaffian
* derivation engine: Derivation, exp_flow, AutWord, replica, flex_rank
* jets: Jet, psi, kappa, realize_linear_part
* matrix transport: MatrixPoint, transport, verify
* interpolation: PointSet, ga_orbit_through
"""

from .errors import LndkitError
from .flows import (
    AutWord,
    Derivation,
    FlowStep,
    PolyAutomorphism,
    certify_nilpotent,
    derive,
    exp_flow,
    flex_rank,
    in_kernel,
    replica,
    tangent_of_replica_flow,
    volume_check,
    word_apply,
    word_compose,
    word_inverse,
    word_to_map,
)
from .jets import HomForm, Jet, is_volume_jet, jet_of, kappa, psi, realize_linear_part
from .matrixvars import ElemGenerator, MatrixPoint, Signature, signature
from .poly import Polynomial, Ring, format_polynomial, parse_polynomial
from .polymaps import PolyMap, compose, jacobian_det, pfaffian
from .transport import ElemReplica, TransportCertificate, transport, verify

__all__ = [
    "AutWord", "Derivation", "ElemGenerator", "ElemReplica", "FlowStep",
    "HomForm", "Jet", "LndkitError", "MatrixPoint", "PolyAutomorphism",
    "PolyMap", "Polynomial", "Ring", "Signature", "TransportCertificate",
    "certify_nilpotent", "compose", "derive", "exp_flow", "flex_rank",
    "format_polynomial", "in_kernel", "is_volume_jet", "jacobian_det",
    "jet_of", "kappa", "parse_polynomial", "pfaffian", "psi", "realize_linear_part",
    "replica", "signature", "tangent_of_replica_flow", "transport", "verify",
    "volume_check", "word_apply", "word_compose", "word_inverse", "word_to_map",
]

__version__ = "0.1.0"
