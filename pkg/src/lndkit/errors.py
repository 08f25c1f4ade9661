"""Exception hierarchy shared by every lndkit module.

All domain failures derive from :class:`LndkitError` so callers (CLI,
service layer) can map them uniformly onto machine-readable error records.
Each exception carries a stable ``code`` used in those records.
"""

from __future__ import annotations


class LndkitError(Exception):
    """Base class for all domain errors."""

    code = "LndkitError"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details

    def record(self) -> dict:
        """Machine-readable error record for CLI/service output."""
        rec = {"error": self.code, "message": str(self)}
        if self.details:
            rec.update(self.details)
        return rec


class RingMismatch(LndkitError):
    code = "RingMismatch"


class ArityMismatch(LndkitError):
    code = "ArityMismatch"


class UnknownVariable(LndkitError):
    code = "UnknownVariable"


class TermBudgetExceeded(LndkitError):
    """A polynomial grew past the configured term-count cap."""

    code = "TermBudgetExceeded"


class NotSkewSymmetric(LndkitError):
    code = "NotSkewSymmetric"


class NotInvariant(LndkitError):
    """Replica coefficient does not lie in the kernel of the derivation."""

    code = "NotInvariant"


class NotCertifiedNilpotent(LndkitError):
    """A flow was requested for a derivation without a Nilpotent certificate."""

    code = "NotCertifiedNilpotent"


class SymbolicTimeError(LndkitError):
    """Symbolic flow time used in a context that demands rational times."""

    code = "SymbolicTimeError"


class NotFixedPoint(LndkitError):
    """Jet extraction requested at a point the word does not fix."""

    code = "NotFixedPoint"


class JetOrderError(LndkitError):
    """Jet is not the identity to the order a construction requires."""

    code = "JetOrderError"


class NotHomogeneous(LndkitError):
    code = "NotHomogeneous"


class DeterminantNotOne(LndkitError):
    """SL obstruction: prescribed linear parts must have determinant one."""

    code = "DeterminantNotOne"


class FrozenPointConflict(LndkitError):
    """Base point coincides with, or cannot be told apart from, a frozen point."""

    code = "FrozenPointConflict"


class ValueMismatch(LndkitError):
    """Exact precondition on an input value failed (e.g. f(p) != 0)."""

    code = "ValueMismatch"


class ModeMismatch(LndkitError):
    code = "ModeMismatch"


class IndexOutOfRange(LndkitError):
    code = "IndexOutOfRange"


class SignatureMismatch(LndkitError):
    """Transport pair has different rank/det/pf data; carries the pair index."""

    code = "SignatureMismatch"


class UnsupportedStratum(LndkitError):
    """Symmetric transport on a rank < 2 stratum is outside the solver's scope."""

    code = "UnsupportedStratum"


class DuplicatePoint(LndkitError):
    code = "DuplicatePoint"


class NotSeparated(LndkitError):
    """No listed invariant distinguishes the point from a frozen point."""

    code = "NotSeparated"


class SeparationFailure(LndkitError):
    """Transport retry budget exhausted without separating/solving a move."""

    code = "SeparationFailure"


class SearchBudgetExceeded(LndkitError):
    code = "SearchBudgetExceeded"


class ParseError(LndkitError):
    code = "ParseError"
