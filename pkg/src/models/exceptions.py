"""
Error types raised by the engine. Every error carries the CLI exit code it maps to.
"""

from typing import Optional


class CalcError(Exception):
    """Base class for ttcalc errors"""

    exit_code: int = 1

    def __init__(self, detail: str, witness: Optional[str] = None):
        super().__init__(detail)
        self.detail = detail
        self.witness = witness

    def __str__(self) -> str:
        if self.witness:
            return f"{self.detail} (witness: {self.witness})"
        return self.detail


class DocumentParseError(CalcError):
    """Input document is malformed or fails schema validation"""

    exit_code = 2


class ValidationFailure(CalcError):
    """Input parses but violates an algebra or bimodule axiom"""

    exit_code = 1


class ResourceLimitExceeded(CalcError):
    """A chain or cochain space exceeds the configured size cap"""

    exit_code = 3


class ComplexConsistencyError(CalcError):
    """A computed differential or chain map breaks a complex invariant"""

    exit_code = 1


class AlgebraMismatchError(CalcError):
    """Objects defined over different algebras or fields were combined"""

    exit_code = 1


class DimensionMismatchError(CalcError):
    """Vector or matrix shapes do not agree"""

    exit_code = 1


class DegreeError(CalcError):
    """Degree out of range, or above the requested top degree"""

    exit_code = 1
