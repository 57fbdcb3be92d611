"""Exception hierarchy shared by all laboratory modules.

Input problems derive from ``ValueError`` and numerical failures from
``RuntimeError`` so callers can keep catching the builtin types.
"""

from typing import Any, Optional


class LabError(Exception):
    """Base class for every error raised by the laboratory."""


class LabInputError(LabError, ValueError):
    """Malformed input: wrong shapes, invalid groups, bad exponents."""


class LabNumericalError(LabError, RuntimeError):
    """A numerical routine could not produce a certified answer."""


class NotHermitian(LabInputError):
    pass


class NotSquare(LabInputError):
    pass


class InvalidP(LabInputError):
    pass


class DimensionMismatch(LabInputError):
    pass


class InvalidGroup(LabInputError):
    pass


class InvalidCocycle(LabInputError):
    pass


class NotASubgroup(LabInputError):
    pass


class NotDiagonalInput(LabInputError):
    pass


class NotSelfadjoint(LabInputError):
    pass


class MatrixFileError(LabInputError):
    """A JSON input file does not match its schema."""


class NoConvergence(LabNumericalError):
    pass


class SolverError(LabNumericalError):
    """The SDP engine failed or returned an uncertified iterate."""


class Infeasible(LabNumericalError):
    """Infeasibility certified by a dual improving ray."""
    
    def __init__(self, message: str, certificate: Optional[Any] = None):
        super().__init__(message)
        self.certificate = certificate
