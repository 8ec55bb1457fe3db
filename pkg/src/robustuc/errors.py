"""Exception types shared across the package."""

from __future__ import annotations


class RobustUcError(Exception):
    """Base class for all package errors."""


class CaseValidationError(RobustUcError):
    """Raised when a case with validation errors reaches a solve entry point."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


class InfeasibleInitialState(RobustUcError):
    """Initial unit status conflicts with its residual forced up/down time."""


class UnknownLine(RobustUcError):
    """A trajectory references a line that does not exist in the case."""


class BigMTooSmall(RobustUcError):
    """A linearized dual variable landed at its big-M bound; result unreliable."""


class BackendFailure(RobustUcError):
    """A third-party solver failed or returned an unusable status."""


class NumericalTrouble(BackendFailure):
    """Solver signalled numerical issues; retry with rescaled data may help."""


class EnumerationTooLarge(RobustUcError):
    """Brute-force commitment enumeration would exceed the stated limit."""


class DegeneratePoint(RobustUcError):
    """Cut requested at a point too close to the origin to define a direction."""
