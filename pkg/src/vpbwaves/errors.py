"""Exception and warning types shared across the package."""
from __future__ import annotations


class VPBError(ValueError):
    """Base class for computational failures (CLI exit code 1)."""


class ValidationError(ValueError):
    """Invalid input parameters or configuration values (CLI exit code 2)."""


class ParseError(ValidationError):
    """Malformed configuration text; carries the line and column."""

    def __init__(self, message: str, line: int = 0, column: int = 0) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class NonphysicalMoments(VPBError, ValueError):
    """Moments of a distribution give non-positive density or temperature."""


class NoSolution(VPBError, ValueError):
    """Riemann data that the rarefaction-contact-rarefaction pattern cannot connect."""

    def __init__(self, message: str, diagnosis: dict | None = None) -> None:
        super().__init__(message)
        self.diagnosis = dict(diagnosis or {})


class NotMicroscopic(VPBError, ValueError):
    """Right-hand side has a macroscopic component beyond tolerance."""


class ConvergenceFailure(VPBError, RuntimeError):
    """Iterative method stopped without reaching its tolerance."""

    def __init__(self, message: str, residual: float = float("nan"), iterations: int = 0) -> None:
        super().__init__(f"{message} (residual={residual:.3e}, iterations={iterations})")
        self.residual = residual
        self.iterations = iterations


class DomainError(ValidationError):
    """Argument outside the domain of a thermodynamic or wave function."""


class PositivityViolation(VPBError, RuntimeError):
    """Specific volume or temperature became non-positive during a run."""

    def __init__(self, message: str, time: float = float("nan"), snapshot: str | None = None) -> None:
        super().__init__(message)
        self.time = time
        self.snapshot = snapshot


class StabilityViolation(VPBError, RuntimeError):
    """Requested time step exceeds the explicit stability bound."""


class NeutralityViolated(VPBError, ValueError):
    """Initial charge density does not integrate to zero."""


class DomainTooSmall(VPBError, ValueError):
    """Waves reached the artificial boundary before the requested end time."""


class NonPositiveSeries(VPBError, ValueError):
    """Log-log fit requested on a series with non-positive samples."""


class GridTooCoarse(UserWarning):
    """Collision quadrature violates its configured conservation bound."""
