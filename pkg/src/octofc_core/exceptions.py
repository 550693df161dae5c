"""Standardized exceptions for the octofc core library.

This module provides the error hierarchy shared by every numerical module
and the mapping from error type onto the CLI exit-code taxonomy.
"""

from enum import IntEnum
from typing import Any


class ExitCode(IntEnum):
    """Process exit codes used by the octofc CLI."""

    OK = 0
    FAILURE = 1
    CONFIG = 2
    PRECONDITION = 3
    TOLERANCE = 4


class OctofcError(Exception):
    """Base exception for all octofc errors."""

    exit_code: ExitCode = ExitCode.FAILURE

    def __init__(self, message: str, error_code: str | None = None) -> None:
        """Initialize the error with a message and optional error code.

        Args:
            message: Human-readable error message.
            error_code: Optional error code for programmatic handling.
        """
        super().__init__(message)
        self.message = message
        self.error_code = error_code

    def details(self) -> dict[str, Any]:
        """Return the diagnostic attributes specific to this error type."""
        return {}

    def to_dict(self) -> dict[str, Any]:
        """Return the machine-readable error document."""
        return {
            "error_code": self.error_code,
            "message": self.message,
            **{k: v for k, v in self.details().items() if v is not None},
        }


class ConfigurationError(OctofcError):
    """Raised when there are configuration-related errors."""

    exit_code = ExitCode.CONFIG

    def __init__(self, message: str, component: str | None = None) -> None:
        """Initialize configuration error.

        Args:
            message: Error message describing the configuration issue.
            component: Optional component or setting where the error occurred.
        """
        super().__init__(message, "CONFIG_ERROR")
        self.component = component

    def details(self) -> dict[str, Any]:
        return {"component": self.component}


class ValidationError(OctofcError):
    """Raised when an input document or flag fails validation."""

    exit_code = ExitCode.CONFIG

    def __init__(self, message: str, location: str | None = None) -> None:
        """Initialize validation error.

        Args:
            message: Error message describing the validation failure.
            location: Optional JSON path of the offending value.
        """
        super().__init__(message, "VALIDATION_ERROR")
        self.location = location

    def details(self) -> dict[str, Any]:
        return {"location": self.location}


class DomainError(OctofcError):
    """Raised when an argument lies outside the domain of an operation."""

    exit_code = ExitCode.PRECONDITION

    def __init__(self, message: str, argument: str | None = None) -> None:
        """Initialize domain error.

        Args:
            message: Error message describing the domain violation.
            argument: Optional name of the offending argument.
        """
        super().__init__(message, "DOMAIN_ERROR")
        self.argument = argument

    def details(self) -> dict[str, Any]:
        return {"argument": self.argument}


class SingularityError(OctofcError):
    """Raised when a real-linear operator is numerically singular."""

    exit_code = ExitCode.PRECONDITION

    def __init__(self, message: str, min_singular_value: float) -> None:
        """Initialize singularity error.

        Args:
            message: Error message describing the singular operator.
            min_singular_value: Smallest singular value that was observed.
        """
        super().__init__(message, "SINGULARITY_ERROR")
        self.min_singular_value = float(min_singular_value)

    def details(self) -> dict[str, Any]:
        return {"min_singular_value": self.min_singular_value}


class PoleError(OctofcError):
    """Raised when a Cauchy kernel is evaluated on its pole sphere."""

    exit_code = ExitCode.PRECONDITION

    def __init__(self, message: str, point: list[float] | None = None) -> None:
        """Initialize pole error.

        Args:
            message: Error message describing the pole.
            point: Optional coordinates of the point on the pole sphere.
        """
        super().__init__(message, "POLE_ERROR")
        self.point = point

    def details(self) -> dict[str, Any]:
        return {"point": self.point}


class PreconditionError(OctofcError):
    """Raised when a numerical precondition of an operation does not hold."""

    exit_code = ExitCode.PRECONDITION

    def __init__(self, message: str, condition: str | None = None) -> None:
        """Initialize precondition error.

        Args:
            message: Error message describing the failed precondition.
            condition: Optional short name of the precondition.
        """
        super().__init__(message, "PRECONDITION_ERROR")
        self.condition = condition

    def details(self) -> dict[str, Any]:
        return {"condition": self.condition}


class ToleranceError(OctofcError):
    """Raised when an error estimate exceeds the requested tolerance."""

    exit_code = ExitCode.TOLERANCE

    def __init__(self, message: str, estimate: float, tolerance: float) -> None:
        """Initialize tolerance error.

        Args:
            message: Error message describing the breach.
            estimate: The error estimate that was computed.
            tolerance: The tolerance it was compared against.
        """
        super().__init__(message, "TOLERANCE_ERROR")
        self.estimate = float(estimate)
        self.tolerance = float(tolerance)

    def details(self) -> dict[str, Any]:
        return {"estimate": self.estimate, "tolerance": self.tolerance}


def exit_code_for(error: BaseException) -> ExitCode:
    """Map an exception onto the CLI exit code taxonomy."""
    if isinstance(error, OctofcError):
        return error.exit_code
    return ExitCode.FAILURE
