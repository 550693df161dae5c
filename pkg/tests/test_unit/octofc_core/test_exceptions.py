"""Tests for the error hierarchy and exit codes."""

import pytest

from octofc_core.exceptions import (
    ConfigurationError,
    DomainError,
    ExitCode,
    OctofcError,
    PoleError,
    PreconditionError,
    SingularityError,
    ToleranceError,
    ValidationError,
    exit_code_for,
)


class TestErrorDocuments:
    """Test machine-readable error documents."""

    def test_validation_error(self) -> None:
        """Validation errors carry the JSON location."""
        error = ValidationError("expected 8 items, got 7", "entries[0][1]")
        assert error.to_dict() == {
            "error_code": "VALIDATION_ERROR",
            "message": "expected 8 items, got 7",
            "location": "entries[0][1]",
        }

    def test_absent_details_are_dropped(self) -> None:
        """None-valued details are omitted."""
        assert ConfigurationError("bad flag").to_dict() == {
            "error_code": "CONFIG_ERROR",
            "message": "bad flag",
        }

    def test_tolerance_error(self) -> None:
        """Tolerance errors report the estimate and the tolerance."""
        error = ToleranceError("too coarse", 1e-3, 1e-8)
        document = error.to_dict()
        assert document["estimate"] == 1e-3
        assert document["tolerance"] == 1e-8

    def test_singularity_error(self) -> None:
        """The observed singular value is kept as a float."""
        assert SingularityError("singular", 0).to_dict()["min_singular_value"] == 0.0

    def test_base_error(self) -> None:
        """The base error has no details."""
        error = OctofcError("boom")
        assert str(error) == "boom"
        assert error.to_dict() == {"error_code": None, "message": "boom"}


class TestExitCodes:
    """Test the mapping onto CLI exit codes."""

    @pytest.mark.parametrize(
        ("error", "code"),
        [
            (ConfigurationError("x"), ExitCode.CONFIG),
            (ValidationError("x"), ExitCode.CONFIG),
            (DomainError("x"), ExitCode.PRECONDITION),
            (SingularityError("x", 0.0), ExitCode.PRECONDITION),
            (PoleError("x"), ExitCode.PRECONDITION),
            (PreconditionError("x"), ExitCode.PRECONDITION),
            (ToleranceError("x", 1.0, 0.5), ExitCode.TOLERANCE),
            (OctofcError("x"), ExitCode.FAILURE),
            (RuntimeError("x"), ExitCode.FAILURE),
        ],
    )
    def test_exit_code_for(self, error: BaseException, code: ExitCode) -> None:
        """Each error type maps onto its exit code."""
        assert exit_code_for(error) == code

    def test_values(self) -> None:
        """Exit codes are 0 to 4."""
        assert [int(c) for c in ExitCode] == [0, 1, 2, 3, 4]
