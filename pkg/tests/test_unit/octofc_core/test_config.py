"""Tests for numerical configuration."""

import os
from unittest.mock import patch

import pytest

from octofc_core.config import (
    Tolerances,
    default_tolerances,
    load_numerics_config,
    tolerances_from_config,
    worker_count,
)
from octofc_core.exceptions import ConfigurationError


class TestNumericsConfig:
    """Test reading OCTOFC_* variables."""

    def test_defaults(self) -> None:
        """An empty environment gives the documented defaults."""
        config = load_numerics_config({})
        assert config.threads == 0
        assert config.pa_horizon == 16
        assert tolerances_from_config(config) == Tolerances()

    def test_overrides(self) -> None:
        """Variables override single settings."""
        config = load_numerics_config(
            {"OCTOFC_QUADRATURE_TOL": "1e-6", "OCTOFC_PA_HORIZON": "8"}
        )
        tolerances = tolerances_from_config(config)
        assert tolerances.quadrature_tol == 1e-6
        assert tolerances.pa_horizon == 8
        assert tolerances.singular_rel == 1e-8

    def test_malformed_value(self) -> None:
        """Unparseable values are configuration errors."""
        with pytest.raises(ConfigurationError) as exc_info:
            load_numerics_config({"OCTOFC_PA_HORIZON": "many"})
        assert exc_info.value.component == "numerics"

    def test_default_tolerances_read_environment(self) -> None:
        """default_tolerances follows the process environment."""
        with patch.dict(os.environ, {"OCTOFC_PA_TOL": "1e-6"}):
            default_tolerances.cache_clear()
            assert default_tolerances().pa_tol == 1e-6


class TestTolerances:
    """Test the frozen tolerance set."""

    def test_non_positive_values(self) -> None:
        """Every tolerance must be positive."""
        with pytest.raises(ConfigurationError) as exc_info:
            Tolerances(quadrature_tol=0.0)
        assert exc_info.value.component == "quadrature_tol"

    def test_as_dict(self) -> None:
        """The mapping lists all seven settings."""
        assert set(Tolerances().as_dict()) == {
            "unit_tol",
            "invertibility_rel",
            "singular_rel",
            "pa_horizon",
            "pa_tol",
            "quadrature_tol",
            "para_linear_tol",
        }


class TestWorkerCount:
    """Test thread count resolution."""

    def test_explicit(self) -> None:
        """An explicit count wins."""
        assert worker_count(3) == 3

    def test_environment(self) -> None:
        """OCTOFC_THREADS is the fallback."""
        with patch.dict(os.environ, {"OCTOFC_THREADS": "2"}):
            assert worker_count() == 2

    def test_cpu_count(self) -> None:
        """Zero means all CPUs."""
        with patch.dict(os.environ, {"OCTOFC_THREADS": "0"}), patch("os.cpu_count", return_value=5):
            assert worker_count(0) == 5

    def test_negative(self) -> None:
        """Negative counts are rejected."""
        with pytest.raises(ConfigurationError):
            worker_count(-1)
