"""Tests for the builtin function registry."""

import math

import pytest

from octofc_core.exceptions import ValidationError
from octofc_core.function_registry import (
    MAX_POWER,
    BuildContext,
    ExactExpFactory,
    PowerFactory,
    create_function_registry,
    exp_terms_for,
)
from octofc_core.oct_core import basis
from octofc_core.slicefun import SlicePolynomial, StemFunction


class TestFunctionFactoryRegistry:
    """Test building functions from specs."""

    def test_names(self) -> None:
        """pow and exp are registered."""
        registry = create_function_registry()
        assert registry.names() == ["exp", "pow"]
        assert registry.is_builtin("pow:2")
        assert registry.is_builtin("exp")
        assert not registry.is_builtin("op.json")

    def test_power(self) -> None:
        """pow:m is the monomial q^m on the requested side."""
        f = create_function_registry().build("pow:3", "right")
        assert isinstance(f, SlicePolynomial)
        assert f.side == "right"
        assert f.degree == 3
        assert f(2.0 * basis(0))[0] == pytest.approx(8.0)

    def test_truncated_exp(self) -> None:
        """exp:N carries the Taylor coefficients up to N."""
        f = create_function_registry().build("exp:5")
        assert isinstance(f, SlicePolynomial)
        assert f.degree == 5
        assert f.coeffs[2, 0] == pytest.approx(0.5)
        assert f.coeffs[5, 0] == pytest.approx(1.0 / 120.0)

    def test_exact_exp(self) -> None:
        """exp is the exact exponential."""
        f = create_function_registry().build("exp", "right")
        assert isinstance(f, StemFunction)
        assert f.side == "right"
        assert f(basis(0))[0] == pytest.approx(math.e)

    def test_auto_exp_follows_contour(self) -> None:
        """exp:auto uses the remainder bound on the contour disk."""
        registry = create_function_registry()
        small = registry.build("exp:auto", "right", BuildContext(extent=1.0, tol=1e-8))
        large = registry.build("exp:auto", "right", BuildContext(extent=4.0, tol=1e-8))
        assert isinstance(small, SlicePolynomial)
        assert isinstance(large, SlicePolynomial)
        assert small.degree == exp_terms_for(1.0, 1e-8) == 11
        assert large.degree == exp_terms_for(4.0, 1e-8)
        assert large.degree > small.degree
        assert large.side == "right"

    def test_auto_exp_needs_extent(self) -> None:
        """Without a contour there is nothing to size the truncation by."""
        with pytest.raises(ValidationError) as exc_info:
            create_function_registry().build("exp:auto")
        assert exc_info.value.location == "fn"

    @pytest.mark.parametrize("spec", ["pow", "pow:x", "pow:-1", f"pow:{MAX_POWER + 1}", "exp:", "sin:2"])
    def test_invalid_specs(self, spec: str) -> None:
        """Missing, malformed, out-of-range and unknown specs are rejected."""
        with pytest.raises(ValidationError) as exc_info:
            create_function_registry().build(spec)
        assert exc_info.value.location == "fn"

    def test_duplicate_registration(self) -> None:
        """A prefix can only be registered once."""
        registry = create_function_registry()
        with pytest.raises(ValidationError):
            registry.register("pow", PowerFactory())

    def test_exact_exp_takes_no_argument(self) -> None:
        """The exact exponential has no parameter."""
        with pytest.raises(ValidationError):
            ExactExpFactory().validate("3")


class TestExpTerms:
    """Test the truncation order of the exponential."""

    def test_remainder_bound(self) -> None:
        """e r^(N+1) / (N+1)! <= tol first holds at N = 11 for r = 1, tol = 1e-8."""
        assert exp_terms_for(1.0, 1e-8) == 11

    def test_zero_radius(self) -> None:
        """No terms beyond the constant are needed at r = 0."""
        assert exp_terms_for(0.0, 1e-8) == 0

    def test_large_radius_does_not_overflow(self) -> None:
        """Large radii are capped instead of overflowing."""
        assert exp_terms_for(100.0, 1e-12) <= 170

    def test_invalid_arguments(self) -> None:
        """Negative radii and non-positive tolerances are rejected."""
        with pytest.raises(ValidationError):
            exp_terms_for(-1.0, 1e-8)
        with pytest.raises(ValidationError):
            exp_terms_for(1.0, 0.0)
