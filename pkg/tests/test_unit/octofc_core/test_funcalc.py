"""Tests for the left and right functional calculi."""

import numpy as np
import pytest

from octofc_core.exceptions import (
    PreconditionError,
    SingularityError,
    ToleranceError,
    ValidationError,
)
from octofc_core.funcalc import (
    CalcRequest,
    associator_corrected_calculus,
    contour_independence_check,
    default_contour,
    evaluate_calculus,
    functional_calculus,
    product_property_check,
    sphere_probe,
    sphere_samples,
)
from octofc_core.oct_core import basis, random_unit_imaginary
from octofc_core.paralin import diagonal, left_mult_operator, matrix_power
from octofc_core.slicefun import SliceContour, SlicePolynomial


def _slice_polynomial(rng: np.random.Generator, side: str, j: np.ndarray) -> SlicePolynomial:
    a, b = rng.standard_normal((2, 3))
    return SlicePolynomial(side, np.multiply.outer(a, basis(0)) + np.multiply.outer(b, j))


class TestPolynomialCalculus:
    """Test that polynomials of T are reproduced."""

    def test_square_of_diagonal(self, diag_op) -> None:
        """pow:2 gives T^2 on both sides."""
        expected = diagonal([-basis(0), -4.0 * basis(0), -9.0 * basis(0)])
        for side in ("left", "right"):
            request = CalcRequest(
                t=diag_op, f=SlicePolynomial.monomial(2, side), j=basis(1), side=side
            )
            result = evaluate_calculus(request)
            assert np.linalg.norm(result.operator - expected) <= 1e-8
            assert result.nodes == 1024
            assert result.radius == pytest.approx(1.1 * 3.1)
            assert result.power_assoc.ok
            assert result.error_estimate <= 1e-8

    def test_left_multiplication(self, rng) -> None:
        """The calculus of L_q is L_(f(q)) for octonionic coefficients."""
        q = rng.standard_normal(8)
        t = left_mult_operator(q)
        j = random_unit_imaginary(rng)
        for side in ("left", "right"):
            f = SlicePolynomial(side, rng.standard_normal((4, 8)))
            out = functional_calculus(CalcRequest(t=t, f=f, j=j, side=side))
            np.testing.assert_allclose(out[0, 0], f(q), atol=1e-8)

    def test_slice_preserving_function_on_other_side(self, diag_op) -> None:
        """Slice preserving functions enter either calculus."""
        f = SlicePolynomial.from_real([1.0, 0.0, 0.5], side="left")
        out = functional_calculus(CalcRequest(t=diag_op, f=f, j=basis(2), side="right"))
        expected = diagonal([0.5 * basis(0), -basis(0), -3.5 * basis(0)])
        assert np.linalg.norm(out - expected) <= 1e-8

    def test_side_mismatch(self, diag_op) -> None:
        """A left function with octonionic coefficients cannot enter the right calculus."""
        f = SlicePolynomial.constant(basis(3), side="left")
        with pytest.raises(ValidationError):
            functional_calculus(CalcRequest(t=diag_op, f=f, j=basis(1), side="right"))

    def test_nested_powers_of_slice_valued_operator(self, nonsphere_op) -> None:
        """For [[0, -e1], [e1, 0]] the calculus of q^3 is the nested cube."""
        f = SlicePolynomial.monomial(3)
        out = functional_calculus(CalcRequest(t=nonsphere_op, f=f, j=basis(1)))
        expected = matrix_power(nonsphere_op, 3, "left")
        assert np.linalg.norm(out - expected) <= 1e-8


class TestPreconditions:
    """Test precondition and tolerance failures."""

    def test_non_power_associative_operator(self, rng) -> None:
        """A generic 2x2 octonionic matrix is refused."""
        t = rng.standard_normal((2, 2, 8))
        request = CalcRequest(t=t, f=SlicePolynomial.monomial(2), j=basis(1))
        with pytest.raises(PreconditionError) as exc_info:
            functional_calculus(request)
        assert exc_info.value.condition == "power_associative"

    def test_contour_must_enclose_spectrum(self, diag_op) -> None:
        """A circle of radius 2 misses the points at |s| = 3."""
        request = CalcRequest(
            t=diag_op,
            f=SlicePolynomial.monomial(2),
            j=basis(1),
            contour=SliceContour(basis(1), 0.0, 2.0, 64),
        )
        with pytest.raises(PreconditionError) as exc_info:
            functional_calculus(request)
        assert exc_info.value.condition == "spectrum_enclosure"

    def test_singular_node(self, diag_op) -> None:
        """A node on the spectrum is reported as singular."""
        request = CalcRequest(
            t=diag_op,
            f=SlicePolynomial.monomial(2),
            j=basis(1),
            contour=SliceContour(basis(1), 0.0, 1.0, 64),
            check_spectrum=False,
        )
        with pytest.raises(SingularityError):
            functional_calculus(request)

    def test_coarse_quadrature(self, diag_op) -> None:
        """Eight nodes close to the spectrum breach the tolerance."""
        request = CalcRequest(
            t=diag_op,
            f=SlicePolynomial.monomial(2),
            j=basis(1),
            contour=SliceContour(basis(1), 0.0, 3.3, 8),
        )
        with pytest.raises(ToleranceError) as exc_info:
            functional_calculus(request)
        assert exc_info.value.estimate > exc_info.value.tolerance


class TestVariants:
    """Test the associator-corrected integrand and contour checks."""

    def test_associator_corrected_agrees(self, diag_op, rng) -> None:
        """Both integrands give the same operator."""
        for side in ("left", "right"):
            f = SlicePolynomial(side, rng.standard_normal((3, 8)))
            request = CalcRequest(t=diag_op, f=f, j=basis(4), side=side)
            gap = associator_corrected_calculus(request) - functional_calculus(request)
            assert np.linalg.norm(gap) <= 1e-9

    def test_contour_independence(self, diag_op) -> None:
        """Admissible radii give the same operator."""
        request = CalcRequest(t=diag_op, f=SlicePolynomial.monomial(2), j=basis(1))
        assert contour_independence_check(request, 3.5, 5.0) <= 1e-8

    def test_default_contour(self, diag_op) -> None:
        """The radius is |c| + 1.1 (||T|| + 0.1)."""
        contour = default_contour(diag_op, basis(1), nodes=256, center=1.0)
        assert contour.radius == pytest.approx(1.0 + 1.1 * 3.1)
        assert contour.center == 1.0
        assert contour.nodes == 256


class TestSphereProbe:
    """Test the dependence of f*(T)_J on J."""

    def test_sphere_samples(self) -> None:
        """Seven standard units and 21 pairwise sums, plus seeded extras."""
        units = sphere_samples()
        assert units.shape == (28, 8)
        np.testing.assert_allclose(np.linalg.norm(units, axis=1), 1.0)
        assert not np.any(units[:, 0])
        extra = sphere_samples(extra=3, seed=7)
        assert extra.shape == (31, 8)
        np.testing.assert_array_equal(extra, sphere_samples(extra=3, seed=7))

    def test_sphere_invariance_of_diagonal(self, diag_op) -> None:
        """The square of the diagonal example does not depend on J."""
        probe = sphere_probe(
            diag_op,
            SlicePolynomial.monomial(2),
            sphere_samples()[:4],
            nodes=512,
            continuity_eps=1e-3,
            threads=2,
        )
        assert len(probe.field) == 4
        assert probe.max_dev <= 1e-8
        assert probe.max_re_dev <= 1e-8
        assert probe.continuity is not None
        assert probe.continuity <= 1e-8


class TestProductProperty:
    """Test the product rule of the two calculi."""

    def test_product_rule_for_diagonal(self, diag_op, rng) -> None:
        """Re f_*(T) g*(T) matches the calculi of both slice products."""
        j = basis(1)
        for _ in range(20):
            f = _slice_polynomial(rng, "right", j)
            g = _slice_polynomial(rng, "left", j)
            assert product_property_check(diag_op, f, g, j) <= 1e-7

    @pytest.mark.slow
    @pytest.mark.parametrize("operator", ["diag_op", "nonsphere_op"])
    def test_product_rule_real_coefficients(self, request, operator, rng) -> None:
        """Random real polynomial pairs satisfy the product rule on both examples."""
        t = request.getfixturevalue(operator)
        j = basis(5)
        for _ in range(20):
            f = SlicePolynomial.from_real(rng.standard_normal(3), side="right")
            g = SlicePolynomial.from_real(rng.standard_normal(3), side="left")
            assert product_property_check(t, f, g, j) <= 1e-7

    def test_unit_right_factor(self, diag_op, rng) -> None:
        """With g = 1 the right and left calculi have equal real parts."""
        j = basis(1)
        f = _slice_polynomial(rng, "right", j)
        one = SlicePolynomial.from_real([1.0])
        assert product_property_check(diag_op, f, one, j) <= 1e-7

    def test_coefficients_outside_slice(self, diag_op) -> None:
        """Coefficients must lie in C_J."""
        f = SlicePolynomial.constant(basis(2), side="right")
        with pytest.raises(ValidationError):
            product_property_check(diag_op, f, SlicePolynomial.monomial(1), basis(1))
