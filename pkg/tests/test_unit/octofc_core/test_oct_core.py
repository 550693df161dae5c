"""Tests for octonion arithmetic, identities and slice frames."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from octofc_core.exceptions import DomainError, ValidationError
from octofc_core.oct_core import (
    FANO_TRIPLES,
    as_octonion,
    associator,
    basis,
    check_unit_imaginary,
    commutator,
    conj,
    fano_closure_check,
    frame_coords,
    frame_defect,
    from_frame_coords,
    identity_residuals,
    inner,
    inv,
    left_matrix,
    make_slice_frame,
    mul,
    multiplication_table,
    norm,
    octonion,
    power,
    random_octonions,
    random_unit_imaginary,
    right_matrix,
)

finite = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)
octonions = arrays(np.float64, (8,), elements=finite)


class TestMultiplicationTable:
    """Test the fixed multiplication convention."""

    def test_fano_closure(self) -> None:
        """Every pair of imaginary units lies in exactly one triple."""
        assert fano_closure_check()

    def test_triples_are_cyclic(self) -> None:
        """For each triple e_i e_j = e_k, e_j e_k = e_i and e_k e_i = e_j."""
        for i, j, k in FANO_TRIPLES:
            np.testing.assert_array_equal(mul(basis(i), basis(j)), basis(k))
            np.testing.assert_array_equal(mul(basis(j), basis(k)), basis(i))
            np.testing.assert_array_equal(mul(basis(k), basis(i)), basis(j))
            np.testing.assert_array_equal(mul(basis(j), basis(i)), -basis(k))

    def test_signed_table(self) -> None:
        """The table encodes e1 e2 = e3, e2 e1 = -e3 and e_i e_i = -1."""
        table = multiplication_table()
        assert table[1, 2] == 4
        assert table[2, 1] == -4
        assert table[0, 5] == 6
        for i in range(1, 8):
            assert table[i, i] == -1

    def test_associator_of_e1_e2_e4(self) -> None:
        """[e1, e2, e4] = 2 e7."""
        np.testing.assert_array_equal(
            associator(basis(1), basis(2), basis(4)), 2.0 * basis(7)
        )

    def test_commutator_of_units(self) -> None:
        """[e1, e2] = 2 e3."""
        np.testing.assert_array_equal(commutator(basis(1), basis(2)), 2.0 * basis(3))


class TestArithmetic:
    """Test norms, conjugation, inverses and powers."""

    def test_norm(self) -> None:
        """|3 + 4 e5| = 5."""
        assert norm(octonion(3, 0, 0, 0, 0, 4)) == pytest.approx(5.0)

    def test_inverse(self, rng) -> None:
        """x inv(x) = 1."""
        x = random_octonions(rng, 5)
        np.testing.assert_allclose(mul(x, inv(x)), np.tile(basis(0), (5, 1)), atol=1e-14)

    def test_inverse_of_zero(self) -> None:
        """The zero octonion has no inverse."""
        with pytest.raises(DomainError):
            inv(np.zeros(8))

    def test_power(self, rng) -> None:
        """Powers agree with repeated products and negative powers invert."""
        (x,) = random_octonions(rng, 1)
        np.testing.assert_allclose(power(x, 3), mul(mul(x, x), x), atol=1e-12)
        np.testing.assert_allclose(power(x, -1), inv(x), atol=1e-14)
        np.testing.assert_array_equal(power(x, 0), basis(0))

    def test_inner_is_real_part_of_product_with_conjugate(self, rng) -> None:
        """<a, b> = Re(a conj(b))."""
        a, b = random_octonions(rng, 2)
        assert inner(a, b) == pytest.approx(mul(a, conj(b))[0])

    def test_left_and_right_matrices(self, rng) -> None:
        """left_matrix(a) x = a x and right_matrix(b) x = x b."""
        a, b, x = random_octonions(rng, 3)
        np.testing.assert_allclose(left_matrix(a) @ x, mul(a, x), atol=1e-13)
        np.testing.assert_allclose(right_matrix(b) @ x, mul(x, b), atol=1e-13)

    def test_as_octonion_validation(self) -> None:
        """Wrong shapes and non-finite values are rejected."""
        with pytest.raises(ValidationError):
            as_octonion([1.0, 2.0])
        with pytest.raises(ValidationError):
            as_octonion([np.nan] * 8)
        with pytest.raises(ValidationError):
            octonion(*range(9))


class TestIdentities:
    """Property tests of the octonion identities."""

    @settings(max_examples=50, deadline=None)
    @given(octonions, octonions, octonions, octonions)
    def test_moufang_and_five_term(self, x, y, z, w) -> None:
        """Moufang and five-term identities hold up to rounding."""
        scale = max(1.0, float(np.max(norm(np.stack([x, y, z, w]))))) ** 4
        assert identity_residuals(x, y, z, w).max() <= 1e-12 * scale

    @settings(max_examples=50, deadline=None)
    @given(octonions, octonions)
    def test_alternativity_and_norm(self, x, y) -> None:
        """[x, x, y] = [x, y, y] = 0 and |xy| = |x||y|."""
        scale = max(1.0, float(norm(x)), float(norm(y))) ** 3
        assert norm(associator(x, x, y)) <= 1e-12 * scale
        assert norm(associator(x, y, y)) <= 1e-12 * scale
        assert norm(mul(x, y)) == pytest.approx(norm(x) * norm(y), abs=1e-11 * scale)

    @settings(max_examples=50, deadline=None)
    @given(octonions, octonions)
    def test_conjugation_reverses_products(self, x, y) -> None:
        """conj(xy) = conj(y) conj(x)."""
        scale = max(1.0, float(norm(x)) * float(norm(y)))
        np.testing.assert_allclose(
            conj(mul(x, y)), mul(conj(y), conj(x)), atol=1e-12 * scale
        )


class TestSliceFrames:
    """Test imaginary units and standard frames."""

    def test_check_unit_imaginary_rejects_real_part(self) -> None:
        """A unit with a real part is not an imaginary unit."""
        with pytest.raises(DomainError):
            check_unit_imaginary(basis(0))

    def test_check_unit_imaginary_rejects_non_unit(self) -> None:
        """2 e1 is not a unit."""
        with pytest.raises(DomainError):
            check_unit_imaginary(2.0 * basis(1))

    def test_frame_of_basis_unit(self) -> None:
        """The frame of e1 has J = e1 and satisfies the standard table."""
        frame = make_slice_frame(basis(1))
        np.testing.assert_array_equal(frame.j, basis(1))
        assert frame_defect(frame) <= 1e-14

    def test_frames_of_random_units(self, rng) -> None:
        """Random units produce orthonormal standard frames."""
        for _ in range(10):
            frame = make_slice_frame(random_unit_imaginary(rng))
            assert frame_defect(frame) <= 1e-12

    def test_frame_coordinates_round_trip(self, rng) -> None:
        """frame_coords and from_frame_coords are inverse."""
        frame = make_slice_frame(random_unit_imaginary(rng))
        x = random_octonions(rng, 4)
        np.testing.assert_allclose(from_frame_coords(frame_coords(x, frame), frame), x, atol=1e-13)

    def test_basis_index_range(self) -> None:
        """Only e0..e7 exist."""
        with pytest.raises(DomainError):
            basis(8)
