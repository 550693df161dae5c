"""The bimodule O^n: vectors, real parts, slices and projections.

An OctVector is a float64 array of shape ``(n, 8)``; a RealVector is a float
array of shape ``(n,)``. The real part ``Re V`` of ``V = O^n`` is the set of
real-entry vectors and ``C_J(V) = Re V + J Re V``.
"""

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from octofc_core.exceptions import ValidationError
from octofc_core.oct_core import (
    SliceFrame,
    check_unit_imaginary,
    conj,
    frame_coords,
    mul,
)

type OctVector = npt.NDArray[np.float64]
type RealVector = npt.NDArray[np.float64]

_FORMULA_UNITS = np.eye(8)[1:]


def as_oct_vector(value: npt.ArrayLike, location: str | None = None) -> OctVector:
    """Validate an ``(n, 8)`` array of finite octonion coordinates."""
    x = np.asarray(value, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != 8 or x.shape[0] < 1:  # noqa: PLR2004
        raise ValidationError(
            f"OctVector must have shape (n, 8), got {x.shape}", location
        )
    if not np.all(np.isfinite(x)):
        raise ValidationError("OctVector entries must be finite", location)
    return x


def real_embed(v: npt.ArrayLike) -> OctVector:
    """Embed a RealVector into ``V`` with purely real entries."""
    r = np.asarray(v, dtype=np.float64)
    x = np.zeros((*r.shape, 8))
    x[..., 0] = r
    return x


def vector_norm(x: npt.ArrayLike) -> float:
    """Entrywise-modulus Euclidean norm ``sqrt(sum |x_j|^2)``."""
    return float(np.linalg.norm(np.asarray(x, dtype=np.float64)))


def re_part(x: npt.ArrayLike) -> RealVector:
    """Entrywise real coordinate."""
    return np.asarray(x, dtype=np.float64)[..., 0].copy()


def real_part_formula_vector(x: npt.ArrayLike) -> OctVector:
    """Evaluate ``5/12 x - 1/12 sum_i e_i x e_i`` entrywise.

    The imaginary parts cancel exactly in exact arithmetic, so the output is
    a real-entry vector up to rounding.
    """
    arr = np.asarray(x, dtype=np.float64)
    units = _FORMULA_UNITS.reshape((7,) + (1,) * (arr.ndim - 1) + (8,))
    sandwiches = mul(mul(units, arr[None, ...]), units)
    return (5.0 / 12.0) * arr - (1.0 / 12.0) * sandwiches.sum(axis=0)


def re_part_formula(x: npt.ArrayLike) -> RealVector:
    """Real part computed through the closed formula."""
    return real_part_formula_vector(x)[..., 0]


def slice_vector(a: npt.ArrayLike, b: npt.ArrayLike, j: npt.ArrayLike) -> OctVector:
    """Build ``a + J b`` in ``C_J(V)`` from two real vectors."""
    return real_embed(a) + np.multiply.outer(np.asarray(b, dtype=np.float64), j)


def pi_project(x: npt.ArrayLike, j: npt.ArrayLike) -> OctVector:
    """Project onto ``C_J(V)`` by ``x -> Re x + J Re(conj(J) x)``."""
    u = check_unit_imaginary(j)
    arr = np.asarray(x, dtype=np.float64)
    return real_embed(re_part(arr)) + np.multiply.outer(
        re_part(mul(conj(u), arr)), u
    )


def in_slice(x: npt.ArrayLike, j: npt.ArrayLike, tol: float = 1e-12) -> bool:
    """Whether ``x`` lies in ``C_J(V)`` up to ``tol`` relative to ``|x|``."""
    arr = np.asarray(x, dtype=np.float64)
    return vector_norm(arr - pi_project(arr, j)) <= tol * max(1.0, vector_norm(arr))


def re_decompose(x: npt.ArrayLike, frame: SliceFrame) -> npt.NDArray[np.float64]:
    """Split ``x = sum_i J_i x_i`` into eight real vectors.

    Returns:
        Array of shape ``(8, n)``; row ``i`` is the real vector ``x_i``.
    """
    return np.moveaxis(frame_coords(x, frame), -1, 0)


@dataclass(frozen=True, eq=False)
class RealFunctional:
    """Octonionic linear functional ``phi(x) = sum_j x_j r_j`` with real ``r``."""

    row: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        r = np.asarray(self.row, dtype=np.float64)
        if r.ndim != 1 or not np.all(np.isfinite(r)):
            raise ValidationError("RealFunctional row must be a finite real vector")
        object.__setattr__(self, "row", r)

    def __call__(self, x: npt.ArrayLike) -> npt.NDArray[np.float64]:
        return np.einsum("j,...jk->...k", self.row, x)
