"""Right para-linear operators on O^n.

An OctMatrix is a float64 array of shape ``(n, n, 8)`` acting by entrywise
left multiplication, ``T(x)_i = sum_j a_ij x_j``. This is the canonical form
of a right para-linear operator. A RealOpMatrix is an ``(8n, 8n)`` real
matrix acting on the row-major coordinate stack of an OctVector; it models
general real-linear maps such as ``R_s - T`` and its true inverse.

Most functions accept stacks of operators in leading axes.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt
import structlog

from octofc_core.exceptions import DomainError, SingularityError, ValidationError
from octofc_core.oct_core import (
    STRUCTURE,
    basis,
    left_matrix,
    mul,
    norm,
    right_matrix,
)
from octofc_core.omodule import OctVector

logger = structlog.get_logger(__name__)

type OctMatrix = npt.NDArray[np.float64]
type RealOpMatrix = npt.NDArray[np.float64]
type Side = Literal["left", "right"]

SIDES: tuple[Side, Side] = ("left", "right")

# sign of the conjugate basis unit, used by lif
_CONJ_SIGNS = np.array([1.0, -1, -1, -1, -1, -1, -1, -1])


def check_side(side: str) -> Side:
    """Validate a side tag."""
    if side not in SIDES:
        raise ValidationError(f"side must be 'left' or 'right', got {side!r}", "side")
    return side  # type: ignore[return-value]


def as_oct_matrix(value: npt.ArrayLike, location: str | None = None) -> OctMatrix:
    """Validate an ``(n, n, 8)`` array of finite octonion entries."""
    a = np.asarray(value, dtype=np.float64)
    if a.ndim != 3 or a.shape[0] != a.shape[1] or a.shape[2] != 8 or a.shape[0] < 1:  # noqa: PLR2004
        raise ValidationError(f"OctMatrix must have shape (n, n, 8), got {a.shape}", location)
    if not np.all(np.isfinite(a)):
        raise ValidationError("OctMatrix entries must be finite", location)
    return a


def dimension(t: OctMatrix) -> int:
    """Number of octonion coordinates ``n`` of the space acted on."""
    return int(t.shape[-2])


def identity(n: int) -> OctMatrix:
    """Identity OctMatrix."""
    t = np.zeros((n, n, 8))
    t[np.arange(n), np.arange(n), 0] = 1.0
    return t


def from_real(a: npt.ArrayLike, unit: int = 0) -> OctMatrix:
    """Embed a real matrix as ``a * e_unit``."""
    r = np.asarray(a, dtype=np.float64)
    return np.multiply.outer(r, basis(unit))


def left_mult_operator(q: npt.ArrayLike) -> OctMatrix:
    """``L_q`` on ``O^1``."""
    return np.asarray(q, dtype=np.float64).reshape(1, 1, 8).copy()


def diagonal(entries: Sequence[npt.ArrayLike]) -> OctMatrix:
    """Diagonal OctMatrix with the given octonion entries."""
    n = len(entries)
    t = np.zeros((n, n, 8))
    for i, q in enumerate(entries):
        t[i, i] = q
    return t


def to_coordinates(x: OctVector) -> npt.NDArray[np.float64]:
    """Flatten ``(..., n, 8)`` into the ``(..., 8n)`` coordinate stack."""
    return x.reshape(*x.shape[:-2], -1)


def from_coordinates(v: npt.NDArray[np.float64]) -> OctVector:
    """Inverse of :func:`to_coordinates`."""
    return v.reshape(*v.shape[:-1], -1, 8)


def apply(t: OctMatrix, x: OctVector) -> OctVector:
    """Apply ``T`` to ``x``: ``T(x)_i = sum_j a_ij x_j``."""
    if t.shape[-2] != x.shape[-2]:
        raise ValidationError(
            f"Dimension mismatch: operator n={t.shape[-2]}, vector n={x.shape[-2]}"
        )
    return np.einsum("...ija,...jb,abc->...ic", t, x, STRUCTURE)


def realize(t: OctMatrix) -> RealOpMatrix:
    """8n x 8n real matrix whose (i, j) block is left multiplication by a_ij."""
    n = t.shape[-2]
    blocks = left_matrix(t)
    return np.swapaxes(blocks, -3, -2).reshape(*t.shape[:-3], 8 * n, 8 * n)


def r_mult(s: npt.ArrayLike, n: int) -> RealOpMatrix:
    """Block-diagonal right multiplication ``x -> x s`` on ``O^n``."""
    r = right_matrix(s)
    out = np.zeros((*r.shape[:-2], 8 * n, 8 * n))
    for j in range(n):
        out[..., 8 * j : 8 * j + 8, 8 * j : 8 * j + 8] = r
    return out


def second_assoc(t: OctMatrix, p: npt.ArrayLike, x: OctVector) -> OctVector:
    """``B_p(T, x) = T(x) p - T(x p)``."""
    return mul(apply(t, x), p) - apply(t, mul(x, p))


def para_linear_defect(m: RealOpMatrix) -> float:
    """Largest ``|Re(M(x) p - M(x p))|`` over basis units ``p`` and basis ``x``."""
    n = m.shape[-1] // 8
    worst = 0.0
    for k in range(1, 8):
        rp = r_mult(basis(k), n)
        defect = rp @ m - m @ rp
        real_rows = defect[0::8, :]
        worst = max(worst, float(np.max(np.linalg.norm(real_rows, axis=0))))
    return worst


def is_para_linear(m: RealOpMatrix, tol: float = 1e-10) -> bool:
    """Whether a real-linear map is right para-linear within ``tol``."""
    return para_linear_defect(m) <= tol


def scalar_mul(t: OctMatrix, p: npt.ArrayLike, side: Side) -> OctMatrix:
    """The ``p (.)`` and ``(.) p`` actions: entries ``p a_ij`` or ``a_ij p``.

    ``p`` may carry leading axes matching those of ``t``.
    """
    q = np.asarray(p, dtype=np.float64)[..., None, None, :]
    if check_side(side) == "left":
        return mul(q, t)
    return mul(t, q)


def reg_compose(a: OctMatrix, b: OctMatrix) -> OctMatrix:
    """Regular composition, the octonionic matrix product ``sum_j a_ij b_jk``."""
    if a.shape[-2] != b.shape[-2]:
        raise ValidationError("Dimension mismatch in regular composition")
    return np.einsum("...ija,...jkb,abc->...ikc", a, b, STRUCTURE)


def ext_map(cols: Sequence[OctVector] | npt.NDArray[np.float64]) -> OctMatrix:
    """OctMatrix whose j-th column is the image of the real basis vector ``delta_j``."""
    images = np.asarray(cols, dtype=np.float64)
    return np.swapaxes(images, -3, -2).copy()


def restrict(t: OctMatrix) -> npt.NDArray[np.float64]:
    """Images of the real basis vectors, ``cols[j] = T(delta_j)``."""
    return np.swapaxes(t, -3, -2).copy()


def ext_from_real(m: RealOpMatrix) -> OctMatrix:
    """``ext`` of a real-linear map, read off on the real basis of ``O^n``."""
    n = m.shape[-1] // 8
    cols = m[..., :, 0::8]
    return np.moveaxis(cols.reshape(*m.shape[:-2], n, 8, n), -1, -2)


def _lif_from_real_rows(m: RealOpMatrix) -> OctMatrix:
    n = m.shape[-1] // 8
    rows = m[..., 0::8, :]
    return rows.reshape(*m.shape[:-2], n, n, 8) * _CONJ_SIGNS


def lif_map(f: RealOpMatrix, tol: float = 1e-12) -> OctMatrix:
    """``lif`` of a map into ``Re V``: entries ``b_ij = sum_k f(delta_j conj(e_k))_i e_k``.

    Raises:
        DomainError: If ``f`` has non-real output coordinates.
    """
    imaginary_rows = np.delete(f, np.s_[0::8], axis=-2)
    scale = max(1.0, float(np.max(np.abs(f))) if f.size else 1.0)
    if imaginary_rows.size and float(np.max(np.abs(imaginary_rows))) > tol * scale:
        raise DomainError("lif requires a map with values in Re V", "f")
    return _lif_from_real_rows(f)


def lif_of_real_part(m: RealOpMatrix) -> OctMatrix:
    """``lif(Re o M)`` for an arbitrary real-linear ``M``."""
    return _lif_from_real_rows(m)


def re_op(t: OctMatrix) -> OctMatrix:
    """Entrywise real part; the Re-operator of ``T``."""
    out = np.zeros_like(t)
    out[..., 0] = t[..., 0]
    return out


def singular_values(m: RealOpMatrix) -> npt.NDArray[np.float64]:
    """Singular values in decreasing order (broadcasts over stacks)."""
    return np.linalg.svd(m, compute_uv=False)


def operator_norm(t: OctMatrix) -> float:
    """Operator norm ``||T||``, the largest singular value of ``realize(T)``."""
    return float(singular_values(realize(t))[..., 0].max())


def modulus_norm(t: OctMatrix) -> float:
    """Spectral norm of the real matrix of entry moduli.

    Bounds every nested octonionic product: ``||A^(k)|| <= modulus_norm(A)^k``.
    """
    return float(np.linalg.norm(norm(t), ord=2))


def _check_invertible(m: RealOpMatrix, rel: float) -> None:
    sv = singular_values(m)
    smallest, largest = float(sv[-1]), float(sv[0])
    if smallest <= rel * max(1.0, largest):
        raise SingularityError(
            f"Operator is numerically singular (min singular value {smallest:.3e})",
            smallest,
        )


def reg_inverse(m: RealOpMatrix, side: Side, rel: float = 1e-10) -> OctMatrix:
    """Right regular inverse ``ext(M^-1 | Re V)`` or left ``lif(Re o M^-1)``.

    Raises:
        SingularityError: If the smallest singular value of ``M`` is below
            ``rel * max(1, ||M||)``.
    """
    _check_invertible(m, rel)
    inverse = np.linalg.inv(m)
    if check_side(side) == "right":
        return ext_from_real(inverse)
    return lif_of_real_part(inverse)


def reg_power(t: OctMatrix, k: int, side: Side, rel: float = 1e-10) -> OctMatrix:
    """Regular power via the realization: ``ext(R^k | Re V)`` or ``lif(Re o R^k)``.

    Negative powers factor ``realize(T)`` once and reuse the inverse.
    """
    check_side(side)
    r = realize(t)
    if k < 0:
        _check_invertible(r, rel)
        r = np.linalg.inv(r)
    powered = np.linalg.matrix_power(r, abs(k))
    if side == "right":
        return ext_from_real(powered)
    return lif_of_real_part(powered)


def matrix_power(t: OctMatrix, k: int, side: Side) -> OctMatrix:
    """Nested octonionic matrix power.

    ``right`` nests as ``A(A(...A))`` and ``left`` as ``((A A) A)...``; these
    are the regular powers ``T^{(x)k}`` and ``T^{k(x)}`` for ``k >= 0``.
    """
    if k < 0:
        raise DomainError("matrix_power requires k >= 0", "k")
    result = identity(dimension(t))
    for _ in range(k):
        result = reg_compose(t, result) if side == "right" else reg_compose(result, t)
    return result


def matrix_powers(t: OctMatrix, count: int, side: Side) -> list[OctMatrix]:
    """Nested powers ``T^0 .. T^(count-1)``."""
    powers = [identity(dimension(t))]
    for _ in range(1, count):
        prev = powers[-1]
        powers.append(reg_compose(t, prev) if side == "right" else reg_compose(prev, t))
    return powers


@dataclass(frozen=True)
class PowerAssociativity:
    """Horizon test of power-associativity."""

    ok: bool
    worst_n: int
    residual: float
    horizon: int
    sufficient_condition: str | None


def power_assoc_check(t: OctMatrix, n_max: int, tol: float = 1e-10) -> PowerAssociativity:
    """Compare ``realize(T)^n`` with ``realize(T^{(x)n})`` for ``n = 1..N``.

    Residuals are spectral norms relative to ``max(1, ||T||)^n``.
    """
    if n_max < 1:
        raise DomainError("power_assoc_check requires N >= 1", "N")
    r = realize(t)
    scale = max(1.0, float(singular_values(r)[0]))
    genuine = np.eye(r.shape[0])
    regular = identity(dimension(t))
    worst_n, worst = 1, 0.0
    for n in range(1, n_max + 1):
        genuine = r @ genuine
        regular = reg_compose(t, regular)
        residual = float(np.linalg.norm(genuine - realize(regular), ord=2)) / scale**n
        if residual > worst:
            worst_n, worst = n, residual
    result = PowerAssociativity(
        ok=worst <= tol,
        worst_n=worst_n,
        residual=worst,
        horizon=n_max,
        sufficient_condition=sufficient_condition(t),
    )
    logger.debug(
        "POWER_ASSOC_CHECKED",
        ok=result.ok,
        worst_n=worst_n,
        residual=worst,
        condition=result.sufficient_condition,
    )
    return result


@dataclass(frozen=True)
class ComponentDecomposition:
    """Real coordinate matrices ``T_0..T_7`` with ``T = sum e_i (.) T_i``."""

    components: npt.NDArray[np.float64]
    commuting: bool
    max_commutator: float


def component_decompose(t: OctMatrix, tol: float = 1e-12) -> ComponentDecomposition:
    """Split ``T`` into real component matrices and test pairwise commutation."""
    components = np.moveaxis(t, -1, 0).copy()
    scale = max(1.0, float(np.max(np.abs(components))))
    worst = 0.0
    for i in range(8):
        for j in range(i + 1, 8):
            c = components[i] @ components[j] - components[j] @ components[i]
            worst = max(worst, float(np.max(np.abs(c))) if c.size else 0.0)
    return ComponentDecomposition(
        components=components,
        commuting=worst <= tol * scale * scale,
        max_commutator=worst,
    )


def common_slice_unit(t: OctMatrix, tol: float = 1e-12) -> npt.NDArray[np.float64] | None:
    """A unit ``J`` with every entry in ``C_J``, if one exists."""
    imaginary = t[..., 1:].reshape(-1, 7)
    sizes = np.linalg.norm(imaginary, axis=1)
    if not np.any(sizes > tol):
        return None
    direction = imaginary[int(np.argmax(sizes))] / float(np.max(sizes))
    residual = imaginary - np.outer(imaginary @ direction, direction)
    if float(np.max(np.linalg.norm(residual, axis=1))) > tol * max(1.0, float(np.max(sizes))):
        return None
    return np.concatenate([[0.0], direction])


def sufficient_condition(t: OctMatrix, tol: float = 1e-12) -> str | None:
    """Name the proved sufficient condition for power-associativity that holds.

    Returns ``"real_entries"``, ``"slice_valued"``, ``"commuting_components"``
    or ``None``.
    """
    if float(np.max(np.abs(t[..., 1:]))) <= tol * max(1.0, float(np.max(np.abs(t)))):
        return "real_entries"
    if common_slice_unit(t, tol) is not None:
        return "slice_valued"
    if component_decompose(t, tol).commuting:
        return "commuting_components"
    return None
