"""Octonion arithmetic with a fixed multiplication convention.

Octonions are float64 numpy arrays of shape ``(8,)`` holding the coordinates
with respect to ``{1, e1, ..., e7}``. Every function broadcasts over leading
axes, so stacks of octonions (vector entries, matrix entries, quadrature
nodes) are multiplied in one call.

The convention is fixed by seven oriented triples ``(i, j, k)`` meaning
``e_i e_j = e_k``, together with ``e_i e_i = -1``. The full signed table is
available from :func:`multiplication_table` and is the only source of truth
for products in this package::

        |  1   e1   e2   e3   e4   e5   e6   e7
    ----+----------------------------------------
      1 |  1   e1   e2   e3   e4   e5   e6   e7
     e1 | e1   -1   e3  -e2   e5  -e4  -e7   e6
     e2 | e2  -e3   -1   e1   e6   e7  -e4  -e5
     e3 | e3   e2  -e1   -1   e7  -e6   e5  -e4
     e4 | e4  -e5  -e6  -e7   -1   e1   e2   e3
     e5 | e5   e4  -e7   e6  -e1   -1  -e3   e2
     e6 | e6   e7   e4  -e5  -e2   e3   -1  -e1
     e7 | e7  -e6   e5   e4  -e3  -e2   e1   -1
"""

from dataclasses import dataclass
from itertools import combinations
from typing import Final

import numpy as np
import numpy.typing as npt
import structlog

from octofc_core.exceptions import DomainError, ValidationError

logger = structlog.get_logger(__name__)

type Octonion = npt.NDArray[np.float64]

FANO_TRIPLES: Final[tuple[tuple[int, int, int], ...]] = (
    (1, 2, 3),
    (1, 4, 5),
    (1, 7, 6),
    (2, 4, 6),
    (2, 5, 7),
    (3, 4, 7),
    (3, 6, 5),
)

UNIT_TOL: Final = 1e-12


def _build_structure_constants() -> npt.NDArray[np.float64]:
    # C[i, j, k] is the coefficient of e_k in e_i e_j.
    c = np.zeros((8, 8, 8))
    for i in range(8):
        c[0, i, i] = 1.0
        c[i, 0, i] = 1.0
    for i in range(1, 8):
        c[i, i, 0] = -1.0
    for a, b, d in FANO_TRIPLES:
        for x, y, z in ((a, b, d), (b, d, a), (d, a, b)):
            c[x, y, z] = 1.0
            c[y, x, z] = -1.0
    c.setflags(write=False)
    return c


STRUCTURE: Final = _build_structure_constants()

_CONJ_SIGNS: Final = np.array([1.0, -1, -1, -1, -1, -1, -1, -1])


def multiplication_table() -> npt.NDArray[np.int64]:
    """Return the signed index table of basis products.

    Entry ``[i, j]`` is ``s * (k + 1)`` where ``e_i e_j = s * e_k``.
    """
    table = np.zeros((8, 8), dtype=np.int64)
    for i in range(8):
        for j in range(8):
            (k,) = np.flatnonzero(STRUCTURE[i, j])
            table[i, j] = int(STRUCTURE[i, j, k]) * (k + 1)
    return table


def fano_closure_check() -> bool:
    """Verify the triple list and the closure of the basis product table.

    Each unordered pair of distinct imaginary indices must lie in exactly one
    triple, and every basis product must be plus or minus one basis element.
    """
    pairs = [frozenset(p) for t in FANO_TRIPLES for p in combinations(t, 2)]
    all_pairs = {frozenset(p) for p in combinations(range(1, 8), 2)}
    if len(pairs) != len(all_pairs) or set(pairs) != all_pairs:
        return False
    nonzero = np.count_nonzero(STRUCTURE, axis=2)
    values = STRUCTURE[STRUCTURE != 0]
    return bool(np.all(nonzero == 1) and np.all(np.abs(values) == 1.0))


def basis(i: int) -> Octonion:
    """Return the basis element ``e_i`` (``e_0 = 1``)."""
    if not 0 <= i < 8:  # noqa: PLR2004
        raise DomainError(f"Basis index must be in 0..7, got {i}", "i")
    e = np.zeros(8)
    e[i] = 1.0
    return e


def octonion(*coords: float) -> Octonion:
    """Build an octonion from up to eight leading coordinates."""
    if len(coords) > 8:  # noqa: PLR2004
        raise ValidationError("An octonion has at most 8 coordinates")
    x = np.zeros(8)
    x[: len(coords)] = coords
    return as_octonion(x)


def as_octonion(value: npt.ArrayLike, location: str | None = None) -> Octonion:
    """Validate and convert a value into an octonion array."""
    x = np.asarray(value, dtype=np.float64)
    if x.shape != (8,):
        raise ValidationError(
            f"Octonion must have 8 coordinates, got shape {x.shape}", location
        )
    if not np.all(np.isfinite(x)):
        raise ValidationError("Octonion coordinates must be finite", location)
    return x


def mul(a: npt.ArrayLike, b: npt.ArrayLike) -> Octonion:
    """Multiply octonions, broadcasting over leading axes."""
    return np.einsum("...i,...j,ijk->...k", a, b, STRUCTURE)


def conj(x: npt.ArrayLike) -> Octonion:
    """Octonion conjugate."""
    return np.asarray(x, dtype=np.float64) * _CONJ_SIGNS


def norm(x: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Euclidean norm over the last axis."""
    return np.linalg.norm(np.asarray(x, dtype=np.float64), axis=-1)


def inv(x: npt.ArrayLike) -> Octonion:
    """Multiplicative inverse ``conj(x) / |x|^2``."""
    arr = np.asarray(x, dtype=np.float64)
    n2 = np.sum(arr * arr, axis=-1, keepdims=True)
    if np.any(n2 <= np.finfo(np.float64).tiny):
        raise DomainError("Zero octonion has no inverse", "x")
    return conj(arr) / n2


def real(x: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Real coordinate."""
    return np.asarray(x, dtype=np.float64)[..., 0]


def imag(x: npt.ArrayLike) -> Octonion:
    """Imaginary part as an octonion."""
    out = np.array(x, dtype=np.float64)
    out[..., 0] = 0.0
    return out


def inner(a: npt.ArrayLike, b: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Euclidean inner product of coordinates, equal to ``Re(a conj(b))``."""
    return np.sum(np.asarray(a) * np.asarray(b), axis=-1)


def power(x: npt.ArrayLike, k: int) -> Octonion:
    """Integer power; well defined since octonions are power-associative."""
    base = np.asarray(x, dtype=np.float64)
    if k < 0:
        return power(inv(base), -k)
    result = np.broadcast_to(basis(0), base.shape).copy()
    for _ in range(k):
        result = mul(result, base)
    return result


def associator(x: npt.ArrayLike, y: npt.ArrayLike, z: npt.ArrayLike) -> Octonion:
    """``(xy)z - x(yz)``."""
    return mul(mul(x, y), z) - mul(x, mul(y, z))


def commutator(x: npt.ArrayLike, y: npt.ArrayLike) -> Octonion:
    """``xy - yx``."""
    return mul(x, y) - mul(y, x)


def left_matrix(a: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """8x8 real matrix of ``x -> a x`` (broadcasts over leading axes)."""
    return np.einsum("...i,ijk->...kj", a, STRUCTURE)


def right_matrix(b: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """8x8 real matrix of ``x -> x b`` (broadcasts over leading axes)."""
    return np.einsum("...j,ijk->...ki", b, STRUCTURE)


@dataclass(frozen=True)
class IdentityResiduals:
    """Norms of the defects of the Moufang and five-term identities."""

    moufang1: float
    moufang2: float
    moufang3: float
    five_term: float

    def max(self) -> float:
        """Largest of the four residuals."""
        return max(self.moufang1, self.moufang2, self.moufang3, self.five_term)


def identity_residuals(
    x: npt.ArrayLike, y: npt.ArrayLike, z: npt.ArrayLike, w: npt.ArrayLike
) -> IdentityResiduals:
    """Evaluate the Moufang identities and the five-term associator identity.

    The checked identities are ``((xy)x)z = x(y(xz))``,
    ``((zx)y)x = z((xy)x)``, ``(xy)(zx) = x((yz)x)`` and
    ``[xy,z,w] - [x,yz,w] + [x,y,zw] = x[y,z,w] + [x,y,z]w``.
    """
    xyx = mul(mul(x, y), x)
    m1 = mul(xyx, z) - mul(x, mul(y, mul(x, z)))
    m2 = mul(mul(mul(z, x), y), x) - mul(z, xyx)
    m3 = mul(mul(x, y), mul(z, x)) - mul(x, mul(mul(y, z), x))
    lhs = (
        associator(mul(x, y), z, w)
        - associator(x, mul(y, z), w)
        + associator(x, y, mul(z, w))
    )
    rhs = mul(x, associator(y, z, w)) + mul(associator(x, y, z), w)
    return IdentityResiduals(
        moufang1=float(np.max(norm(m1))),
        moufang2=float(np.max(norm(m2))),
        moufang3=float(np.max(norm(m3))),
        five_term=float(np.max(norm(lhs - rhs))),
    )


def random_octonions(
    rng: np.random.Generator, count: int, *, unit: bool = False
) -> npt.NDArray[np.float64]:
    """Draw ``count`` Gaussian octonions, optionally normalized."""
    x = rng.standard_normal((count, 8))
    if unit:
        x /= norm(x)[:, None]
    return x


def random_unit_imaginary(rng: np.random.Generator) -> Octonion:
    """Draw a uniformly distributed imaginary unit."""
    v = rng.standard_normal(8)
    v[0] = 0.0
    return v / np.linalg.norm(v)


def check_unit_imaginary(j: npt.ArrayLike, tol: float = UNIT_TOL) -> Octonion:
    """Validate an imaginary unit and return it renormalized.

    Raises:
        DomainError: If ``j`` has a real part or is not of unit norm.
    """
    u = np.asarray(j, dtype=np.float64)
    if u.shape != (8,) or not np.all(np.isfinite(u)):
        raise DomainError("Imaginary unit must be 8 finite coordinates", "J")
    if abs(u[0]) > tol or abs(float(np.linalg.norm(u)) - 1.0) > tol:
        raise DomainError(
            f"J must be a unit imaginary octonion (Re J = {u[0]:.3g}, "
            f"|J| = {np.linalg.norm(u):.15g})",
            "J",
        )
    u = imag(u)
    return u / np.linalg.norm(u)


@dataclass(frozen=True, eq=False)
class SliceFrame:
    """Standard orthonormal basis ``{1, J1, ..., J7}`` attached to ``J = J4``.

    ``units`` holds the eight basis octonions as rows.
    """

    units: npt.NDArray[np.float64]

    @property
    def j(self) -> Octonion:
        return self.units[4]

    def __getitem__(self, i: int) -> Octonion:
        return self.units[i]


def _orthogonal_remainder(
    candidates: npt.NDArray[np.float64], against: list[Octonion]
) -> Octonion:
    # First standard unit whose component orthogonal to ``against`` is
    # bounded away from zero; at least one has norm >= 0.5.
    for e in candidates:
        r = e - sum(np.dot(e, u) * u for u in against)
        size = float(np.linalg.norm(r))
        if size >= 0.5:  # noqa: PLR2004
            return r / size
    raise DomainError("No standard unit left to complete the frame", "J")  # pragma: no cover


def make_slice_frame(j: npt.ArrayLike, tol: float = UNIT_TOL) -> SliceFrame:
    """Build the deterministic standard frame related to ``J``.

    ``J1`` is the first ``e_k`` with its projection on ``{1, J}`` removed and
    ``J2`` the first ``e_k`` with its projection on ``{1, J, J1, J1 J}``
    removed; the remaining units follow from ``J3 = J1 J2``,
    ``J5 = J1 J``, ``J6 = J2 J`` and ``J7 = (J1 J2) J``.

    Raises:
        DomainError: If ``j`` is not a unit imaginary octonion or the frame
            fails its invariants.
    """
    u = check_unit_imaginary(j, tol)
    imaginary_units = np.eye(8)[1:]
    j1 = _orthogonal_remainder(imaginary_units, [basis(0), u])
    j2 = _orthogonal_remainder(imaginary_units, [basis(0), u, j1, mul(j1, u)])
    j3 = mul(j1, j2)
    units = np.stack(
        [basis(0), j1, j2, j3, u, mul(j1, u), mul(j2, u), mul(j3, u)],
    )
    frame = SliceFrame(units=units)
    frame.units.setflags(write=False)
    defect = frame_defect(frame)
    if defect > tol * 100:
        raise DomainError(f"Slice frame violates its invariants ({defect:.3g})", "J")
    return frame


def frame_defect(frame: SliceFrame) -> float:
    """Largest deviation of a frame from orthonormality and the standard table."""
    units = frame.units
    gram = units @ units.T
    ortho = float(np.max(np.abs(gram - np.eye(8))))
    products = mul(units[:, None, :], units[None, :, :])
    expected = np.einsum("ijk,kl->ijl", STRUCTURE, units)
    table = float(np.max(np.abs(products - expected)))
    return max(ortho, table)


def frame_coords(x: npt.ArrayLike, frame: SliceFrame) -> npt.NDArray[np.float64]:
    """Coordinates of ``x`` with respect to the frame (broadcasts)."""
    return np.einsum("...i,ki->...k", x, frame.units)


def from_frame_coords(
    coords: npt.ArrayLike, frame: SliceFrame
) -> npt.NDArray[np.float64]:
    """Inverse of :func:`frame_coords`."""
    return np.einsum("...k,ki->...i", coords, frame.units)
