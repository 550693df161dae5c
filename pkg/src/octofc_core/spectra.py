"""Resolvents, resolvent series and pull-back / push-forward spectra.

Points of a slice ``C_J`` are handled as :class:`SlicePoint` values. Grid
scans evaluate chunks of points as numpy stacks on a thread pool; the result
does not depend on the thread count.
"""

import math
from collections.abc import Iterator
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import numpy.typing as npt
import structlog

from octofc_core.config import Tolerances, default_tolerances
from octofc_core.exceptions import DomainError, SingularityError, ValidationError
from octofc_core.oct_core import (
    Octonion,
    check_unit_imaginary,
    conj,
    imag,
    inv,
    mul,
    norm,
    power,
)
from octofc_core.omodule import (
    OctVector,
    RealFunctional,
    in_slice,
    pi_project,
    real_embed,
    vector_norm,
)
from octofc_core.paralin import (
    OctMatrix,
    RealOpMatrix,
    Side,
    apply,
    check_side,
    dimension,
    matrix_powers,
    modulus_norm,
    operator_norm,
    power_assoc_check,
    r_mult,
    realize,
    reg_compose,
    reg_inverse,
    scalar_mul,
    singular_values,
    to_coordinates,
)
from octofc_core.parallel import chunk_ranges, ordered_map

logger = structlog.get_logger(__name__)

type SpectrumKind = Literal["pullback", "pushforward"]
type PowerKind = Literal["extendable", "liftable"]

KINDS: tuple[SpectrumKind, SpectrumKind] = ("pullback", "pushforward")
_SCAN_CHUNK = 512
# a_{m,n} below 2**53 is exact as a float
EXACT_LOG_LIMIT = 53 * math.log(2.0)
# exp underflows to 0.0 below this
MIN_LOG_WEIGHT = -745.0


def check_kind(kind: str) -> SpectrumKind:
    """Validate a spectrum kind."""
    if kind not in KINDS:
        raise ValidationError(
            f"kind must be 'pullback' or 'pushforward', got {kind!r}", "kind"
        )
    return kind  # type: ignore[return-value]


@dataclass(frozen=True, eq=False)
class SlicePoint:
    """The point ``s = x + y J`` of the slice ``C_J`` with ``y >= 0``."""

    x: float
    y: float
    j: Octonion

    def __post_init__(self) -> None:
        unit = check_unit_imaginary(self.j)
        if self.y < 0:
            object.__setattr__(self, "y", -self.y)
            unit = -unit
        object.__setattr__(self, "j", unit)

    @classmethod
    def from_octonion(cls, s: npt.ArrayLike, default_j: npt.ArrayLike) -> "SlicePoint":
        """Place an octonion on its slice; real points use ``default_j``."""
        q = np.asarray(s, dtype=np.float64)
        im = imag(q)
        size = float(np.linalg.norm(im))
        if size == 0.0:
            return cls(float(q[0]), 0.0, np.asarray(default_j, dtype=np.float64))
        return cls(float(q[0]), size, im / size)

    @property
    def value(self) -> Octonion:
        out = self.y * self.j
        out[0] += self.x
        return out

    @property
    def modulus(self) -> float:
        return math.hypot(self.x, self.y)


@dataclass(frozen=True)
class SphereSet:
    """The sphere ``[q] = {re + im_norm I : I unit imaginary}``."""

    re: float
    im_norm: float

    def __post_init__(self) -> None:
        if self.im_norm < 0:
            raise DomainError("im_norm must be non-negative", "im_norm")

    @classmethod
    def of(cls, q: npt.ArrayLike) -> "SphereSet":
        arr = np.asarray(q, dtype=np.float64)
        return cls(float(arr[0]), float(np.linalg.norm(arr[1:])))

    def distance(self, s: npt.ArrayLike) -> float:
        """Distance in the half-plane from ``[s]`` to this sphere."""
        other = SphereSet.of(s)
        return math.hypot(self.re - other.re, self.im_norm - other.im_norm)

    def contains(self, s: npt.ArrayLike, tol: float = 1e-12) -> bool:
        return self.distance(s) <= tol * (1.0 + abs(self.re) + self.im_norm)


@dataclass(frozen=True)
class ResolventSample:
    """Resolvent diagnostics at one slice point."""

    point: SlicePoint
    min_sv: float
    invertible: bool
    extendable: bool
    liftable: bool
    in_pullback: bool
    in_pushforward: bool

    def in_resolvent(self, kind: SpectrumKind) -> bool:
        return self.in_pullback if kind == "pullback" else self.in_pushforward


@dataclass(frozen=True)
class GridSpec:
    """Rectangular grid over the ``(x, y)`` coordinates of a slice."""

    xmin: float
    xmax: float
    ymin: float
    ymax: float
    resolution: int

    def __post_init__(self) -> None:
        bounds = (self.xmin, self.xmax, self.ymin, self.ymax)
        if not all(math.isfinite(b) for b in bounds):
            raise ValidationError("Grid bounds must be finite", "grid")
        if self.xmax <= self.xmin or self.ymax <= self.ymin:
            raise ValidationError("Grid bounds must satisfy min < max", "grid")
        if self.resolution < 2:  # noqa: PLR2004
            raise ValidationError("Grid resolution must be at least 2", "res")

    @property
    def xs(self) -> npt.NDArray[np.float64]:
        return np.linspace(self.xmin, self.xmax, self.resolution)

    @property
    def ys(self) -> npt.NDArray[np.float64]:
        return np.linspace(self.ymin, self.ymax, self.resolution)

    @property
    def cell_diagonal(self) -> float:
        steps = self.resolution - 1
        return math.hypot(
            (self.xmax - self.xmin) / steps, (self.ymax - self.ymin) / steps
        )


@dataclass(frozen=True)
class FlaggedRegion:
    """A 4-connected group of flagged grid points."""

    size: int
    centroid: tuple[float, float]
    bbox: tuple[float, float, float, float]


@dataclass(frozen=True, eq=False)
class ScanGrid:
    """Membership samples over a slice grid.

    Arrays are indexed ``[iy, ix]``.
    """

    spec: GridSpec
    j: Octonion
    kind: SpectrumKind
    horizon: int
    operator_norm: float
    power_associative: bool
    min_sv: npt.NDArray[np.float64]
    invertible: npt.NDArray[np.bool_]
    extendable: npt.NDArray[np.bool_]
    liftable: npt.NDArray[np.bool_]
    flagged: npt.NDArray[np.bool_] = field(init=False)

    def __post_init__(self) -> None:
        in_pullback = self.invertible & self.extendable
        in_pushforward = self.invertible & self.liftable
        resolvent = in_pullback if self.kind == "pullback" else in_pushforward
        near = self.min_sv <= 0.5 * self.spec.cell_diagonal * (1.0 + 1e-9)
        object.__setattr__(self, "flagged", ~resolvent | near)

    @property
    def in_pullback(self) -> npt.NDArray[np.bool_]:
        return self.invertible & self.extendable

    @property
    def in_pushforward(self) -> npt.NDArray[np.bool_]:
        return self.invertible & self.liftable

    def flagged_points(self) -> list[tuple[float, float]]:
        """Coordinates ``(x, y)`` of flagged grid points."""
        iy, ix = np.nonzero(self.flagged)
        xs, ys = self.spec.xs, self.spec.ys
        return [(float(xs[i]), float(ys[k])) for k, i in zip(iy, ix, strict=True)]

    @property
    def outer_violations(self) -> int:
        """Flagged points beyond the norm bound ``|s| > ||T||``."""
        xs, ys = np.meshgrid(self.spec.xs, self.spec.ys)
        radius = np.hypot(xs, ys)
        beyond = radius > self.operator_norm + 0.5 * self.spec.cell_diagonal
        resolvent = self.in_pullback if self.kind == "pullback" else self.in_pushforward
        return int(np.count_nonzero(beyond & ~resolvent))

    def flagged_regions(self) -> list[FlaggedRegion]:
        """Group flagged points into 4-connected regions."""
        seen = np.zeros_like(self.flagged)
        xs, ys = self.spec.xs, self.spec.ys
        rows, cols = self.flagged.shape
        regions = []
        for start in zip(*np.nonzero(self.flagged), strict=True):
            if seen[start]:
                continue
            stack, members = [start], []
            seen[start] = True
            while stack:
                r, c = stack.pop()
                members.append((r, c))
                for nr, nc in ((r + 1, c), (r - 1, c), (r, c + 1), (r, c - 1)):
                    inside = 0 <= nr < rows and 0 <= nc < cols
                    if inside and self.flagged[nr, nc] and not seen[nr, nc]:
                        seen[nr, nc] = True
                        stack.append((nr, nc))
            px = np.array([xs[c] for _, c in members])
            py = np.array([ys[r] for r, _ in members])
            regions.append(
                FlaggedRegion(
                    size=len(members),
                    centroid=(float(px.mean()), float(py.mean())),
                    bbox=(
                        float(px.min()),
                        float(px.max()),
                        float(py.min()),
                        float(py.max()),
                    ),
                )
            )
        return regions

    def rows(self) -> Iterator[tuple[float, float, float, bool, bool, bool, bool, bool]]:
        """Rows in CSV column order, x varying fastest."""
        for iy, y in enumerate(self.spec.ys):
            for ix, x in enumerate(self.spec.xs):
                yield (
                    float(x),
                    float(y),
                    float(self.min_sv[iy, ix]),
                    bool(self.invertible[iy, ix]),
                    bool(self.extendable[iy, ix]),
                    bool(self.liftable[iy, ix]),
                    bool(self.in_pullback[iy, ix]),
                    bool(self.in_pushforward[iy, ix]),
                )


def slice_octonions(
    x: npt.ArrayLike, y: npt.ArrayLike, j: npt.ArrayLike
) -> npt.NDArray[np.float64]:
    """Stack of octonions ``x + y J`` for broadcast coordinate arrays."""
    xa, ya = np.broadcast_arrays(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))
    out = np.multiply.outer(ya, np.asarray(j, dtype=np.float64))
    out[..., 0] += xa
    return out


def rs_minus_t(t: OctMatrix, s: SlicePoint | npt.ArrayLike) -> RealOpMatrix:
    """``R_s - T`` as a real operator; ``s`` may be a stack of octonions."""
    value = s.value if isinstance(s, SlicePoint) else np.asarray(s, dtype=np.float64)
    return r_mult(value, dimension(t)) - realize(t)


def det_rs_minus_lq(q: npt.ArrayLike, s: npt.ArrayLike) -> float:
    """Closed-form determinant of ``R_s - L_q`` on ``O``."""
    qa, sa = np.asarray(q, dtype=np.float64), np.asarray(s, dtype=np.float64)
    dre = qa[0] - sa[0]
    im_q, im_s = float(np.linalg.norm(qa[1:])), float(np.linalg.norm(sa[1:]))
    far = float(norm(qa - conj(sa)))
    return far**4 * (dre**2 + (im_q + im_s) ** 2) * (dre**2 + (im_q - im_s) ** 2)


def min_singular_value(m: RealOpMatrix) -> npt.NDArray[np.float64] | float:
    """Smallest singular value (broadcasts over stacks)."""
    sv = singular_values(m)[..., -1]
    return float(sv) if np.ndim(sv) == 0 else sv


def singularity_threshold(s_abs: float, norm_t: float, rel: float = 1e-8) -> float:
    """Scale-aware threshold ``rel * (1 + |s| + ||T||)`` on the min singular value."""
    return rel * (1.0 + s_abs + norm_t)


def _power_defects(
    m: npt.NDArray[np.float64], j: Octonion, n_max: int
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    # Worst extendable / liftable residuals of normalized powers, per stack item.
    n = m.shape[-1] // 8
    scale = singular_values(m)[..., 0]
    m_hat = m / np.maximum(scale, np.finfo(np.float64).tiny)[..., None, None]
    rj = r_mult(j, n)
    current = np.broadcast_to(np.eye(8 * n), m.shape).copy()
    ext = np.zeros(m.shape[:-2])
    lift = np.zeros(m.shape[:-2])
    for _ in range(n_max):
        current = m_hat @ current
        comm = current @ rj - rj @ current
        ext = np.maximum(ext, np.linalg.norm(comm[..., :, 0::8], axis=-2).max(axis=-1))
        lift = np.maximum(lift, np.linalg.norm(comm[..., 0::8, :], axis=-2).max(axis=-1))
    return ext, lift


def slice_pa_test(
    m: RealOpMatrix,
    j: npt.ArrayLike,
    kind: PowerKind,
    n_max: int,
    tol: float = 1e-8,
) -> bool:
    """Horizon test of C_J-extendable or C_J-liftable power-associativity.

    Powers of ``M / ||M||`` are compared for ``n = 1..N``: extendable checks
    ``M^n(v J) = M^n(v) J`` on the real basis, liftable checks
    ``Re M^n(v J) = Re(M^n(v) J)`` on all coordinate vectors. A passing result
    means "tested to N", not certified.
    """
    if n_max < 1:
        raise DomainError("slice_pa_test requires N >= 1", "N")
    unit = check_unit_imaginary(j)
    ext, lift = _power_defects(np.asarray(m, dtype=np.float64), unit, n_max)
    if kind == "extendable":
        return bool(ext <= tol)
    if kind == "liftable":
        return bool(lift <= tol)
    raise ValidationError(f"kind must be 'extendable' or 'liftable', got {kind!r}", "kind")


def _membership_batch(
    t: OctMatrix,
    values: npt.NDArray[np.float64],
    j: Octonion,
    n_max: int,
    tolerances: Tolerances,
    norm_t: float,
) -> tuple[npt.NDArray[np.float64], ...]:
    m = rs_minus_t(t, values)
    min_sv = singular_values(m)[..., -1]
    s_abs = np.linalg.norm(values, axis=-1)
    invertible = min_sv > tolerances.singular_rel * (1.0 + s_abs + norm_t)
    ext = np.zeros(values.shape[:-1], dtype=bool)
    lift = np.zeros(values.shape[:-1], dtype=bool)
    if np.any(invertible):
        inverses = np.linalg.inv(m[invertible])
        ext_res, lift_res = _power_defects(inverses, j, n_max)
        ext[invertible] = ext_res <= tolerances.pa_tol
        lift[invertible] = lift_res <= tolerances.pa_tol
    return min_sv, invertible, ext, lift


def membership(
    t: OctMatrix,
    s: SlicePoint,
    kind: SpectrumKind = "pullback",
    n_max: int | None = None,
    tolerances: Tolerances | None = None,
) -> ResolventSample:
    """Decide membership of ``s`` in the pull-back and push-forward resolvent sets.

    Both flags are always filled; ``kind`` only labels which resolvent set
    the caller is interested in.
    """
    check_kind(kind)
    tol = tolerances or default_tolerances()
    horizon = n_max or tol.pa_horizon
    min_sv, invertible, ext, lift = _membership_batch(
        t, s.value[None, :], s.j, horizon, tol, operator_norm(t)
    )
    sample = ResolventSample(
        point=s,
        min_sv=float(min_sv[0]),
        invertible=bool(invertible[0]),
        extendable=bool(ext[0]),
        liftable=bool(lift[0]),
        in_pullback=bool(invertible[0] and ext[0]),
        in_pushforward=bool(invertible[0] and lift[0]),
    )
    logger.debug(
        "MEMBERSHIP_EVALUATED",
        x=s.x,
        y=s.y,
        min_sv=sample.min_sv,
        in_pullback=sample.in_pullback,
        in_pushforward=sample.in_pushforward,
    )
    return sample


def scan_slice(
    t: OctMatrix,
    j: npt.ArrayLike,
    grid: GridSpec,
    kind: SpectrumKind = "pullback",
    n_max: int | None = None,
    tolerances: Tolerances | None = None,
    threads: int | None = None,
) -> ScanGrid:
    """Sample resolvent membership over a grid of ``C_J``.

    Grid coordinates with ``y < 0`` describe the points ``x + y J``, which lie
    in the same slice plane.
    """
    check_kind(kind)
    unit = check_unit_imaginary(j)
    tol = tolerances or default_tolerances()
    horizon = n_max or tol.pa_horizon
    norm_t = operator_norm(t)
    xs, ys = np.meshgrid(grid.xs, grid.ys)
    values = slice_octonions(xs.ravel(), ys.ravel(), unit)

    def evaluate(bounds: tuple[int, int]) -> tuple[npt.NDArray[np.float64], ...]:
        start, stop = bounds
        return _membership_batch(t, values[start:stop], unit, horizon, tol, norm_t)

    chunks = ordered_map(evaluate, chunk_ranges(len(values), _SCAN_CHUNK), threads)
    shape = xs.shape
    min_sv, invertible, ext, lift = (
        np.concatenate([c[k] for c in chunks]).reshape(shape) for k in range(4)
    )
    pa_ok = bool(_is_power_associative(t, horizon, tol))
    result = ScanGrid(
        spec=grid,
        j=unit,
        kind=kind,
        horizon=horizon,
        operator_norm=norm_t,
        power_associative=pa_ok,
        min_sv=min_sv,
        invertible=invertible,
        extendable=ext,
        liftable=lift,
    )
    violations = result.outer_violations
    if pa_ok and violations:
        logger.warning("SCAN_NORM_BOUND_VIOLATED", points=violations, norm=norm_t)
    logger.info(
        "SCAN_SLICE_COMPLETED",
        points=int(min_sv.size),
        flagged=int(np.count_nonzero(result.flagged)),
        kind=kind,
        horizon=horizon,
    )
    return result


def _is_power_associative(t: OctMatrix, horizon: int, tol: Tolerances) -> bool:
    return power_assoc_check(t, horizon, tol.para_linear_tol).ok


def series_tail_bound(norm_t: float, s_abs: float, n_terms: int) -> float:
    """Geometric tail ``(||T|| / |s|)^(N+1) / (|s| - ||T||)``; infinite if divergent."""
    if s_abs <= norm_t:
        return math.inf
    return (norm_t / s_abs) ** (n_terms + 1) / (s_abs - norm_t)


def terms_for_tolerance(norm_t: float, s_abs: float, tol: float, cap: int = 10_000) -> int:
    """Smallest ``N`` whose geometric tail bound is below ``tol``."""
    if s_abs <= norm_t:
        raise DomainError("Series does not converge for |s| <= ||T||", "s")
    if norm_t == 0.0:
        return 0
    for n in range(cap + 1):
        if series_tail_bound(norm_t, s_abs, n) <= tol:
            return n
    return cap


def _check_series_point(t: OctMatrix, s: SlicePoint) -> tuple[float, float]:
    s_abs = s.modulus
    if s_abs == 0.0:
        raise DomainError("Resolvent series is undefined at s = 0", "s")
    norm_t = operator_norm(t)
    if s_abs <= norm_t:
        logger.warning("RESOLVENT_SERIES_NOT_CONVERGENT", s_abs=s_abs, norm=norm_t)
    return s_abs, norm_t


def _inverse_powers(s: Octonion, count: int, offset: int = 1) -> npt.NDArray[np.float64]:
    # s^(-offset-n) for n = 0..count-1
    s_inv = inv(s)
    first = power(s_inv, offset)
    out = [first]
    for _ in range(1, count):
        out.append(mul(out[-1], s_inv))
    return np.stack(out)


def resolvent_series(t: OctMatrix, s: SlicePoint, side: Side, n_terms: int) -> OctMatrix:
    """Truncated resolvent series.

    ``right``: ``sum_n T^{(x)n} (.) s^(-1-n)``; ``left``:
    ``sum_n s^(-1-n) (.) T^{n(x)}`` for ``n = 0..N``.
    """
    check_side(side)
    _check_series_point(t, s)
    powers = matrix_powers(t, n_terms + 1, side)
    coeffs = _inverse_powers(s.value, n_terms + 1)
    total = np.zeros_like(t)
    for pw, c in zip(powers, coeffs, strict=True):
        total = total + scalar_mul(pw, c, side)
    return total


@dataclass(frozen=True)
class SeriesResidual:
    """Defects of the general resolvent series identities."""

    alpha_res: float
    beta_res: float
    tail: float
    alpha_norm: float
    beta_norm: float


def series_residual_general(
    t: OctMatrix, s: SlicePoint, x: OctVector, n_terms: int
) -> SeriesResidual:
    """Check the resolvent series identities with their associator corrections.

    The alpha identity is ``(R_s - T) sum_n (T^{(x)n} (.) s^(-1-n))(x) = x + alpha``
    with ``alpha = sum_n [T, T^{(x)n}, x s^(-1-n)]`` for ``x`` in ``C_J(V)``.
    The beta identity is
    ``pi_J sum_n (s^(-1-n) (.) T^{n(x)})((R_s - T) x) = pi_J x + beta`` with
    ``beta = sum_n pi_J([T^{n(x)}, T, x]) s^(-1-n)``. Both residuals are bounded
    by ``tail``, computed from the modulus norm of ``T``.
    """
    _check_series_point(t, s)
    if not in_slice(x, s.j):
        raise DomainError("alpha identity requires x in C_J(V)", "x")
    coeffs = _inverse_powers(s.value, n_terms + 1)
    n = dimension(t)
    right_powers = matrix_powers(t, n_terms + 1, "right")
    left_powers = matrix_powers(t, n_terms + 1, "left")
    m = rs_minus_t(t, s)

    series_x = np.zeros_like(x)
    alpha = np.zeros_like(x)
    for pw, c in zip(right_powers, coeffs, strict=True):
        y = mul(x, c)
        series_x = series_x + apply(scalar_mul(pw, c, "right"), x)
        alpha = alpha + apply(reg_compose(t, pw), y) - apply(t, apply(pw, y))
    lhs = (m @ to_coordinates(series_x)).reshape(n, 8)
    alpha_res = vector_norm(lhs - x - alpha)

    z = (m @ to_coordinates(x)).reshape(n, 8)
    lhs_beta = np.zeros_like(x)
    beta = np.zeros_like(x)
    for pw, c in zip(left_powers, coeffs, strict=True):
        lhs_beta = lhs_beta + apply(scalar_mul(pw, c, "left"), z)
        assoc = apply(reg_compose(pw, t), x) - apply(pw, apply(t, x))
        beta = beta + mul(pi_project(assoc, s.j), c)
    beta_res = vector_norm(pi_project(lhs_beta, s.j) - pi_project(x, s.j) - beta)

    nu = modulus_norm(t)
    s_abs = s.modulus
    tail = (
        math.inf
        if s_abs <= nu
        else (nu / s_abs) ** (n_terms + 1) * vector_norm(x) * s_abs / (s_abs - nu)
    )
    return SeriesResidual(
        alpha_res=alpha_res,
        beta_res=beta_res,
        tail=tail,
        alpha_norm=vector_norm(alpha),
        beta_norm=vector_norm(beta),
    )


def amn(m: int, n: int) -> int:
    """Binomial coefficient ``a_{m,n} = C(m+n-1, m-1)``."""
    if m < 1 or n < 0:
        raise DomainError("amn requires m >= 1 and n >= 0", "m")
    return math.comb(m + n - 1, m - 1)


def log_amn(m: int, n: int) -> float:
    """Natural log of ``a_{m,n}``.

    Exact while ``a_{m,n} < 2**53``; beyond that the lgamma form is used and
    carries a relative error of about ``1e-16 * log a_{m,n}``.
    """
    if m < 1 or n < 0:
        raise DomainError("amn requires m >= 1 and n >= 0", "m")
    approx = math.lgamma(m + n) - math.lgamma(m) - math.lgamma(n + 1)
    if approx < EXACT_LOG_LIMIT:
        return math.log(amn(m, n))
    return approx


def slice_basis(n: int, j: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Coordinate columns of the real basis of ``C_J(V)``: ``delta_k``, ``delta_k J``."""
    cols = np.zeros((8 * n, 2 * n))
    unit = np.asarray(j, dtype=np.float64)
    for k in range(n):
        cols[8 * k, k] = 1.0
        cols[8 * k : 8 * k + 8, n + k] = unit
    return cols


def binom_resolvent_power(
    t: OctMatrix, s: SlicePoint, m: int, n_terms: int
) -> npt.NDArray[np.float64]:
    """Truncated ``sum_n a_{m,n} T^n R_s^(-m-n)`` applied to the basis of ``C_J(V)``.

    Returns:
        ``(8n, 2n)`` matrix of images of :func:`slice_basis` columns.
    """
    if m < 1:
        raise DomainError("binom_resolvent_power requires m >= 1", "m")
    _check_series_point(t, s)
    n = dimension(t)
    r = realize(t)
    w = slice_basis(n, s.j)
    # Terms are a_{m,k} |s|^(-m-k) ||T||^k (T/||T||)^k R_{u^(m+k)} with the
    # unit u = s^-1 / |s^-1|; the scalar weight is formed in log space.
    norm_t = float(singular_values(r)[0])
    t_hat = r / norm_t if norm_t > 0.0 else r
    log_t = math.log(norm_t) if norm_t > 0.0 else 0.0
    log_s = math.log(s.modulus)
    u = conj(s.value) / s.modulus
    u_power = power(u, m)
    total = np.zeros_like(w)
    t_power = np.eye(8 * n)
    lossy_from = None
    for k in range(n_terms + 1):
        log_a = log_amn(m, k)
        if lossy_from is None and log_a >= EXACT_LOG_LIMIT:
            lossy_from = k
        log_weight = log_a - (m + k) * log_s + k * log_t
        if log_weight > MIN_LOG_WEIGHT:
            total += math.exp(log_weight) * (t_power @ (r_mult(u_power, n) @ w))
        t_power = t_hat @ t_power
        u_power = mul(u_power, u)
    if lossy_from is not None:
        logger.debug("BINOMIAL_FLOAT_EVALUATION", m=m, from_term=lossy_from)
    return total


def dense_resolvent_power(t: OctMatrix, s: SlicePoint, m: int) -> npt.NDArray[np.float64]:
    """``(R_s - T)^(-m)`` applied to the basis of ``C_J(V)`` by dense solves."""
    mat = rs_minus_t(t, s)
    w = slice_basis(dimension(t), s.j)
    for _ in range(m):
        w = np.linalg.solve(mat, w)
    return w


def lq_resolvent(q: npt.ArrayLike, s: npt.ArrayLike, side: Side) -> Octonion:
    """Closed-form regular resolvents of ``L_q`` on ``O``.

    ``right`` gives ``Q_s(q)^-1 (conj(s) - q)``, ``left`` gives
    ``(conj(s) - q) Q_s(q)^-1``.
    """
    from octofc_core.slicefun import q_char  # noqa: PLC0415

    qa, sa = np.asarray(q, dtype=np.float64), np.asarray(s, dtype=np.float64)
    qs_inv = inv(q_char(sa, qa))
    diff = conj(sa) - qa
    return mul(qs_inv, diff) if check_side(side) == "right" else mul(diff, qs_inv)


def resolvent_regularity_residual(
    t: OctMatrix,
    s0: SlicePoint,
    v: npt.ArrayLike,
    phi: RealFunctional,
    h: float,
    tolerances: Tolerances | None = None,
    side: Side = "right",
) -> float:
    """Central-difference slice Cauchy-Riemann defect of ``phi`` of a resolvent.

    ``right`` uses the regular inverse ``ext`` side and evaluates
    ``|dg/dx + (dg/dy) J|``; ``left`` uses the ``lif`` side and evaluates
    ``|dg/dx + J (dg/dy)|``, at ``s0`` with step ``h``.

    Raises:
        SingularityError: If a stencil point is not invertible.
    """
    side = check_side(side)
    tol = tolerances or default_tolerances()
    real_v = real_embed(np.asarray(v, dtype=np.float64))
    j = s0.j
    stencil = [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)]
    values = []
    norm_t = operator_norm(t)
    for dx, dy in stencil:
        s = s0.value.copy()
        s[0] += dx
        s = s + dy * j
        m = rs_minus_t(t, s)
        smallest = float(singular_values(m)[-1])
        if smallest <= singularity_threshold(float(np.linalg.norm(s)), norm_t, tol.singular_rel):
            raise SingularityError("Regularity stencil touches a singular point", smallest)
        resolvent = reg_inverse(m, side, tol.invertibility_rel)
        values.append(phi(apply(resolvent, real_v)))
    g_x = (values[0] - values[1]) / (2.0 * h)
    g_y = (values[2] - values[3]) / (2.0 * h)
    turned = mul(g_y, j) if side == "right" else mul(j, g_y)
    return float(norm(g_x + turned))

