"""Slice regular functions on O.

Two representations are supported. A :class:`SlicePolynomial` carries
side-tagged octonion coefficients: left slice polynomials evaluate as
``sum_k q^k a_k`` and right ones as ``sum_k a_k q^k``. A
:class:`StemFunction` carries a stem pair ``F1, F2`` of vectorized
evaluators on complex arrays and induces ``F1(z) + I F2(z)`` (left) or
``F1(z) + F2(z) I`` (right) at ``q = x + y I``.
"""

import cmath
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import structlog

from octofc_core.config import Tolerances, default_tolerances
from octofc_core.exceptions import DomainError, PoleError, ToleranceError, ValidationError
from octofc_core.oct_core import (
    Octonion,
    SliceFrame,
    check_unit_imaginary,
    conj,
    frame_coords,
    inv,
    make_slice_frame,
    mul,
    norm,
)
from octofc_core.paralin import Side, check_side
from octofc_core.spectra import SphereSet

logger = structlog.get_logger(__name__)

type ComplexArray = npt.NDArray[np.complex128]
type StemEvaluator = Callable[[ComplexArray], npt.NDArray[np.float64]]
type OctonionFunction = Callable[[Octonion], Octonion]


def complex_to_slice(z: npt.ArrayLike, j: npt.ArrayLike) -> Octonion:
    """Map complex numbers onto ``C_J`` via ``i -> J``."""
    w = np.asarray(z, dtype=np.complex128)
    out = np.multiply.outer(w.imag, np.asarray(j, dtype=np.float64))
    out[..., 0] += w.real
    return out


def slice_to_complex(q: npt.ArrayLike, j: npt.ArrayLike) -> ComplexArray:
    """Inverse of :func:`complex_to_slice` for points of ``C_J``."""
    arr = np.asarray(q, dtype=np.float64)
    return arr[..., 0] + 1j * np.einsum("...k,k->...", arr, np.asarray(j, dtype=np.float64))


def _split_point(q: Octonion) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64], Octonion]:
    # q = x + y I with y = |Im q| >= 0; I = 0 where y = 0
    x = q[..., 0]
    im = q.copy()
    im[..., 0] = 0.0
    y = np.linalg.norm(im, axis=-1)
    unit = np.divide(im, y[..., None], out=np.zeros_like(im), where=y[..., None] > 0)
    return x, y, unit


@dataclass(frozen=True, eq=False)
class SlicePolynomial:
    """Slice polynomial with octonion coefficients ``a_0 .. a_d``."""

    side: Side
    coeffs: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        check_side(self.side)
        c = np.atleast_2d(np.asarray(self.coeffs, dtype=np.float64))
        if c.ndim != 2 or c.shape[1] != 8 or c.shape[0] < 1:  # noqa: PLR2004
            raise ValidationError(
                f"coefficients must have shape (d+1, 8), got {c.shape}", "coeffs"
            )
        if not np.all(np.isfinite(c)):
            raise ValidationError("coefficients must be finite", "coeffs")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_real(cls, coeffs: Sequence[float], side: Side = "left") -> "SlicePolynomial":
        """Slice preserving polynomial from real coefficients."""
        c = np.zeros((len(coeffs), 8))
        c[:, 0] = coeffs
        return cls(side, c)

    @classmethod
    def monomial(cls, m: int, side: Side = "left") -> "SlicePolynomial":
        """``q^m``."""
        if m < 0:
            raise DomainError("monomial degree must be non-negative", "m")
        c = np.zeros((m + 1, 8))
        c[m, 0] = 1.0
        return cls(side, c)

    @classmethod
    def constant(cls, a: npt.ArrayLike, side: Side = "left") -> "SlicePolynomial":
        return cls(side, np.asarray(a, dtype=np.float64).reshape(1, 8))

    @property
    def degree(self) -> int:
        return int(self.coeffs.shape[0]) - 1

    @property
    def is_slice_preserving(self) -> bool:
        return bool(np.all(self.coeffs[:, 1:] == 0.0))

    def __call__(self, q: npt.ArrayLike) -> Octonion:
        """Evaluate by accumulated powers; broadcasts over leading axes of ``q``."""
        arr = np.asarray(q, dtype=np.float64)
        current = np.zeros_like(arr)
        current[..., 0] = 1.0
        total = np.zeros(np.broadcast_shapes(arr.shape, (8,)))
        for k, a in enumerate(self.coeffs):
            if k:
                current = mul(current, arr)
            total = total + (mul(current, a) if self.side == "left" else mul(a, current))
        return total


@dataclass(frozen=True, eq=False)
class StemFunction:
    """Slice function induced by a stem pair on a disc ``|z| < domain_radius``.

    ``f1`` and ``f2`` map complex arrays of shape ``S`` to octonion arrays of
    shape ``S + (8,)``. The stem condition ``F1(conj z) = F1(z)``,
    ``F2(conj z) = -F2(z)`` is spot-checked, not proven.
    """

    f1: StemEvaluator
    f2: StemEvaluator
    side: Side = "left"
    domain_radius: float = math.inf
    slice_preserving: bool = False
    name: str = "stem"

    def __post_init__(self) -> None:
        check_side(self.side)
        if not self.domain_radius > 0:
            raise ValidationError("domain_radius must be positive", "domain_radius")

    def __call__(self, q: npt.ArrayLike) -> Octonion:
        arr = np.asarray(q, dtype=np.float64)
        x, y, unit = _split_point(arr)
        if np.any(np.hypot(x, y) >= self.domain_radius):
            raise DomainError(f"{self.name} is evaluated outside its domain", "q")
        z = x + 1j * y
        first = np.asarray(self.f1(z), dtype=np.float64)
        second = np.asarray(self.f2(z), dtype=np.float64)
        twisted = mul(unit, second) if self.side == "left" else mul(second, unit)
        return first + twisted

    def stem_condition_defect(self, z: npt.ArrayLike) -> float:
        """Largest violation of the stem condition on the sample points."""
        w = np.asarray(z, dtype=np.complex128)
        d1 = norm(self.f1(np.conj(w)) - self.f1(w))
        d2 = norm(self.f2(np.conj(w)) + self.f2(w))
        return float(max(np.max(d1, initial=0.0), np.max(d2, initial=0.0)))


type SliceFunction = SlicePolynomial | StemFunction


def stem_from_complex(
    fn: Callable[[complex], complex],
    side: Side = "left",
    domain_radius: float = math.inf,
    name: str = "stem",
) -> StemFunction:
    """Slice preserving stem function from a holomorphic ``fn`` with ``fn(conj z) = conj fn(z)``."""
    vectorized = np.vectorize(fn, otypes=[np.complex128])

    def real_part(z: ComplexArray) -> npt.NDArray[np.float64]:
        out = np.zeros((*np.shape(z), 8))
        out[..., 0] = vectorized(z).real
        return out

    def imag_part(z: ComplexArray) -> npt.NDArray[np.float64]:
        out = np.zeros((*np.shape(z), 8))
        out[..., 0] = vectorized(z).imag
        return out

    return StemFunction(
        real_part,
        imag_part,
        side=side,
        domain_radius=domain_radius,
        slice_preserving=True,
        name=name,
    )


def exact_exp(side: Side = "left") -> StemFunction:
    """The exponential as a slice preserving stem function."""
    return stem_from_complex(cmath.exp, side=side, name="exp")


def stem_pair(poly: SlicePolynomial) -> StemFunction:
    """Stem pair of a polynomial: ``z^k = u_k + i v_k`` gives ``F1 = sum u_k a_k``, ``F2 = sum v_k a_k``."""
    coeffs = poly.coeffs
    degrees = np.arange(coeffs.shape[0])

    def powers(z: ComplexArray) -> ComplexArray:
        return np.power.outer(np.asarray(z, dtype=np.complex128), degrees)

    def first(z: ComplexArray) -> npt.NDArray[np.float64]:
        return powers(z).real @ coeffs

    def second(z: ComplexArray) -> npt.NDArray[np.float64]:
        return powers(z).imag @ coeffs

    return StemFunction(
        first,
        second,
        side=poly.side,
        slice_preserving=poly.is_slice_preserving,
        name="polynomial",
    )


def eval_slice(f: SliceFunction, q: npt.ArrayLike) -> Octonion:
    """Evaluate a slice function at ``q``."""
    return f(q)


def slice_product(f: SlicePolynomial, g: SlicePolynomial) -> SlicePolynomial:
    """Slice product ``f . g``: coefficient convolution ``c_k = sum_i a_i b_(k-i)``."""
    if f.side != g.side:
        raise ValidationError("slice product needs functions of the same side", "side")
    a, b = f.coeffs, g.coeffs
    out = np.zeros((a.shape[0] + b.shape[0] - 1, 8))
    for i, ai in enumerate(a):
        out[i : i + b.shape[0]] += mul(ai, b)
    return SlicePolynomial(f.side, out)


def tilde(f: SlicePolynomial) -> SlicePolynomial:
    """Same coefficients on the opposite side."""
    return SlicePolynomial("right" if f.side == "left" else "left", f.coeffs.copy())


def component_functions(
    f: SliceFunction, frame: SliceFrame
) -> tuple[SliceFunction, ...]:
    """Slice preserving components ``f_(i)`` with ``f = sum_i f_(i) . J_i``.

    For right functions the decomposition reads ``f = sum_i J_i . f_(i)``;
    the components are the same because they are real-valued on the stem.
    """
    if isinstance(f, SlicePolynomial):
        coords = frame_coords(f.coeffs, frame)
        return tuple(
            SlicePolynomial.from_real(coords[:, i].tolist(), f.side) for i in range(8)
        )

    def component(i: int) -> StemFunction:
        def first(z: ComplexArray) -> npt.NDArray[np.float64]:
            out = np.zeros((*np.shape(z), 8))
            out[..., 0] = frame_coords(f.f1(z), frame)[..., i]
            return out

        def second(z: ComplexArray) -> npt.NDArray[np.float64]:
            out = np.zeros((*np.shape(z), 8))
            out[..., 0] = frame_coords(f.f2(z), frame)[..., i]
            return out

        return StemFunction(
            first,
            second,
            side=f.side,
            domain_radius=f.domain_radius,
            slice_preserving=True,
            name=f"{f.name}[{i}]",
        )

    return tuple(component(i) for i in range(8))


def complex_values(f: SliceFunction, z: npt.ArrayLike) -> ComplexArray:
    """Values of a slice preserving function as a holomorphic function on ``C``.

    Raises:
        ValidationError: If ``f`` is not slice preserving.
    """
    w = np.asarray(z, dtype=np.complex128)
    if isinstance(f, SlicePolynomial):
        if not f.is_slice_preserving:
            raise ValidationError("function is not slice preserving", "coeffs")
        return np.power.outer(w, np.arange(f.degree + 1)) @ f.coeffs[:, 0]
    if not f.slice_preserving:
        raise ValidationError(f"{f.name} is not slice preserving", "f")
    if np.any(np.abs(w) >= f.domain_radius):
        raise DomainError(f"{f.name} is evaluated outside its domain", "z")
    return f.f1(w)[..., 0] + 1j * f.f2(w)[..., 0]


def q_char(s: npt.ArrayLike, q: npt.ArrayLike) -> Octonion:
    """``Q_s(q) = q^2 - 2 Re(s) q + |s|^2``."""
    sa, qa = np.asarray(s, dtype=np.float64), np.asarray(q, dtype=np.float64)
    out = mul(qa, qa) - 2.0 * sa[..., 0, None] * qa
    out[..., 0] += np.sum(sa * sa, axis=-1)
    return out


def _kernel(s: Octonion, q: Octonion, side: Side) -> Octonion:
    qs_inv = inv(q_char(s, q))
    diff = conj(s) - q
    return mul(qs_inv, diff) if side == "left" else mul(diff, qs_inv)


def cauchy_kernel(s: npt.ArrayLike, q: npt.ArrayLike, side: Side) -> Octonion:
    """Left kernel ``Q_s(q)^-1 (conj(s) - q)`` or right kernel ``(conj(s) - q) Q_s(q)^-1``.

    Raises:
        PoleError: If ``q`` lies on the sphere ``[s]``.
    """
    check_side(side)
    sa, qa = np.asarray(s, dtype=np.float64), np.asarray(q, dtype=np.float64)
    if SphereSet.of(sa).contains(qa):
        raise PoleError("Cauchy kernel has a pole on [s]", qa.tolist())
    return _kernel(sa, qa, side)


@dataclass(frozen=True, eq=False)
class SliceContour:
    """Circle ``s(theta) = center + radius e^(J theta)`` in ``C_J`` with ``M`` nodes."""

    j: Octonion
    center: float = 0.0
    radius: float = 1.0
    nodes: int = 256

    def __post_init__(self) -> None:
        object.__setattr__(self, "j", check_unit_imaginary(self.j))
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValidationError("contour radius must be positive", "radius")
        if not math.isfinite(self.center):
            raise ValidationError("contour center must be finite", "center")
        if self.nodes < 8 or self.nodes & (self.nodes - 1):  # noqa: PLR2004
            raise ValidationError(
                f"nodes must be a power of two >= 8, got {self.nodes}", "nodes"
            )

    @property
    def thetas(self) -> npt.NDArray[np.float64]:
        return 2.0 * np.pi * np.arange(self.nodes) / self.nodes

    @property
    def complex_points(self) -> ComplexArray:
        return self.center + self.radius * np.exp(1j * self.thetas)

    @property
    def points(self) -> Octonion:
        """Nodes ``s_k`` as octonions of ``C_J``."""
        return complex_to_slice(self.complex_points, self.j)

    @property
    def weights(self) -> Octonion:
        """``ds_J / (2 pi)`` per node: ``radius e^(J theta_k) / M``."""
        return complex_to_slice(self.radius * np.exp(1j * self.thetas) / self.nodes, self.j)

    def encloses(self, q: npt.ArrayLike) -> bool:
        """Whether the sphere ``[q]`` meets ``C_J`` strictly inside the circle."""
        arr = np.asarray(q, dtype=np.float64)
        return math.hypot(float(arr[0]) - self.center, float(np.linalg.norm(arr[1:]))) < self.radius


def trapezoid_with_estimate(terms: npt.NDArray[np.float64]) -> tuple[npt.NDArray[np.float64], float]:
    """Sum node terms and compare with the half-resolution rule.

    Returns:
        The ``M``-node sum and ``|I_M - I_(M/2)|``.
    """
    full = terms.sum(axis=0)
    half = 2.0 * terms[0::2].sum(axis=0)
    return full, float(np.linalg.norm(full - half))


def _check_enclosed(q: Octonion, contour: SliceContour) -> None:
    if not contour.encloses(q):
        raise DomainError("q is on or outside the contour sphere", "q")


def slice_cauchy_eval(
    f: SliceFunction,
    q: npt.ArrayLike,
    contour: SliceContour,
    tolerances: Tolerances | None = None,
) -> Octonion:
    """Reconstruct ``f(q)`` from its values on a contour of ``C_J``.

    Uses the slice Cauchy formula with the kernel matching the side of ``f``.
    General ``f`` is split into slice preserving components in the frame of
    ``J`` and reassembled.

    Raises:
        DomainError: If the sphere of ``q`` does not meet the disk of the contour.
        ToleranceError: If the half-resolution estimate exceeds
            ``quadrature_tol * max(1, |f(q)|)``.
    """
    tol = tolerances or default_tolerances()
    qa = np.asarray(q, dtype=np.float64)
    _check_enclosed(qa, contour)
    frame = make_slice_frame(contour.j)
    components = component_functions(f, frame) if not _preserving(f) else (f,)
    s = contour.points
    kernels = _kernel(s, np.broadcast_to(qa, s.shape), f.side)
    total = np.zeros(8)
    estimate = 0.0
    for i, comp in enumerate(components):
        values = complex_to_slice(complex_values(comp, contour.complex_points), contour.j)
        measure = mul(contour.weights, values)
        terms = mul(kernels, measure) if f.side == "left" else mul(measure, kernels)
        part, err = trapezoid_with_estimate(terms)
        estimate += err
        unit = frame[i]
        total = total + (mul(part, unit) if f.side == "left" else mul(unit, part))
    logger.debug("SLICE_CAUCHY_EVALUATED", nodes=contour.nodes, estimate=estimate)
    limit = tol.quadrature_tol * max(1.0, float(norm(total)))
    if estimate > limit:
        raise ToleranceError(
            "slice Cauchy quadrature estimate exceeds tolerance", estimate, limit
        )
    return total


def _preserving(f: SliceFunction) -> bool:
    return f.is_slice_preserving if isinstance(f, SlicePolynomial) else f.slice_preserving


def regularity_residual(
    f: SliceFunction | OctonionFunction,
    q: npt.ArrayLike,
    h: float,
    side: Side | None = None,
) -> float:
    """Central-difference slice Cauchy-Riemann defect at ``q = x + y J``.

    Left: ``|f_x + J f_y|``; right: ``|f_x + f_y J|``.
    """
    qa = np.asarray(q, dtype=np.float64)
    _, y, unit = _split_point(qa)
    if float(y) == 0.0:
        raise DomainError("regularity residual needs a non-real point", "q")
    chosen = side or getattr(f, "side", "left")
    check_side(chosen)
    dx = np.zeros(8)
    dx[0] = h
    dy = h * unit
    f_x = (f(qa + dx) - f(qa - dx)) / (2.0 * h)
    f_y = (f(qa + dy) - f(qa - dy)) / (2.0 * h)
    cr = f_x + (mul(unit, f_y) if chosen == "left" else mul(f_y, unit))
    return float(norm(cr))


@dataclass(frozen=True, eq=False)
class SplitComponents:
    """Holomorphic components ``F_0 .. F_3`` of ``f`` restricted to ``C_J``.

    ``f(z) = sum_i F_i(z) J_i`` with ``F_i`` valued in ``C_J``.
    """

    f: SliceFunction | OctonionFunction
    frame: SliceFrame

    def __call__(self, z: npt.ArrayLike) -> ComplexArray:
        """Component values as complex numbers, shape ``(..., 4)``."""
        values = self.f(complex_to_slice(z, self.frame.j))
        c = frame_coords(values, self.frame)
        out = np.empty((*c.shape[:-1], 4), dtype=np.complex128)
        out[..., 0] = c[..., 0] + 1j * c[..., 4]
        for i in range(1, 4):
            out[..., i] = c[..., i] - 1j * c[..., i + 4]
        return out

    def reconstruct(self, z: npt.ArrayLike) -> Octonion:
        """``sum_i F_i(z) J_i``."""
        parts = self(z)
        total = np.zeros((*parts.shape[:-1], 8))
        for i in range(4):
            total = total + mul(complex_to_slice(parts[..., i], self.frame.j), self.frame[i])
        return total

    def cauchy_riemann_defect(self, z: complex, h: float = 1e-5) -> float:
        """Largest ``|dF/dx + i dF/dy|`` over the four components."""
        f_x = (self(z + h) - self(z - h)) / (2.0 * h)
        f_y = (self(z + 1j * h) - self(z - 1j * h)) / (2.0 * h)
        return float(np.max(np.abs(f_x + 1j * f_y)))


def split_components(f: SliceFunction | OctonionFunction, j: npt.ArrayLike) -> SplitComponents:
    """Splitting of ``f`` on ``C_J`` into four ``C_J``-valued holomorphic functions."""
    return SplitComponents(f, make_slice_frame(j))
