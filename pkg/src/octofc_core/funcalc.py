"""Left and right slice regular functional calculi by contour quadrature.

For a left slice function ``f`` the left calculus is

    f*(T)_J = (1/2pi) int (R_s - T)^{(x)-} (.) (ds_J f(s))

over a circle of ``C_J``, where ``(R_s - T)^{(x)-}`` is the right regular
inverse. The right calculus mirrors it with the left regular inverse and the
action on the left. General ``f`` is split into slice preserving components
in the frame of ``J`` and reassembled with ``(.) J_i`` or ``J_i (.)``.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass, replace

import numpy as np
import numpy.typing as npt
import structlog

from octofc_core.config import Tolerances, default_tolerances
from octofc_core.exceptions import (
    PreconditionError,
    SingularityError,
    ToleranceError,
    ValidationError,
)
from octofc_core.oct_core import (
    Octonion,
    check_unit_imaginary,
    make_slice_frame,
    mul,
    random_unit_imaginary,
)
from octofc_core.omodule import in_slice
from octofc_core.paralin import (
    OctMatrix,
    PowerAssociativity,
    Side,
    as_oct_matrix,
    check_side,
    ext_from_real,
    lif_of_real_part,
    operator_norm,
    power_assoc_check,
    re_op,
    reg_compose,
    scalar_mul,
    singular_values,
)
from octofc_core.parallel import chunk_ranges, ordered_map
from octofc_core.slicefun import (
    SliceContour,
    SliceFunction,
    SlicePolynomial,
    complex_to_slice,
    complex_values,
    component_functions,
    slice_product,
    tilde,
)
from octofc_core.spectra import GridSpec, SpectrumKind, rs_minus_t, scan_slice

__all__ = [
    "CalcRequest",
    "CalcResult",
    "OperatorField",
    "SphereProbe",
    "associator_corrected_calculus",
    "check_enclosure",
    "contour_independence_check",
    "default_contour",
    "evaluate_calculus",
    "functional_calculus",
    "product_property_check",
    "re_op",
    "sphere_probe",
    "sphere_samples",
]

logger = structlog.get_logger(__name__)

DEFAULT_NODES = 1024
CONTOUR_MARGIN = 0.1
_NODE_CHUNK = 128
_ENCLOSURE_RESOLUTION = 41


@dataclass(frozen=True, eq=False)
class CalcRequest:
    """Input of one functional calculus evaluation."""

    t: OctMatrix
    f: SliceFunction
    j: Octonion
    side: Side = "left"
    contour: SliceContour | None = None
    allow_non_power_associative: bool = False
    check_spectrum: bool = True
    tolerances: Tolerances | None = None
    threads: int | None = None


@dataclass(frozen=True, eq=False)
class CalcResult:
    """Operator ``f*(T)_J`` (left) or ``f_*(T)_J`` (right) with diagnostics."""

    operator: OctMatrix
    error_estimate: float
    nodes: int
    radius: float
    center: float
    j: Octonion
    side: Side
    power_assoc: PowerAssociativity


@dataclass(frozen=True, eq=False)
class OperatorField:
    """Operators ``f*(T)_J`` sampled over imaginary units ``J``."""

    units: npt.NDArray[np.float64]
    operators: npt.NDArray[np.float64]

    def __len__(self) -> int:
        return int(self.units.shape[0])

    def re_operators(self) -> npt.NDArray[np.float64]:
        return re_op(self.operators)


@dataclass(frozen=True, eq=False)
class SphereProbe:
    """Deviation of an :class:`OperatorField` across the sphere of units."""

    field: OperatorField
    max_dev: float
    max_re_dev: float
    continuity: float | None = None


def default_contour(
    t: OctMatrix, j: npt.ArrayLike, nodes: int = DEFAULT_NODES, center: float = 0.0
) -> SliceContour:
    """Circle about ``center`` with radius ``|center| + 1.1 (||T|| + margin)``."""
    radius = abs(center) + 1.1 * (operator_norm(t) + CONTOUR_MARGIN)
    return SliceContour(np.asarray(j, dtype=np.float64), center, radius, nodes)


def _kind_for(side: Side) -> SpectrumKind:
    return "pullback" if side == "left" else "pushforward"


def check_enclosure(
    t: OctMatrix,
    contour: SliceContour,
    side: Side = "left",
    tolerances: Tolerances | None = None,
    threads: int | None = None,
) -> None:
    """Verify that the slice spectrum lies strictly inside ``contour``.

    Raises:
        PreconditionError: If a flagged scan point is on or outside the circle.
    """
    norm_t = operator_norm(t)
    if abs(contour.center) + norm_t < contour.radius:
        return
    extent = max(norm_t, abs(contour.center) + contour.radius) * 1.05 + 1e-3
    grid = GridSpec(-extent, extent, -extent, extent, _ENCLOSURE_RESOLUTION)
    scan = scan_slice(
        t, contour.j, grid, _kind_for(side), tolerances=tolerances, threads=threads
    )
    outside = [
        (x, y)
        for x, y in scan.flagged_points()
        if math.hypot(x - contour.center, y) >= contour.radius
    ]
    if outside:
        raise PreconditionError(
            f"{len(outside)} flagged spectrum points lie on or outside the contour",
            "spectrum_enclosure",
        )


def _node_resolvents(
    t: OctMatrix,
    contour: SliceContour,
    side: Side,
    tolerances: Tolerances,
    threads: int | None,
) -> npt.NDArray[np.float64]:
    # Regular inverses of R_s - T at every node, shape (M, n, n, 8).
    points = contour.points
    norm_t = operator_norm(t)

    def invert(bounds: tuple[int, int]) -> npt.NDArray[np.float64]:
        start, stop = bounds
        mats = rs_minus_t(t, points[start:stop])
        smallest = singular_values(mats)[..., -1]
        s_abs = np.linalg.norm(points[start:stop], axis=-1)
        threshold = tolerances.singular_rel * (1.0 + s_abs + norm_t)
        if np.any(smallest <= threshold):
            raise SingularityError(
                "R_s - T is singular at a contour node", float(np.min(smallest))
            )
        inverses = np.linalg.inv(mats)
        return ext_from_real(inverses) if side == "left" else lif_of_real_part(inverses)

    chunks = ordered_map(invert, chunk_ranges(contour.nodes, _NODE_CHUNK), threads)
    return np.concatenate(chunks)


def _aligned(f: SliceFunction, side: Side) -> SliceFunction:
    if f.side == side:
        return f
    preserving = (
        f.is_slice_preserving if isinstance(f, SlicePolynomial) else f.slice_preserving
    )
    if not preserving:
        raise ValidationError(
            f"a {f.side} slice function cannot enter the {side} calculus", "side"
        )
    if isinstance(f, SlicePolynomial):
        return tilde(f)
    return replace(f, side=side)


def _assemble(
    resolvents: npt.NDArray[np.float64],
    f: SliceFunction,
    contour: SliceContour,
    side: Side,
) -> tuple[OctMatrix, float]:
    frame = make_slice_frame(contour.j)
    n = resolvents.shape[-2]
    total = np.zeros((n, n, 8))
    estimate = 0.0
    for i, component in enumerate(component_functions(f, frame)):
        values = complex_values(component, contour.complex_points)
        if not np.any(values):
            continue
        measure = mul(contour.weights, complex_to_slice(values, contour.j))
        acted = scalar_mul(resolvents, measure, "right" if side == "left" else "left")
        full = acted.sum(axis=0)
        half = 2.0 * acted[0::2].sum(axis=0)
        estimate += float(np.linalg.norm(full - half))
        total = total + scalar_mul(full, frame[i], "right" if side == "left" else "left")
    return total, estimate


def evaluate_calculus(req: CalcRequest) -> CalcResult:
    """Run the left or right functional calculus with all precondition checks.

    Raises:
        PreconditionError: If ``T`` fails the power-associativity horizon test
            without an override, or the contour does not enclose the spectrum.
        SingularityError: If a contour node hits the spectrum.
        ToleranceError: If the quadrature estimate exceeds the tolerance.
    """
    t = as_oct_matrix(req.t, "operator")
    side = check_side(req.side)
    f = _aligned(req.f, side)
    tol = req.tolerances or default_tolerances()
    contour = req.contour or default_contour(t, check_unit_imaginary(req.j))
    pa = power_assoc_check(t, tol.pa_horizon, tol.para_linear_tol)
    if not pa.ok:
        if not req.allow_non_power_associative:
            raise PreconditionError(
                f"operator is not power-associative (residual {pa.residual:.3e} at n={pa.worst_n})",
                "power_associative",
            )
        logger.warning(
            "NON_POWER_ASSOCIATIVE_OPERATOR", residual=pa.residual, worst_n=pa.worst_n
        )
    if req.check_spectrum:
        check_enclosure(t, contour, side, tol, req.threads)
    resolvents = _node_resolvents(t, contour, side, tol, req.threads)
    operator, estimate = _assemble(resolvents, f, contour, side)
    scale = max(1.0, float(np.linalg.norm(operator)))
    if estimate > tol.quadrature_tol * scale:
        raise ToleranceError(
            "quadrature error estimate exceeds tolerance",
            estimate,
            tol.quadrature_tol * scale,
        )
    logger.info(
        "FUNCTIONAL_CALCULUS_COMPLETED",
        side=side,
        nodes=contour.nodes,
        radius=contour.radius,
        estimate=estimate,
    )
    return CalcResult(
        operator=operator,
        error_estimate=estimate,
        nodes=contour.nodes,
        radius=contour.radius,
        center=contour.center,
        j=contour.j,
        side=side,
        power_assoc=pa,
    )


def functional_calculus(req: CalcRequest) -> OctMatrix:
    """``f*(T)_J`` for the left side or ``f_*(T)_J`` for the right side."""
    return evaluate_calculus(req).operator


def associator_corrected_calculus(req: CalcRequest) -> OctMatrix:
    """Evaluate the associator-corrected integrand directly.

    Left: ``G (.) p + sum_i [(G (.) p_i) (.) J_i - G (.) (p_i J_i)]`` with
    ``p = ds_J f(s)`` and ``p_i = ds_J f_(i)(s)``. Right mirrors it. Agrees
    with :func:`functional_calculus` up to rounding.
    """
    t = as_oct_matrix(req.t, "operator")
    side = check_side(req.side)
    f = _aligned(req.f, side)
    tol = req.tolerances or default_tolerances()
    contour = req.contour or default_contour(t, check_unit_imaginary(req.j))
    resolvents = _node_resolvents(t, contour, side, tol, req.threads)
    frame = make_slice_frame(contour.j)
    weights = contour.weights
    direct = mul(weights, f(contour.points)) if side == "left" else mul(f(contour.points), weights)
    if side == "left":
        total = scalar_mul(resolvents, direct, "right")
    else:
        total = scalar_mul(resolvents, direct, "left")
    for i, component in enumerate(component_functions(f, frame)):
        values = complex_values(component, contour.complex_points)
        p_i = mul(weights, complex_to_slice(values, contour.j))
        unit = frame[i]
        if side == "left":
            nested = scalar_mul(scalar_mul(resolvents, p_i, "right"), unit, "right")
            flat = scalar_mul(resolvents, mul(p_i, unit), "right")
            total = total + nested - flat
        else:
            nested = scalar_mul(scalar_mul(resolvents, p_i, "left"), unit, "left")
            flat = scalar_mul(resolvents, mul(unit, p_i), "left")
            total = total + nested - flat
    return total.sum(axis=0)


def contour_independence_check(req: CalcRequest, r1: float, r2: float) -> float:
    """Frobenius distance between results on two admissible radii."""
    base = req.contour or default_contour(req.t, check_unit_imaginary(req.j))
    results = [
        functional_calculus(replace(req, contour=replace(base, radius=r)))
        for r in (r1, r2)
    ]
    return float(np.linalg.norm(results[0] - results[1]))


def sphere_samples(extra: int = 0, seed: int = 0) -> npt.NDArray[np.float64]:
    """Standard units, normalized pairwise sums and ``extra`` seeded random units."""
    units = [np.eye(8)[i] for i in range(1, 8)]
    for i in range(1, 8):
        for k in range(i + 1, 8):
            pair = np.zeros(8)
            pair[i] = pair[k] = 1.0 / math.sqrt(2.0)
            units.append(pair)
    rng = np.random.default_rng(seed)
    units.extend(random_unit_imaginary(rng) for _ in range(extra))
    return np.stack(units)


def sphere_probe(
    t: OctMatrix,
    f: SliceFunction,
    j_samples: Sequence[npt.ArrayLike] | npt.NDArray[np.float64],
    side: Side = "left",
    nodes: int = DEFAULT_NODES,
    continuity_eps: float | None = None,
    tolerances: Tolerances | None = None,
    threads: int | None = None,
) -> SphereProbe:
    """Compute ``f*(T)_J`` over sample units and measure their spread.

    ``max_re_dev`` must vanish for every admissible input; ``max_dev`` is only
    reported. With ``continuity_eps`` the first sample is also compared with a
    unit rotated by that angle.
    """
    units = np.stack([check_unit_imaginary(j) for j in j_samples])
    t = as_oct_matrix(t, "operator")

    def run(j: Octonion) -> OctMatrix:
        request = CalcRequest(
            t=t,
            f=f,
            j=j,
            side=side,
            contour=default_contour(t, j, nodes),
            tolerances=tolerances,
            threads=1,
        )
        return functional_calculus(request)

    operators = np.stack(ordered_map(run, list(units), threads))
    deviations = np.linalg.norm((operators - operators[0]).reshape(len(units), -1), axis=1)
    re_ops = re_op(operators)
    re_deviations = np.linalg.norm((re_ops - re_ops[0]).reshape(len(units), -1), axis=1)
    continuity = None
    if continuity_eps is not None:
        base = units[0]
        other = np.eye(8)[1 + int(np.argmin(np.abs(base[1:])))]
        direction = other - np.dot(other, base) * base
        direction /= np.linalg.norm(direction)
        nearby = math.cos(continuity_eps) * base + math.sin(continuity_eps) * direction
        continuity = float(np.linalg.norm(run(nearby) - operators[0]))
    probe = SphereProbe(
        field=OperatorField(units, operators),
        max_dev=float(deviations.max()),
        max_re_dev=float(re_deviations.max()),
        continuity=continuity,
    )
    logger.info(
        "SPHERE_PROBE_COMPLETED",
        samples=len(units),
        max_dev=probe.max_dev,
        max_re_dev=probe.max_re_dev,
    )
    return probe


def _check_slice_coefficients(f: SlicePolynomial, j: Octonion, name: str) -> None:
    if not in_slice(f.coeffs, j):
        raise ValidationError(f"coefficients of {name} must lie in C_J", name)


def product_property_check(
    t: OctMatrix,
    f: SlicePolynomial,
    g: SlicePolynomial,
    j: npt.ArrayLike,
    contour: SliceContour | None = None,
    tolerances: Tolerances | None = None,
) -> float:
    """Largest deviation in ``Re f_*(T) (x) g*(T) = Re (f . g~)_*(T) = Re (f~ . g)*(T)``.

    ``f`` is taken as a right and ``g`` as a left slice polynomial with
    coefficients in ``C_J``. When ``g = 1`` the deviation of
    ``Re f_*(T) = Re f~*(T)`` is included as well.
    """
    unit = check_unit_imaginary(j)
    f_right = f if f.side == "right" else tilde(f)
    g_left = g if g.side == "left" else tilde(g)
    _check_slice_coefficients(f_right, unit, "f")
    _check_slice_coefficients(g_left, unit, "g")
    t = as_oct_matrix(t, "operator")
    circle = contour or default_contour(t, unit)

    def calc(fn: SlicePolynomial, side: Side) -> OctMatrix:
        request = CalcRequest(
            t=t, f=fn, j=unit, side=side, contour=circle, tolerances=tolerances
        )
        return functional_calculus(request)

    a = calc(f_right, "right")
    b = calc(g_left, "left")
    lhs = re_op(reg_compose(a, b))
    mid = re_op(calc(slice_product(f_right, tilde(g_left)), "right"))
    rhs = re_op(calc(slice_product(tilde(f_right), g_left), "left"))
    deviations = [
        float(np.linalg.norm(lhs - mid)),
        float(np.linalg.norm(lhs - rhs)),
        float(np.linalg.norm(mid - rhs)),
    ]
    one = np.zeros(8)
    one[0] = 1.0
    if g_left.degree == 0 and np.array_equal(g_left.coeffs[0], one):
        deviations.append(
            float(np.linalg.norm(re_op(a) - re_op(calc(tilde(f_right), "left"))))
        )
    worst = max(deviations)
    logger.info("PRODUCT_PROPERTY_CHECKED", deviation=worst)
    return worst
