"""Numerical settings shared by the core library.

Settings are read from ``OCTOFC_*`` environment variables through
environ-config and frozen into a :class:`Tolerances` value that travels with
every computation and is embedded in output artifacts.
"""

import os
from collections.abc import Mapping
from dataclasses import asdict, dataclass
from functools import lru_cache

import environ

from octofc_core.exceptions import ConfigurationError


@environ.config(prefix="OCTOFC")
class NumericsConfig:
    """Numerical tolerances, horizons and parallelism."""

    threads: int = environ.var(
        default=0, converter=int, help="Worker threads (0 uses all CPUs)"
    )
    unit_tol: float = environ.var(
        default=1e-12, converter=float, help="Absolute tolerance on unit-scale checks"
    )
    invertibility_rel: float = environ.var(
        default=1e-10,
        converter=float,
        help="Relative min singular value below which an inverse is refused",
    )
    singular_rel: float = environ.var(
        default=1e-8,
        converter=float,
        help="Scale factor of the spectral singularity threshold",
    )
    pa_horizon: int = environ.var(
        default=16, converter=int, help="Power horizon for slice power-associativity"
    )
    pa_tol: float = environ.var(
        default=1e-8, converter=float, help="Tolerance of horizon power tests"
    )
    quadrature_tol: float = environ.var(
        default=1e-8, converter=float, help="Accepted quadrature error estimate"
    )
    para_linear_tol: float = environ.var(
        default=1e-10, converter=float, help="Tolerance of para-linearity checks"
    )
    seed: int = environ.var(default=0, converter=int, help="Random seed")


@dataclass(frozen=True)
class Tolerances:
    """Frozen tolerance set used by the numerical modules."""

    unit_tol: float = 1e-12
    invertibility_rel: float = 1e-10
    singular_rel: float = 1e-8
    pa_horizon: int = 16
    pa_tol: float = 1e-8
    quadrature_tol: float = 1e-8
    para_linear_tol: float = 1e-10

    def __post_init__(self) -> None:
        for name, value in asdict(self).items():
            if value <= 0:
                raise ConfigurationError(
                    f"Tolerance {name} must be positive, got {value}", name
                )

    def as_dict(self) -> dict[str, float | int]:
        """Return the tolerance set as a plain mapping."""
        return asdict(self)


def load_numerics_config(
    environment: Mapping[str, str] | None = None,
) -> NumericsConfig:
    """Read :class:`NumericsConfig` from the environment."""
    try:
        return environ.to_config(
            NumericsConfig, environ=os.environ if environment is None else environment
        )
    except (ValueError, TypeError) as e:
        raise ConfigurationError(str(e), "numerics") from e


def tolerances_from_config(config: NumericsConfig) -> Tolerances:
    """Freeze the tolerance part of a :class:`NumericsConfig`."""
    return Tolerances(
        unit_tol=config.unit_tol,
        invertibility_rel=config.invertibility_rel,
        singular_rel=config.singular_rel,
        pa_horizon=config.pa_horizon,
        pa_tol=config.pa_tol,
        quadrature_tol=config.quadrature_tol,
        para_linear_tol=config.para_linear_tol,
    )


@lru_cache(maxsize=1)
def default_tolerances() -> Tolerances:
    """Tolerances from the process environment, read once."""
    return tolerances_from_config(load_numerics_config())


def worker_count(requested: int | None = None) -> int:
    """Resolve the number of worker threads.

    Args:
        requested: Explicit thread count; ``None`` or ``0`` falls back to
            ``OCTOFC_THREADS`` and then to the CPU count.
    """
    threads = requested or load_numerics_config().threads
    if threads < 0:
        raise ConfigurationError("OCTOFC_THREADS must be non-negative", "threads")
    return threads or (os.cpu_count() or 1)
