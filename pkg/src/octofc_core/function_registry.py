"""Named builtin slice functions.

Function specs on the command line are either a path to a function JSON file
or a builtin name: ``pow:m`` for ``q^m``, ``exp:N`` for the exponential
truncated after ``N`` terms, ``exp:auto`` for the truncation whose remainder
bound on the contour disk meets the quadrature tolerance, and ``exp`` for the
exact exponential as a stem function. Each builtin is produced by a
:class:`FunctionFactory` registered under its prefix.
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any

import structlog

from octofc_core.exceptions import ValidationError
from octofc_core.paralin import Side
from octofc_core.slicefun import SliceFunction, SlicePolynomial, exact_exp

logger = structlog.get_logger(__name__)

MAX_POWER = 64
MAX_EXP_TERMS = 170


@dataclass(frozen=True)
class PowerConfig:
    """Configuration for the monomial ``q^m``."""

    m: int


@dataclass(frozen=True)
class TruncatedExpConfig:
    """Configuration for ``sum_{k <= N} q^k / k!``."""

    terms: int


@dataclass(frozen=True)
class NoConfig:
    """Configuration for builtins without parameters."""


@dataclass(frozen=True)
class AutoExpConfig:
    """Configuration for ``exp:auto``; the order is fixed at creation."""


@dataclass(frozen=True)
class BuildContext:
    """Where a builtin will be evaluated.

    Attributes:
        extent: Radius of the disk holding the contour, ``|center| + radius``.
        tol: Target truncation error on that disk.
    """

    extent: float | None = None
    tol: float = 1e-8


class FunctionFactory[C](ABC):
    """Build a slice function from the argument after ``prefix:``."""

    @abstractmethod
    def validate(self, argument: str | None) -> C:
        """Validate the argument and return the configuration."""

    @abstractmethod
    def create(self, config: C, side: Side, context: BuildContext) -> SliceFunction:
        """Create the function for one side."""


def _parse_int(argument: str | None, name: str, lower: int, upper: int) -> int:
    if argument is None or argument == "":
        raise ValidationError(f"{name} requires an integer argument", "fn")
    try:
        value = int(argument)
    except ValueError:
        raise ValidationError(
            f"{name} argument must be an integer, got {argument!r}", "fn"
        ) from None
    if not lower <= value <= upper:
        raise ValidationError(f"{name} argument must be in [{lower}, {upper}]", "fn")
    return value


class PowerFactory(FunctionFactory[PowerConfig]):
    """Factory for ``pow:m``."""

    def validate(self, argument: str | None) -> PowerConfig:
        return PowerConfig(m=_parse_int(argument, "pow", 0, MAX_POWER))

    def create(
        self, config: PowerConfig, side: Side, context: BuildContext  # noqa: ARG002
    ) -> SliceFunction:
        return SlicePolynomial.monomial(config.m, side)


class TruncatedExpFactory(FunctionFactory[TruncatedExpConfig]):
    """Factory for ``exp:N``."""

    def validate(self, argument: str | None) -> TruncatedExpConfig:
        return TruncatedExpConfig(terms=_parse_int(argument, "exp", 0, MAX_EXP_TERMS))

    def create(
        self, config: TruncatedExpConfig, side: Side, context: BuildContext  # noqa: ARG002
    ) -> SliceFunction:
        coeffs = [1.0 / math.factorial(k) for k in range(config.terms + 1)]
        return SlicePolynomial.from_real(coeffs, side)


class ExactExpFactory(FunctionFactory[NoConfig]):
    """Factory for ``exp``."""

    def validate(self, argument: str | None) -> NoConfig:
        if argument:
            raise ValidationError("exp takes no argument; use exp:N to truncate", "fn")
        return NoConfig()

    def create(
        self, config: NoConfig, side: Side, context: BuildContext  # noqa: ARG002
    ) -> SliceFunction:
        return exact_exp(side)


class FunctionFactoryRegistry:
    """Registry of builtin function factories by name prefix."""

    def __init__(self) -> None:
        self._factories: dict[str, FunctionFactory[Any]] = {}

    def register(self, name: str, factory: FunctionFactory[Any]) -> None:
        if name in self._factories:
            raise ValidationError(f"builtin {name!r} is already registered", "fn")
        self._factories[name] = factory

    def names(self) -> list[str]:
        return sorted(self._factories)

    def is_builtin(self, spec: str) -> bool:
        return spec.partition(":")[0] in self._factories

    def build(
        self, spec: str, side: Side = "left", context: BuildContext | None = None
    ) -> SliceFunction:
        """Build the function named by ``spec``, e.g. ``pow:2``.

        Raises:
            ValidationError: For unknown names, invalid arguments, or
                ``exp:auto`` without a contour extent.
        """
        name, sep, argument = spec.partition(":")
        factory = self._factories.get(name)
        if factory is None:
            raise ValidationError(
                f"unknown builtin function {spec!r}; known: {', '.join(self.names())}",
                "fn",
            )
        config = factory.validate(argument if sep else None)
        logger.debug("BUILTIN_FUNCTION_BUILT", spec=spec, side=side)
        return factory.create(config, side, context or BuildContext())


def create_function_registry() -> FunctionFactoryRegistry:
    """Create a registry with all builtin functions registered."""
    registry = FunctionFactoryRegistry()
    registry.register("pow", PowerFactory())
    registry.register("exp", _ExpDispatch())
    return registry


class AutoExpFactory(FunctionFactory[AutoExpConfig]):
    """Factory for ``exp:auto``."""

    def validate(self, argument: str | None) -> AutoExpConfig:
        if argument != "auto":
            raise ValidationError("exp:auto takes the literal argument 'auto'", "fn")
        return AutoExpConfig()

    def create(
        self, config: AutoExpConfig, side: Side, context: BuildContext  # noqa: ARG002
    ) -> SliceFunction:
        if context.extent is None:
            raise ValidationError("exp:auto needs the contour extent to pick N", "fn")
        terms = exp_terms_for(context.extent, context.tol)
        logger.info(
            "EXP_TERMS_SELECTED", terms=terms, extent=context.extent, tol=context.tol
        )
        truncated = TruncatedExpConfig(terms=terms)
        return TruncatedExpFactory().create(truncated, side, context)


_ExpConfig = TruncatedExpConfig | AutoExpConfig | NoConfig


class _ExpDispatch(FunctionFactory[_ExpConfig]):
    # "exp" is exact, "exp:auto" picks N, "exp:N" is truncated
    def __init__(self) -> None:
        self._exact = ExactExpFactory()
        self._auto = AutoExpFactory()
        self._truncated = TruncatedExpFactory()

    def validate(self, argument: str | None) -> _ExpConfig:
        if argument is None:
            return self._exact.validate(None)
        if argument == "auto":
            return self._auto.validate(argument)
        return self._truncated.validate(argument)

    def create(
        self, config: _ExpConfig, side: Side, context: BuildContext
    ) -> SliceFunction:
        if isinstance(config, TruncatedExpConfig):
            return self._truncated.create(config, side, context)
        if isinstance(config, AutoExpConfig):
            return self._auto.create(config, side, context)
        return self._exact.create(config, side, context)


def exp_terms_for(radius: float, tol: float) -> int:
    """Smallest ``N`` with Lagrange remainder ``e^r r^(N+1) / (N+1)! <= tol``."""
    if radius < 0 or tol <= 0:
        raise ValidationError("exp_terms_for needs radius >= 0 and tol > 0", "fn")
    if radius == 0:
        return 0
    log_tol = math.log(tol)
    for n in range(MAX_EXP_TERMS + 1):
        log_remainder = radius + (n + 1) * math.log(radius) - math.lgamma(n + 2)
        if log_remainder <= log_tol:
            return n
    return MAX_EXP_TERMS
