"""Application configuration module (CLI flags + environment).

Each command has an environ-config class with the ``OCTOFC`` prefix. Flags
given on the command line are merged over the process environment before the
class is instantiated, so the precedence is flag, environment, default.
"""

import argparse
import os
import re
from collections.abc import Mapping

import attrs
import environ

from octofc_core.exceptions import ConfigurationError

PREFIX = "OCTOFC"
E1 = "0,1,0,0,0,0,0,0"
# a value such as -4, -.5 or -1,0,0,0,0,0,0,0
NEGATIVE_VALUE = re.compile(r"^-[\d.]")

# Documented short spellings of the slice unit and the series truncation.
FLAG_ALIASES: Mapping[str, tuple[str, ...]] = {
    "j": ("--J",),
    "n_terms": ("--N",),
    "s": ("--s",),
}


def _optional_float(value: str | float | None) -> float | None:
    if value is None or value == "":
        return None
    return float(value)


def _optional_int(value: str | int | None) -> int | None:
    if value is None or value == "":
        return None
    return int(value)


@environ.config(prefix=PREFIX)
class AlgebraVerifyConfig:
    """Configuration for the algebra-verify command."""

    samples: int = environ.var(
        default=10_000, converter=int, help="Random samples per identity"
    )
    seed: int = environ.var(default=0, converter=int, help="Random seed")
    out: str | None = environ.var(default=None, help="Report JSON path (stdout if unset)")
    log_level: str = environ.var(default="INFO", help="Log level")
    dev_mode: bool = environ.bool_var(
        default=False, help="Enable development mode (colored console logs)"
    )


@environ.config(prefix=PREFIX)
class ScanConfig:
    """Configuration for the scan command."""

    op: str = environ.var(help="Operator JSON path")
    j: str = environ.var(default=E1, help="Slice unit J as 8 comma-separated reals")
    xmin: float = environ.var(default=-2.0, converter=float, help="Grid x minimum")
    xmax: float = environ.var(default=2.0, converter=float, help="Grid x maximum")
    ymin: float = environ.var(default=-2.0, converter=float, help="Grid y minimum")
    ymax: float = environ.var(default=2.0, converter=float, help="Grid y maximum")
    res: int = environ.var(default=101, converter=int, help="Grid points per axis")
    kind: str = environ.var(default="pullback", help="pullback or pushforward")
    horizon: int | None = environ.var(
        default=None, converter=_optional_int, help="Power horizon of the extendability test"
    )
    threads: int | None = environ.var(
        default=None, converter=_optional_int, help="Worker threads"
    )
    out: str | None = environ.var(default=None, help="CSV path (stdout if unset)")
    log_level: str = environ.var(default="INFO", help="Log level")
    dev_mode: bool = environ.bool_var(
        default=False, help="Enable development mode (colored console logs)"
    )


@environ.config(prefix=PREFIX)
class FuncalcConfig:
    """Configuration for the funcalc command."""

    op: str = environ.var(help="Operator JSON path")
    fn: str = environ.var(help="Function JSON path or builtin (pow:m, exp:N, exp:auto, exp)")
    j: str = environ.var(default=E1, help="Slice unit J as 8 comma-separated reals")
    side: str = environ.var(default="left", help="left or right calculus")
    radius: float | None = environ.var(
        default=None, converter=_optional_float, help="Contour radius"
    )
    center: float = environ.var(default=0.0, converter=float, help="Contour center")
    nodes: int = environ.var(default=1024, converter=int, help="Quadrature nodes")
    method: str = environ.var(
        default="components", help="components or associator integrand"
    )
    allow_non_power_associative: bool = environ.bool_var(
        default=False, help="Run on operators failing the power-associativity test"
    )
    threads: int | None = environ.var(
        default=None, converter=_optional_int, help="Worker threads"
    )
    out: str | None = environ.var(default=None, help="Result JSON path (stdout if unset)")
    log_level: str = environ.var(default="INFO", help="Log level")
    dev_mode: bool = environ.bool_var(
        default=False, help="Enable development mode (colored console logs)"
    )


@environ.config(prefix=PREFIX)
class SeriesConfig:
    """Configuration for the series command."""

    op: str = environ.var(help="Operator JSON path")
    s: str = environ.var(help="Spectral point s as 8 comma-separated reals")
    j: str = environ.var(default=E1, help="Slice unit used when s is real")
    n_terms: int | None = environ.var(
        default=None,
        converter=_optional_int,
        help="Series truncation N (chosen from the tail bound if unset)",
    )
    side: str = environ.var(default="left", help="left or right regular inverse")
    seed: int = environ.var(default=0, converter=int, help="Random seed")
    out: str | None = environ.var(default=None, help="Report JSON path (stdout if unset)")
    log_level: str = environ.var(default="INFO", help="Log level")
    dev_mode: bool = environ.bool_var(
        default=False, help="Enable development mode (colored console logs)"
    )


@environ.config(prefix=PREFIX)
class ExamplesConfig:
    """Configuration for the examples command."""

    threads: int | None = environ.var(
        default=None, converter=_optional_int, help="Worker threads"
    )
    out: str | None = environ.var(default=None, help="Report JSON path")
    log_level: str = environ.var(default="INFO", help="Log level")
    dev_mode: bool = environ.bool_var(
        default=False, help="Enable development mode (colored console logs)"
    )


def _is_switch(field: "attrs.Attribute[object]") -> bool:
    return field.type in (bool, "bool")


def _flags(field: "attrs.Attribute[object]") -> list[str]:
    flags = ["--" + field.name.replace("_", "-"), *FLAG_ALIASES.get(field.name, ())]
    return list(dict.fromkeys(flags))


def _build_parser(cls: type, prog: str) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=prog, allow_abbrev=False, add_help=False)
    for field in attrs.fields(cls):
        if _is_switch(field):
            parser.add_argument(
                *_flags(field),
                dest=field.name,
                action="store_const",
                const="true",
                default=None,
            )
        else:
            parser.add_argument(*_flags(field), dest=field.name, default=None)
    return parser


def _attach_negative_values(cls: type, args: list[str]) -> list[str]:
    """Rewrite ``--flag -1,...`` as ``--flag=-1,...`` for value flags.

    argparse reads a token like ``-1,0,0`` as an unknown option.
    """
    value_flags = {
        flag
        for field in attrs.fields(cls)
        if not _is_switch(field)
        for flag in _flags(field)
    }
    joined: list[str] = []
    i = 0
    while i < len(args):
        token = args[i]
        following = args[i + 1] if i + 1 < len(args) else None
        if (
            token in value_flags
            and following is not None
            and NEGATIVE_VALUE.match(following)
        ):
            joined.append(f"{token}={following}")
            i += 2
        else:
            joined.append(token)
            i += 1
    return joined


def args_to_config_class[C](
    cls: type[C],
    args: list[str] | None,
    environment: Mapping[str, str] | None = None,
) -> C:
    """Instantiate an environ-config class from flags over the environment.

    Raises:
        ConfigurationError: For unknown flags, missing required values or
            values that fail conversion.
    """
    prog = cls.__name__
    parser = _build_parser(cls, prog)
    try:
        argv = _attach_negative_values(cls, args or [])
        namespace, unknown = parser.parse_known_args(argv)
    except SystemExit:
        raise ConfigurationError(f"cannot parse arguments {args!r}", prog) from None
    if unknown:
        raise ConfigurationError(f"unknown arguments: {' '.join(unknown)}", prog)
    env = dict(os.environ if environment is None else environment)
    for name, value in vars(namespace).items():
        if value is not None:
            env[f"{PREFIX}_{name.upper()}"] = value
    try:
        return environ.to_config(cls, environ=env)
    except environ.MissingEnvValueError as e:
        raise ConfigurationError(
            f"missing required setting {e.args[0]} (flag or environment)", prog
        ) from None
    except (ValueError, TypeError) as e:
        raise ConfigurationError(str(e), prog) from None


def create_algebra_verify_config(args: list[str] | None = None) -> AlgebraVerifyConfig:
    """Create an AlgebraVerifyConfig from command line arguments and environment variables."""
    return args_to_config_class(AlgebraVerifyConfig, args)


def create_scan_config(args: list[str] | None = None) -> ScanConfig:
    """Create a ScanConfig from command line arguments and environment variables."""
    return args_to_config_class(ScanConfig, args)


def create_funcalc_config(args: list[str] | None = None) -> FuncalcConfig:
    """Create a FuncalcConfig from command line arguments and environment variables."""
    return args_to_config_class(FuncalcConfig, args)


def create_series_config(args: list[str] | None = None) -> SeriesConfig:
    """Create a SeriesConfig from command line arguments and environment variables."""
    return args_to_config_class(SeriesConfig, args)


def create_examples_config(args: list[str] | None = None) -> ExamplesConfig:
    """Create an ExamplesConfig from command line arguments and environment variables."""
    return args_to_config_class(ExamplesConfig, args)
