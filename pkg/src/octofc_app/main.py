"""Command-line interface and main entry point.

This module provides the ``octofc`` CLI: argument parsing, configuration
loading, logging setup and the mapping of library errors onto exit codes.
Artifacts go to stdout or ``--out``; logs and error documents go to stderr.
"""
# ruff: noqa: T201

import json
import sys
from collections.abc import Callable
from dataclasses import asdict
from datetime import UTC, datetime
from typing import Any

import attrs
import numpy as np
import structlog
from structlog.contextvars import bound_contextvars

from octofc_app.app_config import (
    AlgebraVerifyConfig,
    ExamplesConfig,
    FuncalcConfig,
    ScanConfig,
    SeriesConfig,
    create_algebra_verify_config,
    create_examples_config,
    create_funcalc_config,
    create_scan_config,
    create_series_config,
)
from octofc_core import __version__
from octofc_core.config import Tolerances, default_tolerances
from octofc_core.exceptions import (
    ConfigurationError,
    ExitCode,
    OctofcError,
    exit_code_for,
)
from octofc_core.funcalc import (
    CalcRequest,
    associator_corrected_calculus,
    default_contour,
    evaluate_calculus,
)
from octofc_core.function_registry import BuildContext
from octofc_core.logging import (
    ConsoleMode,
    LoggingLevel,
    configure_logging,
    observe_around,
    parse_logging_config,
    setup_logging,
)
from octofc_core.oct_core import check_unit_imaginary
from octofc_core.paralin import check_side, modulus_norm
from octofc_core.serialization import (
    dumps,
    load_function,
    load_operator,
    octonion_list,
    operator_to_json,
    parse_octonion_text,
    provenance,
    scan_csv,
    write_text,
)
from octofc_core.slicefun import SliceContour
from octofc_core.spectra import (
    GridSpec,
    SlicePoint,
    check_kind,
    resolvent_series,
    scan_slice,
    terms_for_tolerance,
)
from octofc_core.suites import run_algebra_suite, run_golden_examples, run_series_comparison

logger = structlog.get_logger(__name__)

PROGRAM = "octofc"
METHODS = ("components", "associator")
INTERRUPTED = 130
# Settings that do not change an artifact stay out of its config hash.
_UNHASHED = frozenset({"out", "threads", "log_level", "dev_mode"})


def generate_run_id(command: str) -> str:
    """Generate a unique run ID combining the command and a timestamp.

    Args:
        command: The CLI command being run.

    Returns:
        A run ID in the format: octofc_{command}_{timestamp}
    """
    timestamp = datetime.now(tz=UTC).strftime("%Y%m%d%H%M%S")
    return f"{PROGRAM}_{command}_{timestamp}"


def _configure_logging(log_level: str, *, dev_mode: bool) -> None:
    settings = dict(parse_logging_config())
    configure_logging(
        logging_level=LoggingLevel(log_level.upper()),
        package_log_levels=settings["package_log_levels"],
        logging_handler=settings["logging_handler"],
        console_mode=ConsoleMode.FORCE if dev_mode else settings["console_mode"],
    )


def _hashed_config(config: object) -> dict[str, Any]:
    return {
        k: v for k, v in attrs.asdict(config).items() if k not in _UNHASHED  # type: ignore[arg-type]
    }


def _report_error(error: BaseException) -> int:
    code = exit_code_for(error)
    document = (
        error.to_dict()
        if isinstance(error, OctofcError)
        else {"error_code": "INTERNAL_ERROR", "message": str(error)}
    )
    print(json.dumps(document, sort_keys=True), file=sys.stderr)
    return code


def _execute(
    command: str,
    load: Callable[[], Any],
    body: Callable[[Any], ExitCode],
) -> int:
    """Load the command config, then run the command body with error mapping."""
    setup_logging()
    try:
        config = load()
        _configure_logging(config.log_level, dev_mode=config.dev_mode)
    except Exception as e:
        logger.exception("COMMAND_STARTUP_ERROR", command=command, error=str(e))
        return _report_error(e)
    event = command.upper().replace("-", "_") + "_COMMAND"
    with bound_contextvars(command=command, run_id=generate_run_id(command)):
        try:
            with observe_around(logger, event):
                return body(config)
        except KeyboardInterrupt:
            logger.info("COMMAND_CANCELLED_BY_USER")
            return INTERRUPTED
        except Exception as e:
            logger.exception("COMMAND_ERROR", error=str(e))
            return _report_error(e)


def _suite_exit(passed: bool) -> ExitCode:  # noqa: FBT001
    return ExitCode.OK if passed else ExitCode.TOLERANCE


def _algebra_verify(config: AlgebraVerifyConfig) -> ExitCode:
    tol = default_tolerances()
    report = run_algebra_suite(config.samples, config.seed, tol)
    payload = report.to_dict() | {"provenance": provenance(_hashed_config(config), tol)}
    write_text(dumps(payload), config.out)
    return _suite_exit(report.passed)


def _scan(config: ScanConfig) -> ExitCode:
    tol = default_tolerances()
    t = load_operator(config.op)
    j = check_unit_imaginary(parse_octonion_text(config.j, "j"))
    grid = GridSpec(config.xmin, config.xmax, config.ymin, config.ymax, config.res)
    scan = scan_slice(
        t,
        j,
        grid,
        check_kind(config.kind),
        n_max=config.horizon,
        tolerances=tol,
        threads=config.threads,
    )
    logger.info(
        "SCAN_SUMMARY",
        regions=len(scan.flagged_regions()),
        outer_violations=scan.outer_violations,
        power_associative=scan.power_associative,
    )
    write_text(scan_csv(scan, provenance(_hashed_config(config), tol)), config.out)
    return ExitCode.OK


def _calc_request(config: FuncalcConfig, tol: Tolerances) -> CalcRequest:
    side = check_side(config.side)
    t = load_operator(config.op)
    j = check_unit_imaginary(parse_octonion_text(config.j, "j"))
    if config.radius is None:
        contour = default_contour(t, j, config.nodes, config.center)
    else:
        contour = SliceContour(j, config.center, config.radius, config.nodes)
    context = BuildContext(abs(contour.center) + contour.radius, tol.quadrature_tol)
    return CalcRequest(
        t=t,
        f=load_function(config.fn, side, context=context),
        j=j,
        side=side,
        contour=contour,
        allow_non_power_associative=config.allow_non_power_associative,
        tolerances=tol,
        threads=config.threads,
    )


def _funcalc(config: FuncalcConfig) -> ExitCode:
    if config.method not in METHODS:
        raise ConfigurationError(
            f"method must be one of {', '.join(METHODS)}, got {config.method!r}", "method"
        )
    tol = default_tolerances()
    request = _calc_request(config, tol)
    result = evaluate_calculus(request)
    payload: dict[str, Any] = {
        "operator": operator_to_json(result.operator),
        "function": config.fn,
        "side": result.side,
        "j": octonion_list(result.j),
        "contour": {
            "center": result.center,
            "radius": result.radius,
            "nodes": result.nodes,
        },
        "error_estimate": result.error_estimate,
        "power_associative": asdict(result.power_assoc),
        "provenance": provenance(_hashed_config(config), tol),
    }
    if config.method == "associator":
        corrected = associator_corrected_calculus(request)
        payload["associator_operator"] = operator_to_json(corrected)
        payload["method_gap"] = float(np.linalg.norm(corrected - result.operator))
    write_text(dumps(payload), config.out)
    return ExitCode.OK


def _series(config: SeriesConfig) -> ExitCode:
    tol = default_tolerances()
    side = check_side(config.side)
    t = load_operator(config.op)
    default_j = check_unit_imaginary(parse_octonion_text(config.j, "j"))
    s = SlicePoint.from_octonion(parse_octonion_text(config.s, "s"), default_j)
    n_terms = config.n_terms or terms_for_tolerance(
        modulus_norm(t), s.modulus, tol.quadrature_tol
    )
    report = run_series_comparison(t, s, side, n_terms, tol, config.seed)
    payload = report.to_dict() | {
        "resolvent": operator_to_json(resolvent_series(t, s, side, n_terms)),
        "s": octonion_list(s.value),
        "provenance": provenance(_hashed_config(config), tol),
    }
    write_text(dumps(payload), config.out)
    return _suite_exit(report.passed)


def _examples(config: ExamplesConfig) -> ExitCode:
    tol = default_tolerances()
    report = run_golden_examples(tol, config.threads)
    for line in report.lines():
        print(line)
    if config.out:
        payload = report.to_dict() | {"provenance": provenance({}, tol)}
        write_text(dumps(payload), config.out)
    return _suite_exit(report.passed)


def algebra_verify_command(args: list[str] | None = None) -> int:
    """Check the octonion identities on random samples and write a JSON report.

    Args:
        args: Command line arguments after the command name.
    """
    return _execute(
        "algebra-verify", lambda: create_algebra_verify_config(args), _algebra_verify
    )


def scan_command(args: list[str] | None = None) -> int:
    """Scan a slice plane for resolvent membership and write CSV.

    Args:
        args: Command line arguments after the command name.
    """
    return _execute("scan", lambda: create_scan_config(args), _scan)


def funcalc_command(args: list[str] | None = None) -> int:
    """Evaluate the left or right functional calculus and write result JSON.

    Args:
        args: Command line arguments after the command name.
    """
    return _execute("funcalc", lambda: create_funcalc_config(args), _funcalc)


def series_command(args: list[str] | None = None) -> int:
    """Compare the resolvent series against the regular inverse.

    Args:
        args: Command line arguments after the command name.
    """
    return _execute("series", lambda: create_series_config(args), _series)


def examples_command(args: list[str] | None = None) -> int:
    """Reproduce the worked examples and print PASS/FAIL per example.

    Args:
        args: Command line arguments after the command name.
    """
    return _execute("examples", lambda: create_examples_config(args), _examples)


def show_help() -> None:
    """Show help information for the CLI."""
    help_text = """
octofc - octonionic functional calculus toolkit

Usage:
    octofc <command> [options]

Commands:
    algebra-verify          Check octonion identities on random samples
    scan                    Scan a slice plane for spectral points (CSV)
    funcalc                 Run the left or right functional calculus (JSON)
    series                  Compare the resolvent series with the regular inverse
    examples                Reproduce the worked examples (PASS/FAIL per example)
    --help, -h              Show this help message
    --version, -v           Show version information

Options for algebra-verify:
    --samples <k>           Random samples per identity (default 10000)
    --seed <s>              Random seed (default 0)

Options for scan:
    --op <file>             Operator JSON {"n": int, "entries": n x n x 8}
    --J <a,b,c,d,e,f,g,h>   Slice unit (default e1)
    --xmin/--xmax/--ymin/--ymax <x>  Grid bounds (default [-2, 2]^2)
    --res <k>               Grid points per axis (default 101)
    --kind <kind>           pullback or pushforward
    --horizon <n>           Power horizon of the extendability test

Options for funcalc:
    --op <file>             Operator JSON
    --fn <spec>             Function JSON or builtin: pow:m, exp:N, exp:auto, exp
    --J <a,b,c,d,e,f,g,h>   Slice unit (default e1)
    --radius <r>            Contour radius (default 1.1 (||T|| + 0.1))
    --center <c>            Contour center on the real axis
    --nodes <m>             Quadrature nodes, a power of two (default 1024)
    --side <side>           left or right
    --method <m>            components or associator
    --allow-non-power-associative

Options for series:
    --op <file>             Operator JSON
    --s <a,b,c,d,e,f,g,h>   Spectral point with |s| > ||T||
    --N <n>                 Truncation (default from the tail bound)
    --side <side>           left or right

Common options:
    --out <file>            Output path (stdout if unset)
    --threads <n>           Worker threads (or OCTOFC_THREADS)
    --log-level <level>     Log level (DEBUG, INFO, WARNING, ERROR)
    --dev-mode              Enable development mode

Values may start with a minus sign: --xmin -4 and --s -2,1,0,0,0,0,0,0 both work.

Exit codes:
    0 ok, 2 configuration or input error, 3 numerical precondition failure,
    4 tolerance breach or failed verification

Examples:
    octofc examples
    octofc scan --op diag.json --J 0,0,0,0,0,1,0,0 --res 201 --out scan.csv
    octofc funcalc --op diag.json --fn pow:2 --radius 4 --nodes 1024
    octofc series --op diag.json --s 0,0,0,5,0,0,0,0 --N 60 --side right
"""
    print(help_text)


def _print_version() -> None:
    print(f"{PROGRAM}, version {__version__}")


def main() -> None:
    """Main entry point for the CLI."""
    min_args = 2
    if len(sys.argv) < min_args:
        show_help()
        sys.exit(ExitCode.FAILURE)

    command = sys.argv[1]
    args = sys.argv[2:] if len(sys.argv) > min_args else []

    dispatch: dict[str, Callable[[], int | None]] = {
        "algebra-verify": lambda: algebra_verify_command(args),
        "scan": lambda: scan_command(args),
        "funcalc": lambda: funcalc_command(args),
        "series": lambda: series_command(args),
        "examples": lambda: examples_command(args),
        "--help": show_help,
        "-h": show_help,
        "help": show_help,
        "--version": _print_version,
        "-v": _print_version,
        "version": _print_version,
    }
    handler = dispatch.get(command)
    if handler is None:
        show_help()
        sys.exit(ExitCode.FAILURE)
    code = handler()
    sys.exit(int(code or ExitCode.OK))


if __name__ == "__main__":
    main()
