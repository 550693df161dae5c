"""Structured logging for octofc.

structlog events are rendered through the stdlib logging tree so that
numpy warnings and ``concurrent.futures`` messages end up in the same
stream. Everything goes to stderr; stdout is reserved for artifacts.

Environment:
    OCTOFC_LOGGING_LEVEL: root level (default INFO).
    OCTOFC_LOGGING_PACKAGE_LEVELS: ``pkg:LEVEL,...`` overrides.
    OCTOFC_LOGGING_HANDLER: ``console-text`` or ``console-json``.
    OCTOFC_LOGGING_CONSOLE_COLOR: ``off``, ``auto`` or ``force``.
"""

import logging.config
import os
import sys
import time
from collections.abc import Iterator, Mapping
from contextlib import contextmanager
from enum import Enum
from typing import Any

import structlog
from structlog.contextvars import merge_contextvars
from structlog.dev import ConsoleRenderer, set_exc_info
from structlog.typing import EventDict, Processor, WrappedLogger

ENV_PREFIX = "OCTOFC_LOGGING_"


class ConsoleMode(str, Enum):
    """Colour handling of the text renderer."""

    OFF = "off"
    AUTO = "auto"
    FORCE = "force"


class LoggingHandler(str, Enum):
    """Named stderr handlers."""

    TEXT = "console-text"
    JSON = "console-json"


class LoggingLevel(str, Enum):
    """Stdlib level names."""

    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


# Thread pool chatter is only interesting when something breaks.
QUIET_PACKAGES: Mapping[str, LoggingLevel] = {"concurrent.futures": LoggingLevel.WARNING}


def _env(name: str, default: str) -> str:
    return os.environ.get(ENV_PREFIX + name, default)


def _parse_package_log_levels(text: str | None) -> dict[str, LoggingLevel]:
    if not text:
        return {}
    levels: dict[str, LoggingLevel] = {}
    for item in text.split(","):
        package, sep, level = item.partition(":")
        if not sep or not package.strip():
            raise ValueError(f"Cannot parse package log levels: '{text}'")  # noqa: TRY003
        levels[package.strip()] = LoggingLevel(level.strip().upper())
    return levels


def parse_logging_config() -> Mapping[str, Any]:
    """Read the ``OCTOFC_LOGGING_*`` variables.

    Returns:
        Keyword arguments for :func:`configure_logging`.

    Raises:
        ValueError: If a level, handler or package list is malformed.
    """
    package_levels = dict(QUIET_PACKAGES)
    package_levels.update(_parse_package_log_levels(_env("PACKAGE_LEVELS", "")))
    return {
        "logging_level": LoggingLevel(_env("LEVEL", "INFO").upper()),
        "package_log_levels": package_levels,
        "logging_handler": LoggingHandler(_env("HANDLER", LoggingHandler.TEXT.value)),
        "console_mode": ConsoleMode(_env("CONSOLE_COLOR", ConsoleMode.AUTO.value)),
    }


def _text_formatter(console_mode: ConsoleMode) -> str:
    if console_mode is ConsoleMode.AUTO:
        tty = getattr(sys.stderr, "isatty", None)
        return "console-color" if tty is not None and tty() else "console-no-color"
    return "console-color" if console_mode is ConsoleMode.FORCE else "console-no-color"


def _keep_tracebacks(
    _logger: WrappedLogger, _method_name: str, event_dict: EventDict
) -> EventDict:
    return event_dict


def _formatter(renderer: Processor, pre_chain: list[Processor]) -> dict[str, Any]:
    return {
        "()": structlog.stdlib.ProcessorFormatter,
        "processors": [structlog.stdlib.ProcessorFormatter.remove_processors_meta, renderer],
        "foreign_pre_chain": pre_chain,
    }


def _stderr_handler(formatter: str) -> dict[str, Any]:
    return {
        "level": "DEBUG",
        "class": "logging.StreamHandler",
        "stream": "ext://sys.stderr",
        "formatter": formatter,
    }


def configure_logging(
    logging_level: LoggingLevel,
    package_log_levels: Mapping[str, LoggingLevel],
    logging_handler: LoggingHandler = LoggingHandler.TEXT,
    console_mode: ConsoleMode = ConsoleMode.AUTO,
) -> None:
    """Route structlog and stdlib logging to one stderr handler."""
    timestamper = structlog.processors.TimeStamper(fmt="iso")
    pre_chain: list[Processor] = [
        structlog.stdlib.add_log_level,
        structlog.stdlib.add_logger_name,
        timestamper,
    ]
    handler = logging_handler.value
    logging.config.dictConfig(
        {
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {
                "console-no-color": _formatter(ConsoleRenderer(colors=False), pre_chain),
                "console-color": _formatter(ConsoleRenderer(colors=True), pre_chain),
                "json": _formatter(structlog.processors.JSONRenderer(), pre_chain),
            },
            "handlers": {
                LoggingHandler.TEXT.value: _stderr_handler(_text_formatter(console_mode)),
                LoggingHandler.JSON.value: _stderr_handler("json"),
            },
            "loggers": {
                package: {"handlers": [handler], "level": level.value, "propagate": False}
                for package, level in package_log_levels.items()
            },
            "root": {"handlers": [handler], "level": logging_level.value},
        },
    )
    structlog.configure(
        processors=[
            merge_contextvars,
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_log_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.PositionalArgumentsFormatter(),
            timestamper,
            structlog.processors.StackInfoRenderer(),
            set_exc_info,
            (
                _keep_tracebacks
                if logging_handler is LoggingHandler.TEXT
                else structlog.processors.dict_tracebacks
            ),
            structlog.stdlib.ProcessorFormatter.wrap_for_formatter,
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )


def setup_logging() -> None:
    """Configure logging from the environment."""
    configure_logging(**parse_logging_config())


@contextmanager
def observe_around(logger: Any, name: str, **context: Any) -> Iterator[None]:  # noqa: ANN401
    """Log the start, completion and failure of a block with its duration.

    Args:
        logger: A structlog logger.
        name: Event prefix; emits ``NAME_STARTED``, ``NAME_COMPLETED`` and
            ``NAME_FAILED``.
        **context: Extra key/value pairs attached to every event.
    """
    start = time.perf_counter()
    logger.info(f"{name}_STARTED", **context)
    try:
        yield
    except Exception:
        elapsed = round((time.perf_counter() - start) * 1000.0, 3)
        logger.warning(f"{name}_FAILED", duration_ms=elapsed, **context)
        raise
    elapsed = round((time.perf_counter() - start) * 1000.0, 3)
    logger.info(f"{name}_COMPLETED", duration_ms=elapsed, **context)
