"""PyTest configuration and shared test fixtures.

This module provides PyTest configuration, shared operator fixtures, and
helpers for writing operator and function JSON files used across tests.
"""

import json
import sys
from collections.abc import Callable, Iterator
from pathlib import Path
from typing import Any

import numpy as np
import pytest

# Ensure `src` is on the import path for local test runs
_PROJECT_ROOT = Path(__file__).resolve().parents[1]
_SRC_PATH = _PROJECT_ROOT / "src"
if str(_SRC_PATH) not in sys.path:
    sys.path.insert(0, str(_SRC_PATH))

from octofc_core.config import Tolerances, default_tolerances  # noqa: E402
from octofc_core.oct_core import basis  # noqa: E402
from octofc_core.paralin import OctMatrix, diagonal  # noqa: E402


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded random generator."""
    return np.random.default_rng(12345)


@pytest.fixture
def tolerances() -> Tolerances:
    """Default tolerance set, independent of the process environment."""
    return Tolerances()


@pytest.fixture(autouse=True)
def _fresh_tolerances() -> Iterator[None]:
    """Drop the cached environment tolerances around each test."""
    default_tolerances.cache_clear()
    yield
    default_tolerances.cache_clear()


@pytest.fixture
def diag_op() -> OctMatrix:
    """``diag(e1, 2 e2, 3 e4)``."""
    return diagonal([basis(1), 2.0 * basis(2), 3.0 * basis(4)])


@pytest.fixture
def nonsphere_op() -> OctMatrix:
    """``[[0, -e1], [e1, 0]]``."""
    t = np.zeros((2, 2, 8))
    t[0, 1] = -basis(1)
    t[1, 0] = basis(1)
    return t


@pytest.fixture
def write_json(tmp_path: Path) -> Callable[[str, Any], Path]:
    """Write a JSON document under ``tmp_path`` and return its path."""

    def _write(name: str, document: Any) -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path

    return _write


@pytest.fixture
def operator_file(
    write_json: Callable[[str, Any], Path],
) -> Callable[[OctMatrix], Path]:
    """Write an OctMatrix as operator JSON."""

    def _write(t: OctMatrix, name: str = "op.json") -> Path:
        return write_json(name, {"n": int(t.shape[0]), "entries": t.tolist()})

    return _write
