"""Functional tests for the octofc CLI.

These tests run the CLI in a subprocess, the way it is used from a shell,
and check artifacts and exit codes end to end.
"""

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from octofc_core.serialization import read_scan_csv
from octofc_core.suites import GOLDEN_NAMES

_SRC = Path(__file__).resolve().parents[2] / "src"


def _octofc(*args: str, cwd: Path) -> subprocess.CompletedProcess[str]:
    env = os.environ | {"PYTHONPATH": str(_SRC), "OCTOFC_LOGGING_HANDLER": "console-json"}
    return subprocess.run(  # noqa: S603
        [sys.executable, "-m", "octofc_app.main", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
        env=env,
        timeout=600,
        check=False,
    )


@pytest.mark.functional
class TestExamplesFunctional:
    """End-to-end runs of the CLI."""

    @pytest.mark.slow
    def test_examples_pass(self, tmp_path: Path) -> None:
        """Every worked example prints PASS and the run exits 0."""
        out = tmp_path / "examples.json"
        result = _octofc("examples", "--threads", "2", "--out", str(out), cwd=tmp_path)

        assert result.returncode == 0, result.stderr
        lines = result.stdout.strip().splitlines()
        assert lines == [f"{name}: PASS" for name in GOLDEN_NAMES]
        assert json.loads(out.read_text(encoding="utf-8"))["passed"]

    def test_scan_then_funcalc(self, tmp_path: Path, diag_op, operator_file) -> None:
        """A scan locates the spectrum and funcalc runs on the same operator."""
        op = operator_file(diag_op)
        e5 = "0,0,0,0,0,1,0,0"

        scan = _octofc(
            "scan", "--op", str(op), "--J", e5, "--xmin=-4", "--xmax", "4",
            "--ymin=-4", "--ymax", "4", "--res", "41", cwd=tmp_path,
        )  # fmt: skip
        assert scan.returncode == 0, scan.stderr
        rows = read_scan_csv(scan.stdout)
        near = [r for r in rows if float(r["min_sv"]) < 0.15]
        assert near
        assert all(abs(float(r["x"])) < 0.2 for r in near)

        calc = _octofc("funcalc", "--op", str(op), "--fn", "exp", "--J", e5, cwd=tmp_path)
        assert calc.returncode == 0, calc.stderr
        result = json.loads(calc.stdout)
        assert result["operator"]["n"] == 3
        assert result["function"] == "exp"

    def test_error_document_on_stderr(self, tmp_path: Path) -> None:
        """A missing operator file exits 2 with a JSON error on stderr."""
        result = _octofc("funcalc", "--op", "missing.json", "--fn", "pow:2", cwd=tmp_path)

        assert result.returncode == 2
        assert result.stdout == ""
        document = json.loads(result.stderr.strip().splitlines()[-1])
        assert document["error_code"] == "VALIDATION_ERROR"
