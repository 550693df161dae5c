"""JSON and CSV input/output for operators, functions, vectors and results."""

import csv
import hashlib
import io
import json
import math
import sys
from collections.abc import Mapping
from pathlib import Path
from typing import Any

import numpy as np
import numpy.typing as npt

from octofc_core import __version__
from octofc_core.config import Tolerances
from octofc_core.exceptions import ValidationError
from octofc_core.function_registry import (
    BuildContext,
    FunctionFactoryRegistry,
    create_function_registry,
)
from octofc_core.oct_core import Octonion
from octofc_core.omodule import OctVector
from octofc_core.paralin import OctMatrix, Side, check_side
from octofc_core.slicefun import SliceFunction, SlicePolynomial
from octofc_core.spectra import ScanGrid

TOOL = "octofc"
SCAN_COLUMNS = (
    "x",
    "y",
    "min_sv",
    "invertible",
    "extendable",
    "liftable",
    "in_pullback",
    "in_pushforward",
)


def _number(value: Any, location: str) -> float:  # noqa: ANN401
    if isinstance(value, bool) or not isinstance(value, int | float):
        raise ValidationError(f"expected a number, got {type(value).__name__}", location)
    out = float(value)
    if not math.isfinite(out):
        raise ValidationError("expected a finite number", location)
    return out


def _list(value: Any, location: str, length: int | None = None) -> list[Any]:  # noqa: ANN401
    if not isinstance(value, list):
        raise ValidationError(f"expected an array, got {type(value).__name__}", location)
    if length is not None and len(value) != length:
        raise ValidationError(f"expected {length} items, got {len(value)}", location)
    return value


def parse_octonion(value: Any, location: str) -> Octonion:  # noqa: ANN401
    """Parse an array of 8 reals."""
    items = _list(value, location, 8)
    return np.array([_number(v, f"{location}[{k}]") for k, v in enumerate(items)])


def parse_octonion_text(text: str, location: str) -> Octonion:
    """Parse ``"a,b,c,d,e,f,g,h"`` from a command-line flag."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 8:  # noqa: PLR2004
        raise ValidationError(f"expected 8 comma-separated reals, got {len(parts)}", location)
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise ValidationError(f"cannot parse {text!r} as 8 reals", location) from None
    if not all(math.isfinite(v) for v in values):
        raise ValidationError("octonion coordinates must be finite", location)
    return np.array(values)


def parse_operator(data: Any) -> OctMatrix:  # noqa: ANN401
    """Parse ``{"n": int, "entries": n x n x 8}``."""
    if not isinstance(data, Mapping):
        raise ValidationError("operator JSON must be an object", "$")
    if "n" not in data:
        raise ValidationError("missing field", "n")
    n = data["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ValidationError("n must be a positive integer", "n")
    rows = _list(data.get("entries"), "entries", n)
    entries = np.zeros((n, n, 8))
    for i, row in enumerate(rows):
        cells = _list(row, f"entries[{i}]", n)
        for j, cell in enumerate(cells):
            entries[i, j] = parse_octonion(cell, f"entries[{i}][{j}]")
    return entries


def operator_to_json(t: OctMatrix) -> dict[str, Any]:
    return {"n": int(t.shape[0]), "entries": t.tolist()}


def parse_vector(data: Any) -> OctVector:  # noqa: ANN401
    """Parse an ``n x 8`` array."""
    rows = _list(data, "$")
    if not rows:
        raise ValidationError("vector must have at least one entry", "$")
    return np.stack([parse_octonion(r, f"[{k}]") for k, r in enumerate(rows)])


def parse_function(data: Any) -> SlicePolynomial:  # noqa: ANN401
    """Parse ``{"side": "left"|"right", "coeffs": [[8 reals], ...]}``."""
    if not isinstance(data, Mapping):
        raise ValidationError("function JSON must be an object", "$")
    side = data.get("side", "left")
    if side not in ("left", "right"):
        raise ValidationError("side must be 'left' or 'right'", "side")
    coeffs = _list(data.get("coeffs"), "coeffs")
    if not coeffs:
        raise ValidationError("coeffs must not be empty", "coeffs")
    parsed = [parse_octonion(c, f"coeffs[{k}]") for k, c in enumerate(coeffs)]
    return SlicePolynomial(side, np.stack(parsed))


def function_to_json(f: SlicePolynomial) -> dict[str, Any]:
    return {"side": f.side, "coeffs": f.coeffs.tolist()}


def read_json(path: str | Path) -> Any:  # noqa: ANN401
    """Read a JSON document.

    Raises:
        ValidationError: If the file is missing or malformed.
    """
    file = Path(path)
    try:
        text = file.read_text(encoding="utf-8")
    except OSError as e:
        raise ValidationError(f"cannot read {file}: {e.strerror}", str(file)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(
            f"malformed JSON in {file}: {e.msg}", f"line {e.lineno} column {e.colno}"
        ) from None


def load_operator(path: str | Path) -> OctMatrix:
    return parse_operator(read_json(path))


def load_vector(path: str | Path) -> OctVector:
    return parse_vector(read_json(path))


def load_function(
    spec: str,
    side: Side = "left",
    registry: FunctionFactoryRegistry | None = None,
    context: BuildContext | None = None,
) -> SliceFunction:
    """Resolve a builtin name or a function JSON path.

    Slice preserving file functions are moved to ``side``; others must match.
    ``context`` describes the contour for builtins that adapt to it.
    """
    check_side(side)
    builtins = registry or create_function_registry()
    if builtins.is_builtin(spec) and not Path(spec).exists():
        return builtins.build(spec, side, context)
    f = parse_function(read_json(spec))
    if f.side != side:
        if not f.is_slice_preserving:
            raise ValidationError(
                f"function side {f.side!r} does not match requested side {side!r}",
                "side",
            )
        f = SlicePolynomial(side, f.coeffs)
    return f


def _canonical(value: Any) -> Any:  # noqa: ANN401
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Mapping):
        return {str(k): _canonical(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [_canonical(v) for v in value]
    if isinstance(value, Path):
        return str(value)
    return value


def config_hash(config: Mapping[str, Any]) -> str:
    """sha256 of the canonical JSON of a command configuration."""
    text = json.dumps(_canonical(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def provenance(config: Mapping[str, Any], tolerances: Tolerances) -> dict[str, Any]:
    return {
        "tool": TOOL,
        "version": __version__,
        "config_hash": config_hash(config),
        "tolerances": tolerances.as_dict(),
    }


def _finite_or_text(value: Any) -> Any:  # noqa: ANN401
    # JSON has no infinities
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {k: _finite_or_text(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_finite_or_text(v) for v in value]
    return value


def dumps(payload: Mapping[str, Any]) -> str:
    """Deterministic JSON text: sorted keys, indent 2, trailing newline."""
    return json.dumps(_finite_or_text(_canonical(payload)), sort_keys=True, indent=2) + "\n"


def write_text(text: str, out: str | Path | None) -> None:
    """Write to ``out`` or stdout."""
    if out is None or str(out) in ("", "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    Path(out).write_text(text, encoding="utf-8")


def scan_csv(scan: ScanGrid, prov: Mapping[str, Any]) -> str:
    """Scan rows as CSV preceded by a ``# provenance`` comment line."""
    buffer = io.StringIO()
    buffer.write("# provenance " + json.dumps(_canonical(prov), sort_keys=True) + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SCAN_COLUMNS)
    for x, y, min_sv, *flags in scan.rows():
        writer.writerow([repr(x), repr(y), repr(min_sv), *(str(f).lower() for f in flags)])
    return buffer.getvalue()


def read_scan_csv(text: str) -> list[dict[str, str]]:
    """Parse scan CSV text, skipping comment lines."""
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(lines))


def octonion_list(values: npt.NDArray[np.float64]) -> list[float]:
    return [float(v) for v in np.asarray(values).ravel()]
