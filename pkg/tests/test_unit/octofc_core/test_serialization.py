"""Tests for JSON and CSV input/output."""

import json
import math

import numpy as np
import pytest

from octofc_core import __version__
from octofc_core.config import Tolerances
from octofc_core.exceptions import ValidationError
from octofc_core.function_registry import BuildContext
from octofc_core.oct_core import basis
from octofc_core.serialization import (
    SCAN_COLUMNS,
    config_hash,
    dumps,
    function_to_json,
    load_function,
    load_operator,
    load_vector,
    octonion_list,
    operator_to_json,
    parse_function,
    parse_octonion_text,
    parse_operator,
    parse_vector,
    provenance,
    read_json,
    read_scan_csv,
    scan_csv,
    write_text,
)
from octofc_core.slicefun import SlicePolynomial, StemFunction
from octofc_core.spectra import GridSpec, scan_slice

E1 = [0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
ZERO = [0.0] * 8


class TestParseOperator:
    """Test operator documents."""

    def test_valid_operator(self, nonsphere_op) -> None:
        """Entries are read row by row."""
        t = parse_operator(operator_to_json(nonsphere_op))
        np.testing.assert_array_equal(t, nonsphere_op)

    def test_missing_n(self) -> None:
        """n is required."""
        with pytest.raises(ValidationError) as exc_info:
            parse_operator({"entries": [[E1]]})
        assert exc_info.value.location == "n"

    @pytest.mark.parametrize("n", [0, True, "2", 1.5])
    def test_invalid_n(self, n: object) -> None:
        """n must be a positive integer."""
        with pytest.raises(ValidationError) as exc_info:
            parse_operator({"n": n, "entries": [[E1]]})
        assert exc_info.value.location == "n"

    def test_row_count(self) -> None:
        """entries must have n rows."""
        with pytest.raises(ValidationError) as exc_info:
            parse_operator({"n": 2, "entries": [[E1, E1]]})
        assert exc_info.value.location == "entries"

    def test_short_entry(self) -> None:
        """Each entry has eight coordinates."""
        with pytest.raises(ValidationError) as exc_info:
            parse_operator({"n": 2, "entries": [[E1, E1[:7]], [ZERO, ZERO]]})
        assert exc_info.value.location == "entries[0][1]"

    def test_non_numeric_coordinate(self) -> None:
        """Coordinates are finite numbers."""
        bad = [*E1[:3], "x", *E1[4:]]
        with pytest.raises(ValidationError) as exc_info:
            parse_operator({"n": 1, "entries": [[bad]]})
        assert exc_info.value.location == "entries[0][0][3]"

    def test_not_an_object(self) -> None:
        """The document is an object."""
        with pytest.raises(ValidationError):
            parse_operator([1, 2])


class TestParseOthers:
    """Test octonion flags, vectors and function documents."""

    def test_octonion_text(self) -> None:
        """Flags carry eight comma-separated reals."""
        np.testing.assert_array_equal(parse_octonion_text("0, 1,0,0,0,0,0,0", "J"), basis(1))
        for text in ("1,2", "a,0,0,0,0,0,0,0", "inf,0,0,0,0,0,0,0"):
            with pytest.raises(ValidationError) as exc_info:
                parse_octonion_text(text, "J")
            assert exc_info.value.location == "J"

    def test_vector(self) -> None:
        """Vectors are non-empty lists of octonions."""
        v = parse_vector([E1, ZERO])
        assert v.shape == (2, 8)
        with pytest.raises(ValidationError):
            parse_vector([])
        with pytest.raises(ValidationError) as exc_info:
            parse_vector([E1, [1.0]])
        assert exc_info.value.location == "[1]"

    def test_function(self) -> None:
        """Functions default to the left side."""
        f = parse_function({"coeffs": [ZERO, E1]})
        assert f.side == "left"
        assert f.degree == 1
        assert function_to_json(f) == {"side": "left", "coeffs": [ZERO, E1]}
        with pytest.raises(ValidationError) as exc_info:
            parse_function({"side": "up", "coeffs": [E1]})
        assert exc_info.value.location == "side"
        with pytest.raises(ValidationError) as exc_info:
            parse_function({"coeffs": []})
        assert exc_info.value.location == "coeffs"


class TestFiles:
    """Test reading documents from disk."""

    def test_missing_file(self, tmp_path) -> None:
        """Unreadable files are validation errors."""
        with pytest.raises(ValidationError):
            read_json(tmp_path / "absent.json")

    def test_malformed_json(self, tmp_path) -> None:
        """The error names the line and column."""
        path = tmp_path / "bad.json"
        path.write_text('{"n": ', encoding="utf-8")
        with pytest.raises(ValidationError) as exc_info:
            read_json(path)
        assert exc_info.value.location.startswith("line 1 column")

    def test_load_operator_and_vector(self, operator_file, write_json, diag_op) -> None:
        """Operator and vector files round into arrays."""
        np.testing.assert_array_equal(load_operator(operator_file(diag_op)), diag_op)
        assert load_vector(write_json("v.json", [E1, E1, ZERO])).shape == (3, 8)

    def test_load_builtin_function(self) -> None:
        """Builtin names are resolved by the registry."""
        assert isinstance(load_function("exp", "left"), StemFunction)
        f = load_function("pow:2", "right")
        assert isinstance(f, SlicePolynomial)
        assert f.side == "right"

    def test_load_builtin_with_context(self) -> None:
        """The contour context reaches builtins that adapt to it."""
        f = load_function("exp:auto", "left", context=BuildContext(extent=1.0, tol=1e-8))
        assert isinstance(f, SlicePolynomial)
        assert f.degree == 11

    def test_load_function_file(self, write_json) -> None:
        """Slice preserving files move to the requested side."""
        path = write_json("f.json", {"side": "left", "coeffs": [[2.0, *ZERO[1:]]]})
        assert load_function(str(path), "right").side == "right"

    def test_load_function_side_mismatch(self, write_json) -> None:
        """Octonionic coefficients keep their side."""
        path = write_json("f.json", {"side": "left", "coeffs": [E1]})
        with pytest.raises(ValidationError) as exc_info:
            load_function(str(path), "right")
        assert exc_info.value.location == "side"


class TestProvenance:
    """Test configuration hashes and provenance records."""

    def test_hash_is_order_independent(self) -> None:
        """Key order does not change the hash."""
        assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})
        assert config_hash({"a": 1}) != config_hash({"a": 2})

    def test_numpy_values_hash_like_lists(self) -> None:
        """Arrays hash like the equivalent lists."""
        assert config_hash({"j": np.array(E1)}) == config_hash({"j": E1})

    def test_provenance(self, tolerances) -> None:
        """Provenance names the tool, version, hash and tolerances."""
        prov = provenance({"op": "op.json"}, tolerances)
        assert prov["tool"] == "octofc"
        assert prov["version"] == __version__
        assert prov["config_hash"] == config_hash({"op": "op.json"})
        assert prov["tolerances"] == Tolerances().as_dict()


class TestOutput:
    """Test deterministic output writers."""

    def test_dumps(self) -> None:
        """Keys are sorted, infinities become text and the text ends with a newline."""
        text = dumps({"b": math.inf, "a": np.float64(1.5), "c": np.arange(2)})
        assert text.endswith("\n")
        assert json.loads(text) == {"a": 1.5, "b": "inf", "c": [0, 1]}
        assert text.index('"a"') < text.index('"b"')

    def test_write_text(self, tmp_path, capsys) -> None:
        """Text goes to a file or to stdout."""
        path = tmp_path / "out.txt"
        write_text("hello\n", path)
        assert path.read_text(encoding="utf-8") == "hello\n"
        write_text("world\n", None)
        write_text("dash\n", "-")
        assert capsys.readouterr().out == "world\ndash\n"

    def test_scan_csv(self, tolerances, diag_op) -> None:
        """Scans serialize with a provenance comment and fixed columns."""
        scan = scan_slice(diag_op, basis(1), GridSpec(-1.0, 1.0, 0.0, 1.0, 3))
        text = scan_csv(scan, provenance({"res": 3}, tolerances))
        assert text.startswith("# provenance {")
        assert text.splitlines()[1] == ",".join(SCAN_COLUMNS)
        rows = read_scan_csv(text)
        assert len(rows) == 9
        singular = next(r for r in rows if float(r["x"]) == 0.0 and float(r["y"]) == 1.0)
        assert singular["invertible"] == "false"
        assert rows[0]["in_pullback"] == "true"

    def test_octonion_list(self) -> None:
        """Arrays flatten to plain floats."""
        assert octonion_list(basis(1)) == E1
