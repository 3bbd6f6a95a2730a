"""Report serialization: rounding, canonical bytes, CSV projection, schema."""

import json
import math

import jsonschema
import numpy as np
import pytest

from rankgap.reports import (
    PER_USER_COLUMNS,
    canonical_json_bytes,
    load_report,
    per_user_csv_bytes,
    report_emit,
    report_schema,
    round_sig,
)


# ---------------------------------------------------------------------------
# Significant-digit rounding
# ---------------------------------------------------------------------------

def test_round_sig_truncates_to_twelve_digits():
    assert round_sig(0.7540348790056394) == 0.754034879006
    assert round_sig(1.0001249796908003) == 1.00012497969
    assert round_sig(2.0) == 2.0
    assert round_sig(0.0) == 0.0
    assert round_sig(-1.5) == -1.5


def test_round_sig_is_idempotent():
    for x in (math.pi, 1e-13, 123456.789012345, 9.999999999999e11):
        assert round_sig(round_sig(x)) == round_sig(x)


def test_round_sig_rejects_non_finite():
    for bad in (math.inf, -math.inf, math.nan):
        with pytest.raises(ValueError, match="finite"):
            round_sig(bad)


# ---------------------------------------------------------------------------
# Canonical JSON bytes
# ---------------------------------------------------------------------------

def test_canonical_bytes_ignore_insertion_order():
    a = {"b": 1.23456789012345, "a": [1, 2, {"y": 0.1, "x": 0.2}]}
    b = {"a": [1, 2, {"x": 0.2, "y": 0.1}], "b": 1.23456789012345}
    assert canonical_json_bytes(a) == canonical_json_bytes(b)


def test_canonical_bytes_end_with_one_newline():
    data = canonical_json_bytes({"k": 1})
    assert data.endswith(b"\n") and not data.endswith(b"\n\n")
    assert b"\r" not in data


def test_canonical_bytes_round_floats_and_accept_numpy():
    report = {
        "x": np.float64(0.7540348790056394),
        "n": np.int64(7),
        "flag": np.bool_(True),
        "arr": [np.float64(1.0), 2],
    }
    decoded = json.loads(canonical_json_bytes(report))
    assert decoded == {"x": 0.754034879006, "n": 7, "flag": True, "arr": [1.0, 2]}


def test_canonical_bytes_stringify_integer_keys():
    decoded = json.loads(canonical_json_bytes({"m": {0: "a", 1: "b"}}))
    assert decoded["m"] == {"0": "a", "1": "b"}


def test_canonical_bytes_reject_key_collisions():
    with pytest.raises(ValueError, match="duplicate key"):
        canonical_json_bytes({"m": {0: "a", "0": "b"}})


def test_canonical_bytes_reject_foreign_types():
    with pytest.raises(TypeError, match="not serializable"):
        canonical_json_bytes({"x": {1, 2}})


def test_canonical_bytes_reject_non_finite_floats():
    with pytest.raises(ValueError, match="finite"):
        canonical_json_bytes({"x": math.inf})


def test_tuples_and_lists_serialize_alike():
    assert canonical_json_bytes({"v": (1, 2)}) == canonical_json_bytes({"v": [1, 2]})


# ---------------------------------------------------------------------------
# Per-user CSV projection
# ---------------------------------------------------------------------------

def test_per_user_csv_layout():
    report = {
        "per_user": [
            {
                "user": 0,
                "class": "majority",
                "truthful_item": 0,
                "truthful_welfare": 1.0,
                "collective_item": 0,
                "collective_welfare": 1.0,
            },
            {
                "user": 400,
                "class": "minority",
                "truthful_item": None,
                "truthful_welfare": 0.25,
                "collective_item": 4,
                "collective_welfare": True,
            },
        ]
    }
    lines = per_user_csv_bytes(report).decode("utf-8").splitlines()
    assert lines[0] == ",".join(PER_USER_COLUMNS)
    assert lines[0] == "user,class,truthful_item,truthful_welfare,collective_item,collective_welfare"
    assert lines[1] == "0,majority,0,1,0,1"
    assert lines[2] == "400,minority,,0.25,4,true"
    assert len(lines) == 3


def test_per_user_csv_requires_the_table():
    with pytest.raises(ValueError, match="per_user"):
        per_user_csv_bytes({"alpha": 2.0})


def test_per_user_csv_joins_item_lists_with_pipes():
    report = {
        "per_user": [
            {
                "user": 1,
                "class": "majority",
                "truthful_item": [0, 2],
                "truthful_welfare": 0.5,
                "collective_item": 0,
                "collective_welfare": 0.5,
            }
        ]
    }
    lines = per_user_csv_bytes(report).decode("utf-8").splitlines()
    assert lines[1] == "1,majority,0|2,0.5,0,0.5"


# ---------------------------------------------------------------------------
# Emission and loading
# ---------------------------------------------------------------------------

def test_emit_writes_canonical_json(tmp_path):
    report = {"alpha": 2.1, "z": 1, "a": [0.1]}
    path = report_emit(report, "json", tmp_path / "nested" / "dir", "run")
    assert path.name == "run.json"
    assert path.read_bytes() == canonical_json_bytes(report)
    assert load_report(path) == json.loads(canonical_json_bytes(report))


def test_emit_writes_the_csv_projection(tmp_path):
    report = {
        "per_user": [
            {
                "user": 0,
                "class": "majority",
                "truthful_item": 0,
                "truthful_welfare": 1.0,
                "collective_item": 0,
                "collective_welfare": 1.0,
            }
        ]
    }
    path = report_emit(report, "csv", tmp_path, "run")
    assert path.read_bytes() == per_user_csv_bytes(report)


def test_emit_rejects_unknown_formats(tmp_path):
    with pytest.raises(ValueError, match="json or csv"):
        report_emit({}, "yaml", tmp_path, "run")


# ---------------------------------------------------------------------------
# Shipped schema
# ---------------------------------------------------------------------------

def test_schema_loads_and_validates_itself():
    schema = report_schema()
    assert schema["$schema"] == "http://json-schema.org/draft-07/schema#"
    jsonschema.Draft7Validator.check_schema(schema)


def test_schema_rejects_a_malformed_report():
    schema = report_schema()
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({"preset": "multigroup"}, schema)
