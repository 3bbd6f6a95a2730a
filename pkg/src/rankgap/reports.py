"""Canonical report serialization: stable bytes, bounded float precision.

Reports are plain dicts of JSON-safe values.  Before encoding, every float is
rounded to 12 significant digits (and must be finite), keys are sorted, and
the line terminator is fixed, so the same report serializes to the same bytes
on every platform.  The per-user table has a fixed CSV projection.
"""

from __future__ import annotations

import csv
import io
import json
import math
from importlib import resources
from pathlib import Path

SIG_DIGITS = 12

PER_USER_COLUMNS = (
    "user",
    "class",
    "truthful_item",
    "truthful_welfare",
    "collective_item",
    "collective_welfare",
)

__all__ = [
    "SIG_DIGITS",
    "PER_USER_COLUMNS",
    "round_sig",
    "canonical_json_bytes",
    "per_user_csv_bytes",
    "report_emit",
    "load_report",
    "report_schema",
]


def round_sig(x: float) -> float:
    """Nearest double of x printed at SIG_DIGITS significant digits."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"reports carry finite numbers only, got {x}")
    return float(format(x, f".{SIG_DIGITS}g"))


def _canon(obj):
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return round_sig(obj)
    if isinstance(obj, dict):
        out = {}
        for key, value in obj.items():
            if not isinstance(key, str):
                key = str(key)
            if key in out:
                raise ValueError(f"duplicate key {key!r} after string conversion")
            out[key] = _canon(value)
        return out
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    if hasattr(obj, "item"):
        # numpy scalar
        return _canon(obj.item())
    raise TypeError(f"report value of type {type(obj).__name__} is not serializable")


def canonical_json_bytes(report: dict) -> bytes:
    text = json.dumps(_canon(report), sort_keys=True, indent=2, ensure_ascii=True)
    return (text + "\n").encode("utf-8")


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format(round_sig(value), f".{SIG_DIGITS}g")
    if isinstance(value, (list, tuple)):
        return "|".join(str(int(v)) for v in value)
    return str(value)


def per_user_csv_bytes(report: dict) -> bytes:
    """Fixed-column CSV projection of the report's per-user table."""
    rows = report.get("per_user")
    if rows is None:
        raise ValueError("report has no per_user table to emit as CSV")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PER_USER_COLUMNS)
    for row in rows:
        writer.writerow([_cell(row.get(col)) for col in PER_USER_COLUMNS])
    return buf.getvalue().encode("utf-8")


def report_emit(report: dict, fmt: str, out_dir, name: str) -> Path:
    """Write the report under out_dir as <name>.<fmt>; returns the path."""
    if fmt not in ("json", "csv"):
        raise ValueError(f"format must be json or csv, got {fmt!r}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{name}.{fmt}"
    data = canonical_json_bytes(report) if fmt == "json" else per_user_csv_bytes(report)
    path.write_bytes(data)
    return path


def load_report(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def report_schema() -> dict:
    """The run-report JSON schema shipped with the package."""
    with resources.files("rankgap").joinpath("data", "run_report.schema.json").open(
        "r", encoding="utf-8"
    ) as fh:
        return json.load(fh)
