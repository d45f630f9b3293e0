"""
Serializing reports to JSON and CSV, and reading them back.

JSON keys are sorted and floats carry 12 significant digits, so a given
config and seed always produce the same bytes. Wall-clock time is only
written when requested.
"""
import io
import json
import math
from pathlib import Path

import pandas as pd

from src.report.models import CheckRecord, Report

CSV_COLUMNS = ["check", "anchor", "status", "measured", "bound", "tolerance"]

# infinities are written clamped to this magnitude; NaN is written as null
JSON_FLOAT_MAX = 1e300


def _round(value):
    if isinstance(value, float):
        if math.isfinite(value):
            return float(f"{value:.12g}")
        return None if math.isnan(value) else math.copysign(JSON_FLOAT_MAX, value)
    if isinstance(value, dict):
        return {k: _round(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_round(v) for v in value]
    return value


def emit(report: Report, fmt: str = "json", timing: bool = False) -> bytes:
    """
    Serialize a report.

    Args:
        report: Report to write
        fmt: "json" or "csv"
        timing: Include wall-clock time in JSON output

    Returns:
        UTF-8 bytes
    """
    if fmt == "json":
        data = report.model_dump(mode="json", exclude=None if timing else {"wall_clock"})
        return (json.dumps(_round(data), sort_keys=True, indent=2) + "\n").encode("utf-8")
    if fmt == "csv":
        df = pd.DataFrame([r.model_dump() for r in report.records], columns=CSV_COLUMNS)
        return df.to_csv(index=False, float_format="%.12g").encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")


def read_report(source, fmt: str = "json") -> Report:
    """
    Parse emitted bytes (or a path) back into a Report.

    CSV carries no config echo, so the result has an empty config.
    """
    data = Path(source).read_bytes() if isinstance(source, (str, Path)) else bytes(source)
    if fmt == "json":
        payload = json.loads(data.decode("utf-8"))
        for record in payload.get("records", []):
            for key in ("measured", "bound", "tolerance"):
                if record.get(key) is None:
                    record[key] = math.nan
        return Report.model_validate(payload)
    if fmt == "csv":
        df = pd.read_csv(io.BytesIO(data), dtype={"check": str, "anchor": str, "status": str})
        records = [CheckRecord(**row) for row in df.to_dict(orient="records")]
        return Report.build(config={}, records=records)
    raise ValueError(f"unknown format {fmt!r}")


def write_report(report: Report, path, fmt: str = "json", timing: bool = False) -> Path:
    """Write the serialized report, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(emit(report, fmt, timing=timing))
    return path
