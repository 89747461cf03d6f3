"""Deterministic CSV and JSON serialization of result rows."""
from __future__ import annotations

import csv
import io
import json
import math


def format_value(value) -> str:
    """Text form used in CSV: 17 significant digits, lowercase booleans, empty for missing."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    return str(value)


def to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return buf.getvalue()


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def to_json(rows: list[dict], columns: list[str], single: bool = False) -> str:
    records = [{c: _json_safe(row.get(c)) for c in columns} for row in rows]
    payload = records[0] if single and len(records) == 1 else records
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def render(rows: list[dict], columns: list[str], fmt: str = "csv", single: bool = False) -> str:
    if fmt == "csv":
        return to_csv(rows, columns)
    if fmt == "json":
        return to_json(rows, columns, single=single)
    raise ValueError(f"unknown output format {fmt!r}")


def write_text(text: str, path: str | None, stream=None):
    """Write to ``path`` (UTF-8, '\\n' newlines) or to ``stream`` when no path is given."""
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stream.write(text)
