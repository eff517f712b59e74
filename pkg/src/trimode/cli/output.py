"""Deterministic CSV and JSON emission of result tables."""

import csv
import enum
import io
import json
import math


def format_value(v):
    """Text form of one cell; floats keep 17 significant digits."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, enum.Enum):
        return str(v.value)
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    if isinstance(v, str):
        return v
    return format(float(v), ".17g")


def _json_value(v):
    if isinstance(v, bool) or v is None or isinstance(v, (str, int)):
        return v
    if isinstance(v, enum.Enum):
        return v.value
    f = float(v)
    return f if math.isfinite(f) else None


def render(columns, rows, fmt="csv", meta=None):
    """Table as text.

    Parameters
    ----------
    columns : sequence of str
    rows : iterable of sequences
    fmt : {"csv", "json"}
    meta : dict, optional
        Extra top-level fields for JSON output.
    """
    if fmt == "json":
        doc = dict(meta or {})
        doc["columns"] = list(columns)
        doc["rows"] = [[_json_value(v) for v in r] for r in rows]
        return json.dumps(doc, indent=1, allow_nan=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([format_value(v) for v in r])
    return buf.getvalue()
