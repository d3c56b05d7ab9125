"""CSV and JSON emission of sweep rows."""

import csv
import io
import json

from .sweep import COLUMNS


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_fmt(getattr(r, c)) for c in COLUMNS])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, float) and v != v:
        return None
    return v


def rows_to_json(rows) -> str:
    data = [{k: _json_value(v) for k, v in r.as_dict().items()} for r in rows]
    return json.dumps(data, indent=2, sort_keys=False) + "\n"


def render(rows, fmt: str) -> str:
    if fmt == "csv":
        return rows_to_csv(rows)
    if fmt == "json":
        return rows_to_json(rows)
    raise ValueError(f"unknown format {fmt!r}")
