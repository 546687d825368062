"""Plot-ready CSV/JSON emitters and a reader for the emitted CSV files.

CSV files start with ``#`` metadata lines, the first being the schema stamp
``# schema: cfma.<command>/<version>``, followed by a header row and data
rows.  Numbers use 9 significant digits and ``.`` as decimal separator.
"""

import csv
import io
import json
import math

SCHEMA_VERSION = 1

COLUMNS = {
    "rates": ["gamma", "beta1", "beta2", "R1", "R2", "r1_first", "r2_first",
              "r1_second", "r2_second", "se_first", "se_second", "valid"],
    "region": ["R1", "R2", "gamma", "coeffs", "valid"],
    "check": ["gamma", "exact", "exact_se", "sufficient", "sufficient_se"],
    "coeffs": ["a1", "a2", "interval_lo", "interval_hi", "total_measure"],
    # sweep columns are the grid parameters followed by these
    "sweep": ["label", "achievable", "indeterminate", "best_gamma", "best_value",
              "gamma0", "gamma0_value", "error"],
}


def schema_name(command: str) -> str:
    return f"cfma.{command}/{SCHEMA_VERSION}"


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.9g}"
    return str(value)


def to_csv(command: str, header, rows, meta=None) -> str:
    buf = io.StringIO()
    buf.write(f"# schema: {schema_name(command)}\n")
    for key, val in (meta or {}).items():
        buf.write(f"# {key}: {val}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _json_default(obj):
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _clean(obj):
    # JSON has no NaN; emit null instead
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def to_json(command: str, payload: dict) -> str:
    doc = {"schema": schema_name(command)}
    doc.update(payload)
    return json.dumps(_clean(doc), indent=2, sort_keys=True, default=_json_default) + "\n"


def _parse_cell(text: str):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_csv(text: str):
    """Parse an emitted CSV into ``(meta, header, rows)``.

    `meta` maps the ``# key: value`` lines (including ``schema``); cells are
    converted back to int, float, bool or None where possible.
    """
    meta = {}
    lines = text.splitlines()
    body_start = 0
    for i, line in enumerate(lines):
        if not line.startswith("#"):
            body_start = i
            break
        key, _, val = line[1:].strip().partition(":")
        meta[key.strip()] = val.strip()
    else:
        body_start = len(lines)
    reader = csv.reader(lines[body_start:])
    header = next(reader, [])
    rows = [[_parse_cell(c) for c in row] for row in reader]
    return meta, header, rows


def read_csv(path):
    with open(path, newline="") as fh:
        return parse_csv(fh.read())
