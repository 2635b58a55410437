"""CSV and JSON output with atomic replacement.

Files are written to a temporary sibling and renamed over the target, so
readers never see a half-written file. Floats are printed with 17
significant digits, which round-trips every double.
"""

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np


def format_float(x):
    return format(float(x), ".17g")


def write_text(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


def write_csv(path, columns):
    """Write a mapping ``name -> sequence`` as a CSV with a header row."""
    names = list(columns)
    data = [np.atleast_1d(np.asarray(columns[n])) for n in names]
    lengths = {len(col) for col in data}
    if len(lengths) > 1:
        raise ValueError(f"columns have different lengths: {sorted(lengths)}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(names)
    for row in zip(*data):
        writer.writerow([_cell(v) for v in row])
    return write_text(path, buf.getvalue())


def write_rows(path, header, rows):
    return write_csv(path, {name: [row[i] for row in rows] for i, name in enumerate(header)})


def read_csv(path):
    """Read a numeric CSV written by :func:`write_csv` into float arrays."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [r for r in reader if r]
    out = {}
    for i, name in enumerate(header):
        out[name] = np.array([float(r[i]) for r in rows])
    return out


def _json(value, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value) if math.isfinite(value) else "null"
    if isinstance(value, str):
        return _json_string(value)
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{_json_string(str(k))}: {_json(v, indent, level + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating, type(None))) for v in value):
            return "[" + ", ".join(_json(v, indent, level + 1) for v in value) + "]"
        items = [pad + _json(v, indent, level + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(value).__name__}")


def _json_string(text):
    return json.dumps(text)


def dumps(value, indent=2):
    """JSON text with 17-significant-digit floats; NaN and infinities become null."""
    return _json(value, indent, 0) + "\n"


def write_json(path, value):
    return write_text(path, dumps(value))
