"""Deterministic JSON/CSV output with 17 significant digits for every float."""

from __future__ import annotations

import csv
import hashlib
import json
import math

import numpy as np


def fmt(x: float) -> str:
    return "%.17g" % x


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return "null" if obj is None else ("true" if obj else "false")
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        text = fmt(x)
        # keep floats floats on reload (the config hash depends on it)
        return text if any(c in text for c in ".e") else text + ".0"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(obj))


def config_hash(config) -> str:
    text = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(header)
        for row in rows:
            out.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def field_rows(lattice, fields: dict, mask):
    """Rows of (node index, coordinates, field components) over ``mask``."""
    coords = lattice.coords()
    header = [f"k{i}" for i in range(lattice.m)] + [f"x{i}" for i in range(lattice.m)]
    flat = {}
    for name, f in fields.items():
        f = np.asarray(f, dtype=float)
        f = f.reshape(lattice.counts + (-1,))
        flat[name] = f
        header += [f"{name}{c}" for c in range(f.shape[-1])]
    rows = []
    for idx in zip(*np.nonzero(mask)):
        row = [int(k) for k in idx] + [float(c) for c in coords[idx]]
        for f in flat.values():
            row += [float(v) for v in f[idx]]
        rows.append(row)
    return header, rows
