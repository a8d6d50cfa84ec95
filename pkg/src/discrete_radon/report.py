"""CSV/JSON emission with round-trip-safe numbers and static SVG plots."""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction

import numpy as np


def fmt(x) -> str:
    """17 significant digits for floats; integers and strings unchanged."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    if isinstance(x, (complex, np.complexfloating)):
        return f"{fmt(x.real)}{'+' if x.imag >= 0 else '-'}{fmt(abs(x.imag))}j"
    if x is None:
        return ""
    return str(x)


def csv_text(rows, columns=None) -> str:
    rows = list(rows)
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def write_csv(path, rows, columns=None):
    with open(path, "w", newline="") as fh:
        fh.write(csv_text(rows, columns))


def read_csv(path) -> list:
    """Rows as dicts with numeric cells converted back to int/float."""
    with open(path, newline="") as fh:
        out = []
        for row in csv.DictReader(fh):
            out.append({k: _parse_cell(v) for k, v in row.items()})
        return out


def _parse_cell(v: str):
    if v == "":
        return None
    if v in ("true", "false"):
        return v == "true"
    try:
        return int(v)
    except ValueError:
        pass
    try:
        return float(v)
    except ValueError:
        pass
    if "/" in v:
        try:
            return Fraction(v)
        except ValueError:
            pass
    try:
        return complex(v)
    except ValueError:
        return v


def json_text(obj) -> str:
    """Deterministic JSON: sorted keys, floats with 17 significant digits,
    non-finite floats as strings."""
    return _emit(obj, 0) + "\n"


def _emit(obj, depth) -> str:
    pad = "  " * (depth + 1)
    end = "  " * depth
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_emit(v, depth + 1)}" for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [f"{pad}{_emit(v, depth + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return json.dumps(fmt(x))
        return format(x, ".17g")
    if isinstance(obj, (complex, np.complexfloating)):
        return _emit([float(obj.real), float(obj.imag)], depth)
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    return json.dumps(str(obj))


def write_json(path, obj):
    with open(path, "w") as fh:
        fh.write(json_text(obj))


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def emit_plot(series, path, *, title="", xlabel="x", ylabel="y", loglog=True, references=()):
    """Write a static SVG plot.

    ``series`` maps a label to ``(x, y)``; ``references`` is a list of
    ``(label, callable)`` drawn over the x range of the data (for example a
    slope line ``lambda x: x ** -0.5``).
    """
    if not series or any(len(np.atleast_1d(xy[0])) == 0 for xy in series.values()):
        raise ValueError("cannot plot an empty series")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "discrete-radon"
    fig, ax = plt.subplots(figsize=(6, 4))
    xs_all = []
    for label, (x, y) in series.items():
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        xs_all.append(x)
        ax.plot(x, y, "o-", label=label)
    xr = np.concatenate(xs_all)
    xx = np.linspace(xr.min(), xr.max(), 64)
    for label, fn in references:
        ax.plot(xx, fn(xx), "--", label=label)
    if loglog:
        ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
