"""Reflection measurement and CSV/JSON output for harness runs."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from ..errors import EmptyWindow


def _window_slice(window, times):
    lo, hi = window
    if lo > hi:
        raise ValueError(f"window start {lo} is after its end {hi}")
    if times is None:
        return slice(int(lo), int(hi))
    t = np.asarray(times)
    i0 = int(np.searchsorted(t, lo, side="left"))
    i1 = int(np.searchsorted(t, hi, side="right"))
    return slice(i0, i1)


def measure_reflection(probe, incident_window, reflected_window, times=None) -> float:
    """Peak-amplitude ratio between two disjoint windows of a probe signal.

    Windows are ``(start, stop)`` sample indices (half open), or time
    intervals (closed) when ``times`` is given.

    Raises
    ------
    EmptyWindow
        If either window selects no samples or the incident window is
        identically zero.
    """
    probe = np.asarray(probe, dtype=float)
    a, b = incident_window, reflected_window
    if max(a[0], b[0]) < min(a[1], b[1]):
        raise ValueError(f"windows overlap: {a} and {b}")
    inc = probe[_window_slice(a, times)]
    ref = probe[_window_slice(b, times)]
    if inc.size == 0 or ref.size == 0:
        raise EmptyWindow(f"window selects no samples: incident {a}, reflected {b}")
    peak_inc = np.abs(inc).max()
    if peak_inc == 0:
        raise EmptyWindow("incident window carries no signal")
    return float(np.abs(ref).max() / peak_inc)


def write_csv(path, columns: dict) -> Path:
    """Write equal-length columns with a one-line header; floats at 17 significant digits."""
    path = Path(path)
    names = list(columns)
    data = [np.asarray(columns[k]) for k in names]
    lengths = {len(d) for d in data}
    if len(lengths) > 1:
        raise ValueError(f"columns differ in length: {dict(zip(names, map(len, data)))}")
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for row in zip(*data):
            w.writerow([_fmt(v) for v in row])
    return path


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def read_csv(path) -> dict:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    cols = {name: [] for name in header}
    for row in body:
        for name, val in zip(header, row):
            cols[name].append(val)
    return cols


def write_metadata(path, meta: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(meta, indent=2, sort_keys=True, default=_json_default) + "\n")
    return path


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if hasattr(obj, "value"):
        return obj.value
    raise TypeError(f"cannot serialise {type(obj).__name__}")
