"""Grid and report serialization.

CSV layout::

    # meta: {"spec": {...}, "version": "...", ...}
    x,t,<channel>,...
    <x>,<t>,<value>,...      (t outer, x inner, 17 significant digits)

The JSON variant nests ``{"meta", "axes": {"x", "t"}, "channels"}``.
Output bytes depend only on the inputs, never on time or host.
"""

from __future__ import annotations

import io
import json
import os
from pathlib import Path

import numpy as np

from .analysis import AnalysisReport, DensityGrid
from .errors import RelProxyError


class OutputError(RelProxyError, OSError):
    exit_code = 5


def _fmt(v: float) -> str:
    return "%.17g" % v


def grid_to_csv(grid: DensityGrid) -> str:
    buf = io.StringIO()
    meta = json.dumps(_clean(grid.metadata), sort_keys=True)
    buf.write(f"# meta: {meta}\n")
    names = list(grid.channels)
    buf.write(",".join(["x", "t"] + names) + "\n")
    xs = [_fmt(v) for v in grid.x_axis]
    cols = [grid.channels[n] for n in names]
    for i, t in enumerate(grid.t_axis):
        ts = _fmt(t)
        rows = np.stack([c[i] for c in cols], axis=1) if cols else np.empty((len(xs), 0))
        for j, xv in enumerate(xs):
            buf.write(",".join([xv, ts] + [_fmt(v) for v in rows[j]]) + "\n")
    return buf.getvalue()


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def grid_to_json(grid: DensityGrid) -> str:
    doc = {
        "meta": _clean(grid.metadata),
        "axes": {"x": grid.x_axis.tolist(), "t": grid.t_axis.tolist()},
        "channels": {k: v.tolist() for k, v in grid.channels.items()},
    }
    return json.dumps(doc, sort_keys=False) + "\n"


def read_csv(path) -> DensityGrid:
    """Inverse of :func:`grid_to_csv` (used by tests and downstream tools)."""
    text = Path(path).read_text()
    lines = text.splitlines()
    meta = {}
    body = []
    for line in lines:
        if line.startswith("# meta: "):
            meta = json.loads(line[len("# meta: "):])
        elif not line.startswith("#"):
            body.append(line)
    header = body[0].split(",")
    data = np.array([[float(v) for v in row.split(",")] for row in body[1:]])
    x_axis = np.unique(data[:, 0])
    t_vals = []
    for t in data[:, 1]:
        if not t_vals or t_vals[-1] != t:
            t_vals.append(t)
    nt, nx = len(t_vals), x_axis.size
    channels = {name: data[:, 2 + i].reshape(nt, nx) for i, name in enumerate(header[2:])}
    return DensityGrid(x_axis, np.array(t_vals), channels, meta)


def write_text(path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def write_grid(grid: DensityGrid, path, fmt: str = "csv") -> Path:
    if fmt == "csv":
        return write_text(path, grid_to_csv(grid))
    if fmt == "json":
        return write_text(path, grid_to_json(grid))
    raise ValueError(f"unknown format {fmt!r}")


def write_report(report: AnalysisReport, path) -> Path:
    return write_text(path, report.to_json())


def ensure_dir(path) -> Path:
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create {path}: {exc.strerror or exc}") from exc
    if not os.access(path, os.W_OK):
        raise OutputError(f"{path} is not writable")
    return path
