"""Quantitative checks on density grids.

Integrals on a grid use the trapezoid rule with an Euler-Maclaurin endpoint
correction.  Massless relativistic densities decay only algebraically
(|psi|^2 ~ x^-4 once t != 0), so a finite window rarely meets the
boundary-leak rule.  A grid may carry a ``tail`` evaluator; the integral
beyond the window is then done exactly by mapping [X, inf) onto (0, 1]
with x = X / u.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import BoundaryLeakError, NotApplicableError, UsageError

PROXY_CHANNELS = ("born", "canonical_h_norm", "pseudo_h_norm", "charge_norm")
LEAK_FRACTION = 1e-10
NOISE_FLOOR = 1e-4
TAIL_ORDER = 16
# panel edges in u = X / x; crowded near u = 1 where the window ends
_TAIL_EDGES = np.array([0.0, 0.2, 0.4, 0.6, 0.75, 0.85, 0.92, 0.96, 1.0])

TailFn = Callable[[str, np.ndarray, float], np.ndarray]


@dataclass
class DensityGrid:
    """Real channels sampled on t_axis x x_axis.

    ``tail`` (optional, not serialized) evaluates a channel at arbitrary
    x for the time ``t``; it is what makes exact tail integrals possible.
    """

    x_axis: np.ndarray
    t_axis: np.ndarray
    channels: dict[str, np.ndarray]
    metadata: dict[str, Any] = field(default_factory=dict)
    tail: TailFn | None = None

    def __post_init__(self):
        self.x_axis = np.asarray(self.x_axis, dtype=float)
        self.t_axis = np.asarray(self.t_axis, dtype=float)
        if self.x_axis.ndim != 1 or self.x_axis.size < 2:
            raise UsageError("x_axis needs at least two samples")
        steps = np.diff(self.x_axis)
        if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * max(abs(steps[0]), 1.0):
            raise UsageError("x_axis must be uniform and increasing")
        shape = (self.t_axis.size, self.x_axis.size)
        for name, arr in self.channels.items():
            arr = np.asarray(arr, dtype=float)
            if arr.shape != shape:
                raise UsageError(f"channel {name!r} has shape {arr.shape}, expected {shape}")
            self.channels[name] = arr

    @property
    def dx(self) -> float:
        return float(self.x_axis[1] - self.x_axis[0])

    def channel(self, name: str) -> np.ndarray:
        try:
            return self.channels[name]
        except KeyError:
            raise UsageError(f"no channel {name!r}; have {sorted(self.channels)}") from None

    def slice(self, name: str, t_index: int) -> np.ndarray:
        arr = self.channel(name)
        if not -arr.shape[0] <= t_index < arr.shape[0]:
            raise UsageError(f"t_index {t_index} out of range")
        return arr[t_index]


@dataclass(frozen=True)
class CheckRecord:
    name: str
    measured: float
    expected: Any
    tol: float
    passed: bool
    note: str = ""

    def to_dict(self) -> dict[str, Any]:
        out = {"name": self.name, "measured": _jsonable(self.measured),
               "expected": _jsonable(self.expected), "tol": _jsonable(self.tol),
               "pass": bool(self.passed)}
        if self.note:
            out["note"] = self.note
        return out


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(u) for u in v]
    return v


@dataclass
class AnalysisReport:
    spec: dict[str, Any] = field(default_factory=dict)
    checks: list[CheckRecord] = field(default_factory=list)
    provenance: dict[str, Any] = field(default_factory=dict)

    def add(self, name, measured, expected, tol, passed, note="") -> CheckRecord:
        rec = CheckRecord(name, measured, expected, tol, bool(passed), note)
        self.checks.append(rec)
        return rec

    def check_close(self, name, measured, expected, tol, relative=False, note=""):
        scale = abs(expected) if relative else 1.0
        ok = bool(abs(measured - expected) <= tol * scale)
        return self.add(name, measured, expected, tol, ok, note)

    def check_bound(self, name, measured, bound, note=""):
        """Pass when measured <= bound."""
        return self.add(name, measured, f"<= {bound}", bound, measured <= bound, note)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict[str, Any]:
        out = {"spec": self.spec,
               "checks": [c.to_dict() for c in sorted(self.checks, key=lambda c: c.name)]}
        if self.provenance:
            out["provenance"] = self.provenance
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"


# ---------------------------------------------------------------------------
# integrals

def _trapezoid_corrected(y: np.ndarray, h: float) -> float:
    total = h * (y.sum() - 0.5 * (y[0] + y[-1]))
    if y.size >= 5:
        # -h^2/12 [f'(b) - f'(a)] with fourth-order one-sided differences
        d_a = (-25 * y[0] + 48 * y[1] - 36 * y[2] + 16 * y[3] - 3 * y[4]) / (12 * h)
        d_b = (25 * y[-1] - 48 * y[-2] + 36 * y[-3] - 16 * y[-4] + 3 * y[-5]) / (12 * h)
        total -= h * h / 12.0 * (d_b - d_a)
    return float(total)


def _tail_nodes(x_edge: float):
    xi, wi = leggauss(TAIL_ORDER)
    lo, hi = _TAIL_EDGES[:-1], _TAIL_EDGES[1:]
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    u = (mid[:, None] + half[:, None] * xi[None, :]).ravel()
    w = (half[:, None] * wi[None, :]).ravel()
    x = abs(x_edge) / u
    return x, w * abs(x_edge) / (u * u)


def _tail_integral(grid: DensityGrid, channel: str, t: float, moment: int, center: float) -> float:
    total = 0.0
    for edge, sign in ((grid.x_axis[-1], 1.0), (grid.x_axis[0], -1.0)):
        if edge * sign <= 0:
            raise UsageError("exact tails need a window containing x = 0")
        xs, ws = _tail_nodes(edge)
        xs = sign * xs
        vals = np.asarray(grid.tail(channel, xs, t), dtype=float)
        total += float(np.sum(ws * vals * (xs - center) ** moment))
    return total


def leak_ratio(grid: DensityGrid, channel: str, t_index: int) -> float:
    y = grid.slice(channel, t_index)
    peak = float(np.max(np.abs(y)))
    if peak == 0:
        return 0.0
    return max(abs(y[0]), abs(y[-1])) / peak


def integrate_channel(grid: DensityGrid, channel: str, t_index: int, tails: str = "auto",
                      moment: int = 0, center: float = 0.0) -> float:
    """Integral over x (optionally of (x - center)^moment) at one time slice.

    Parameters
    ----------
    tails : {"auto", "exact", "raise"}
        ``raise`` never looks past the window and raises
        :class:`BoundaryLeakError` when the boundary values exceed 1e-10
        of the slice peak.  ``auto`` adds the exact tail integral in that
        case if the grid has a tail evaluator.  ``exact`` always adds it.
    """
    if tails not in ("auto", "exact", "raise"):
        raise UsageError("tails must be 'auto', 'exact' or 'raise'")
    y = grid.slice(channel, t_index)
    weight = (grid.x_axis - center) ** moment if moment else 1.0
    inner = _trapezoid_corrected(y * weight, grid.dx)
    leaking = leak_ratio(grid, channel, t_index) > LEAK_FRACTION
    use_tail = tails == "exact" or (tails == "auto" and leaking)
    if use_tail and grid.tail is not None:
        return inner + _tail_integral(grid, channel, float(grid.t_axis[t_index]), moment, center)
    if leaking:
        raise BoundaryLeakError(
            f"{channel} at t={grid.t_axis[t_index]:g}: boundary value "
            f"{leak_ratio(grid, channel, t_index):.3g} of peak exceeds {LEAK_FRACTION:g}")
    return inner


# ---------------------------------------------------------------------------
# sign structure and maxima

@dataclass(frozen=True)
class NegativeInterval:
    x_lo: float
    x_hi: float
    min_value: float
    outside_cone: bool


def negative_regions(grid: DensityGrid, channel: str, t_index: int,
                     floor_fraction: float = NOISE_FLOOR, speed: float = 1.0) -> list[NegativeInterval]:
    """Maximal x-intervals where the channel dips below -floor_fraction * peak.

    An interval is outside the light cone when every sample in it satisfies
    |x| > c|t| + dx/2.
    """
    if not floor_fraction > 0:
        raise UsageError("floor_fraction must be > 0")
    y = grid.slice(channel, t_index)
    peak = float(np.max(np.abs(y)))
    if peak == 0:
        return []
    below = y < -floor_fraction * peak
    t = float(grid.t_axis[t_index])
    cone = speed * abs(t) + 0.5 * grid.dx
    out = []
    i, n = 0, y.size
    while i < n:
        if not below[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and below[j + 1]:
            j += 1
        xs = grid.x_axis[i:j + 1]
        out.append(NegativeInterval(float(xs[0]), float(xs[-1]), float(y[i:j + 1].min()),
                                    bool(np.all(np.abs(xs) > cone))))
        i = j + 1
    return out


def refined_argmax(x: np.ndarray, y: np.ndarray) -> float:
    i = int(np.argmax(y))
    if i == 0 or i == y.size - 1:
        raise NotApplicableError("maximum sits on the edge of the search window")
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2 * y1 + y2
    shift = 0.0 if denom == 0 else 0.5 * (y0 - y2) / denom
    return float(x[i] + shift * (x[1] - x[0]))


def cone_offset(grid: DensityGrid, channel: str, t_index: int,
                speed: float = 1.0, delta_x: float = 1.0) -> tuple[float, float]:
    """Distance c|t| - |x_peak| of the right and left lobe maxima.

    Positive offsets mean the maximum lags inside the light cone.
    """
    t = float(grid.t_axis[t_index])
    if abs(t) <= 2 * delta_x / speed:
        raise NotApplicableError(f"|t| = {abs(t):g} too small for separated lobes")
    y = grid.slice(channel, t_index)
    x = grid.x_axis
    offsets = []
    for mask in (x > 0, x < 0):
        xs, ys = x[mask], y[mask]
        if xs.size < 3:
            raise NotApplicableError("grid does not cover both lobes")
        order = np.argsort(np.abs(xs))
        xs, ys = np.abs(xs[order]), ys[order]
        try:
            peak = refined_argmax(xs, ys)
        except NotApplicableError:
            raise NotApplicableError(f"{channel}: lobes not separated at t={t:g}") from None
        offsets.append(speed * abs(t) - peak)
    return offsets[0], offsets[1]


def proxy_divergence(grid: DensityGrid, t_index: int,
                     channels: Sequence[str] = PROXY_CHANNELS) -> float:
    """Largest pairwise sup-norm difference of the proxies over their common peak."""
    missing = [c for c in channels if c not in grid.channels]
    if missing:
        raise UsageError(f"proxy_divergence needs channels {missing}")
    rows = [grid.slice(c, t_index) for c in channels]
    peak = max(float(np.max(r)) for r in rows)
    if peak <= 0:
        raise NotApplicableError("proxies have no positive peak")
    worst = 0.0
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            worst = max(worst, float(np.max(np.abs(rows[i] - rows[j]))))
    return worst / peak


def centroid(grid: DensityGrid, channel: str, t_index: int, tails: str = "auto") -> float:
    norm = integrate_channel(grid, channel, t_index, tails)
    return integrate_channel(grid, channel, t_index, tails, moment=1) / norm


def centroid_velocity(grid: DensityGrid, channel: str = "canonical_h_norm",
                      t_pair: tuple[int, int] = (0, -1), tails: str = "auto") -> float:
    """d<x>/dt from first moments of two time slices."""
    i, j = t_pair
    dt = float(grid.t_axis[j] - grid.t_axis[i])
    if dt == 0:
        raise UsageError("t_pair must name two different times")
    return (centroid(grid, channel, j, tails) - centroid(grid, channel, i, tails)) / dt


def variance_growth(grid: DensityGrid, channel: str = "born",
                    t_indices: Iterable[int] | None = None, tails: str = "auto") -> list[float]:
    """Second central moments of a normalized channel at the given slices."""
    if t_indices is None:
        t_indices = range(grid.t_axis.size)
    out = []
    for k in t_indices:
        norm = integrate_channel(grid, channel, k, tails)
        mean = integrate_channel(grid, channel, k, tails, moment=1) / norm
        out.append(integrate_channel(grid, channel, k, tails, moment=2, center=mean) / norm)
    return out
