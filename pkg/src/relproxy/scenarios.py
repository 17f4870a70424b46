"""Named presets that regenerate the data behind each figure.

Each preset builds one grid, runs its checks and writes
``<name>.<fmt>`` plus ``<name>.report.json`` into the output directory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__, analysis as A
from .analysis import AnalysisReport, DensityGrid
from .errors import NotApplicableError, UsageError
from .grid import DEFAULT_T, DEFAULT_X, axis, build_grid
from .io import ensure_dir, write_grid, write_report
from .nonrel import (electron_oscillator, free_gaussian_compare, free_gaussian_variance,
                     oscillator_compare)
from .packets import PacketSpec

PROXIES = A.PROXY_CHANNELS
CONSERVATION_TOL = 1e-6
FULL_T = "full"


@dataclass(frozen=True)
class ScenarioPreset:
    name: str
    figures: tuple[int, ...]
    description: str
    spec: PacketSpec | None = None
    channels: tuple[str, ...] = ()
    t_values: tuple[float, ...] | str = FULL_T
    checks: tuple[str, ...] = ()
    kind: str = "kg"
    options: dict = field(default_factory=dict)


def _t_index(grid: DensityGrid, t: float) -> int:
    i = int(np.argmin(np.abs(grid.t_axis - t)))
    if abs(grid.t_axis[i] - t) > 1e-9:
        raise UsageError(f"time {t} not on the grid")
    return i


# ---------------------------------------------------------------------------
# check implementations: (grid, report, preset) -> None

def _check_normalization(grid, report, preset, times=(0.0, 5.0, -5.0)):
    for ch in grid.channels:
        if ch not in PROXIES and ch not in ("dirac_charge_norm", "dirac_canonical_h_norm"):
            continue
        for t in times:
            if not np.any(np.isclose(grid.t_axis, t)):
                continue
            val = A.integrate_channel(grid, ch, _t_index(grid, t))
            report.check_close(f"integral/{ch}/t={t:g}", val, 1.0, CONSERVATION_TOL, relative=True)


def _check_positivity(grid, report, preset):
    for ch in ("born", "canonical_h_norm"):
        if ch in grid.channels:
            m = float(grid.channels[ch].min())
            report.add(f"positivity/{ch}", m, ">= 0", 0.0, m >= 0)


def _check_offsets(grid, report, preset):
    for t in (5.0, -5.0):
        if not np.any(np.isclose(grid.t_axis, t)):
            continue
        i = _t_index(grid, t)
        for ch in grid.channels:
            if ch not in PROXIES:
                continue
            right, left = A.cone_offset(grid, ch, i)
            if ch == "canonical_h_norm":
                for side, off in (("right", right), ("left", left)):
                    report.add(f"cone_offset/{ch}/t={t:g}/{side}", off, "|offset| <= 0.5",
                               0.5, abs(off) <= 0.5,
                               note="0.5 dx bound is this tool's operationalization")
            else:
                for side, off in (("right", right), ("left", left)):
                    report.add(f"cone_offset/{ch}/t={t:g}/{side}", off, "in (0, 1]",
                               1.0, 0.0 < off <= 1.0)


def _check_negative_regions(grid, report, preset):
    for ch in ("pseudo_h_norm", "charge_norm"):
        if ch not in grid.channels:
            continue
        found = [r for i in range(grid.t_axis.size) for r in A.negative_regions(grid, ch, i)]
        peak = float(np.max(np.abs(grid.channels[ch])))
        report.add(f"negative_regions/{ch}/count", len(found), "> 0", 0, len(found) > 0)
        inside = sum(not r.outside_cone for r in found)
        report.add(f"negative_regions/{ch}/inside_cone", inside, 0, 0, inside == 0)
        depth = min((r.min_value for r in found), default=0.0) / peak
        report.add(f"negative_regions/{ch}/depth", depth, f"< -{A.NOISE_FLOOR}", A.NOISE_FLOOR,
                   depth < -A.NOISE_FLOOR)


def _check_divergence(grid, report, preset):
    for i, t in enumerate(grid.t_axis):
        d = A.proxy_divergence(grid, i)
        if preset.spec is not None and preset.spec.k0 >= 10:
            report.check_bound(f"proxy_divergence/t={t:g}", d, 5e-3)
        else:
            report.add(f"proxy_divergence/t={t:g}", d, "> 0.1 (proxies differ)", 0.1, d > 0.1)


def _check_large_k_gaussian(grid, report, preset):
    d = preset.spec.delta_x
    for i, t in enumerate(grid.t_axis):
        ref = np.exp(-((grid.x_axis - t) ** 2) / (2 * d * d)) / math.sqrt(2 * math.pi * d * d)
        for ch in PROXIES:
            if ch in grid.channels:
                err = float(np.max(np.abs(grid.channels[ch][i] - ref)) / ref.max())
                report.check_bound(f"large_k_gaussian/{ch}/t={t:g}", err, 1e-2)


def _check_re_im(grid, report, preset):
    i = _t_index(grid, 5.0)
    mask = grid.x_axis > 0
    xs = grid.x_axis[mask]
    for field_name in ("psi", "phi"):
        re = grid.channels.get(f"re_{field_name}")
        im = grid.channels.get(f"im_{field_name}")
        if re is None or im is None:
            continue
        x_im = float(xs[np.argmax(np.abs(im[i][mask]))])
        x_re = float(xs[np.argmax(np.abs(re[i][mask]))])
        report.add(f"re_im/{field_name}/argmax_im", x_im, "< 5", 5.0, x_im < 5.0)
        report.add(f"re_im/{field_name}/argmax_re", x_re, "|x - 5| <= 0.5", 0.5, abs(x_re - 5.0) <= 0.5)


def _check_velocity(grid, report, preset):
    from .packets import observables
    obs = observables(preset.spec)
    expected = obs.momentum_p / obs.energy_E
    i, j = _t_index(grid, -1.0), _t_index(grid, 1.0)
    v = A.centroid_velocity(grid, "canonical_h_norm", (i, j))
    report.check_close("centroid_velocity/canonical_h_norm", v, expected, 1e-2, relative=expected != 0)


def _check_oscillator(grid, report, preset):
    n = grid.metadata["oscillator"]["n"]
    born, h = grid.channels["born"][0], grid.channels["oscillator_h_n"][0]
    report.check_close("integral/born", A.integrate_channel(grid, "born", 0), 1.0, 1e-8)
    report.check_close("integral/oscillator_h_n", A.integrate_channel(grid, "oscillator_h_n", 0), 1.0, 1e-8)
    if n == 0:
        x = grid.x_axis
        report.check_close("born_argmax", float(x[np.argmax(born)]), 0.0, grid.dx)
        pos = x > 0
        xm = A.refined_argmax(x[pos], h[pos])
        report.check_close("h_n_argmax_right", xm, 1.0, grid.dx)
        report.check_close("h_n_at_origin", float(h[np.argmin(np.abs(x))]), 0.0, 1e-12)
    osc = grid.metadata["oscillator"]
    if "ell_SI_m" in osc:
        report.add("ell_SI_reported", osc["ell_SI_m"], osc["ell_quoted_m"], 0.1,
                   True, note="computed length differs from the quoted 1 mm"
                   if osc["ell_discrepancy"] else "")


def _check_free_gaussian(grid, report, preset):
    d, m = grid.metadata["delta_x"], grid.metadata["mass"]
    h = A.integrate_channel(grid, "nonrel_h_norm", 0)
    ht = A.integrate_channel(grid, "nonrel_htilde_norm", 0)
    report.check_close("integral/nonrel_h_norm", h, 1.0, 1e-8)
    report.check_close("integral/h_equals_htilde", ht, h, 1e-8)
    var = A.variance_growth(grid, "born", [0])[0]
    t = float(grid.t_axis[0])
    report.check_close(f"variance/t={t:g}", var, float(free_gaussian_variance(d, m, t)), 1e-4,
                       relative=True)
    t0 = free_gaussian_compare(d, m, 0.0, grid.x_axis)
    x = grid.x_axis
    neg = t0.channels["nonrel_htilde_norm"][0] < 0
    expect = np.abs(x) > math.sqrt(2) * d
    edge = np.abs(np.abs(x) - math.sqrt(2) * d) < 1e-9
    mismatch = int(np.sum((neg != expect) & ~edge))
    report.add("htilde_sign_pattern/t=0", mismatch, 0, 0, mismatch == 0)


CHECKS: dict[str, Callable] = {
    "normalization": _check_normalization,
    "positivity": _check_positivity,
    "offsets": _check_offsets,
    "negative_regions": _check_negative_regions,
    "divergence": _check_divergence,
    "large_k_gaussian": _check_large_k_gaussian,
    "re_im": _check_re_im,
    "velocity": _check_velocity,
    "oscillator": _check_oscillator,
    "free_gaussian": _check_free_gaussian,
}

_M0 = PacketSpec()
_MASS = PacketSpec(mass=0.2)
_K0_SMALL = PacketSpec(k0=0.1)
_K0_LARGE = PacketSpec(k0=10.0)
_SURFACE = ("normalization", "positivity")

PRESETS: dict[str, ScenarioPreset] = {p.name: p for p in [
    ScenarioPreset("fig-osc-n0", (1,), "oscillator ground state: Born vs energy density",
                   kind="osc", checks=("oscillator",), options={"n": 0}),
    ScenarioPreset("fig-osc-n1", (2,), "first excited oscillator state",
                   kind="osc", checks=("oscillator",), options={"n": 1}),
    ScenarioPreset("fig-free-gauss", (3,), "free Gaussian: born, h, h-tilde",
                   kind="free", checks=("free_gaussian",), options={"delta_x": 1.0, "mass": 1.0}),
    ScenarioPreset("fig-norm-h", (4,), "massless H/E surface", _M0, ("canonical_h_norm",),
                   checks=_SURFACE),
    ScenarioPreset("fig-norm-htilde", (5,), "massless energy pseudo-density surface", _M0,
                   ("pseudo_h_norm",), checks=("normalization",)),
    ScenarioPreset("fig-born", (6,), "massless Born density surface", _M0, ("born",), checks=_SURFACE),
    ScenarioPreset("fig-charge", (7,), "massless charge density surface", _M0, ("charge_norm",),
                   checks=("normalization",)),
    ScenarioPreset("fig-neg-regions", (8, 9), "sign-indefinite proxies and their negative regions",
                   _M0, ("pseudo_h_norm", "charge_norm"), checks=("negative_regions",)),
    ScenarioPreset("fig-born-cut", (10,), "Born density cut sections", _M0, ("born",),
                   (-5.0, 0.0, 5.0), checks=("normalization", "offsets")),
    ScenarioPreset("fig-cut-h", (11,), "H/E cut sections", _M0, ("canonical_h_norm",),
                   (-5.0, 0.0, 5.0), checks=("normalization", "offsets")),
    ScenarioPreset("fig-compall-t0", (12,), "all four proxies at t = 0", _M0, PROXIES, (0.0,),
                   checks=("normalization", "divergence")),
    ScenarioPreset("fig-compall-t5", (13,), "all four proxies at t = +-5", _M0, PROXIES, (-5.0, 5.0),
                   checks=("normalization", "offsets")),
    ScenarioPreset("fig-re-im-fields", (14, 15, 16, 17), "real and imaginary parts of phi and psi",
                   _M0, ("re_phi", "im_phi", "re_psi", "im_psi"), checks=("re_im",)),
    ScenarioPreset("fig-mass-born", (18,), "Born density, m = 0.2", _MASS, ("born",),
                   checks=_SURFACE),
    ScenarioPreset("fig-mass-h", (19,), "H/E, m = 0.2", _MASS, ("canonical_h_norm",),
                   checks=_SURFACE),
    ScenarioPreset("fig-k0small-born", (20,), "Born density, k0 = 0.1", _K0_SMALL, ("born",),
                   checks=_SURFACE),
    ScenarioPreset("fig-k0small-h", (21,), "H/E, k0 = 0.1", _K0_SMALL, ("canonical_h_norm",),
                   checks=_SURFACE),
    ScenarioPreset("fig-compall-largek", (22,), "all four proxies at t = 0, k0 = 10", _K0_LARGE,
                   PROXIES, (0.0,), checks=("normalization", "divergence", "large_k_gaussian")),
    ScenarioPreset("fig-h-largek", (23,), "H/E surface, k0 = 10", _K0_LARGE, ("canonical_h_norm",),
                   checks=("positivity", "velocity")),
]}


def preset_names() -> list[str]:
    return sorted(PRESETS)


def get_preset(name: str) -> ScenarioPreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise UsageError(f"unknown scenario {name!r}; valid: {', '.join(preset_names())}") from None


def build_scenario_grid(preset: ScenarioPreset) -> DensityGrid:
    x_axis = axis(*DEFAULT_X)
    if preset.kind == "osc":
        return oscillator_compare(electron_oscillator(preset.options["n"]), axis(-8.0, 8.0, 0.01))
    if preset.kind == "free":
        o = preset.options
        return free_gaussian_compare(o["delta_x"], o["mass"], None, axis(-20.0, 20.0, 0.01))
    t_axis = axis(*DEFAULT_T) if preset.t_values == FULL_T else np.array(preset.t_values, dtype=float)
    grid = build_grid(preset.spec, x_axis, t_axis, preset.channels)
    grid.metadata["scenario"] = preset.name
    grid.metadata["figures"] = list(preset.figures)
    return grid


def run_preset_checks(preset: ScenarioPreset, grid: DensityGrid) -> AnalysisReport:
    spec_record = preset.spec.to_record() if preset.spec is not None else dict(preset.options)
    report = AnalysisReport(spec=spec_record,
                            provenance={"scenario": preset.name, "version": __version__,
                                        "method": grid.metadata.get("method", "closed_form")})
    for name in preset.checks:
        try:
            CHECKS[name](grid, report, preset)
        except NotApplicableError as exc:
            report.add(f"{name}/not_applicable", 0.0, "applicable", 0.0, False, note=str(exc))
    return report


def run_scenario(name: str, out_dir, fmt: str = "csv") -> tuple[list[Path], AnalysisReport]:
    """Build, check and write one preset.  Returns written paths and the report."""
    if fmt not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got {fmt!r}")
    preset = get_preset(name)
    out = ensure_dir(out_dir)
    grid = build_scenario_grid(preset)
    report = run_preset_checks(preset, grid)
    paths = [write_grid(grid, out / f"{name}.{fmt}", fmt),
             write_report(report, out / f"{name}.report.json")]
    return paths, report
