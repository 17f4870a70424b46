"""The invariant suite behind ``relproxy check``.

``fast`` covers normalization and the quadrature identities on coarse
grids.  ``full`` runs every acceptance criterion on the figure grid.
The ``strict`` tolerance profile tightens the quadrature-only identities
tenfold.
"""

from __future__ import annotations

import filecmp
import math
import tempfile

import numpy as np

from . import __version__, analysis as A, fields as F
from .analysis import AnalysisReport
from .dirac import spinor
from .errors import UsageError
from .grid import DEFAULT_T, DEFAULT_X, axis, build_grid
from .nonrel import free_gaussian_compare, free_gaussian_variance
from .densities import oscillator_h_n
from .packets import PacketSpec, observables, omega

SUITES = ("fast", "full")
PROFILES = ("default", "strict")

CONSERVATION_SPECS = (PacketSpec(), PacketSpec(mass=0.2), PacketSpec(k0=0.1), PacketSpec(k0=10.0))
CONSERVATION_TIMES = (0.0, 2.0, -2.0, 5.0, -5.0)


def _scale(profile: str) -> float:
    return 0.1 if profile == "strict" else 1.0


def energy_closed_form(report: AnalysisReport, profile="default", fast=False):
    e = observables(PacketSpec()).energy_E
    report.check_close("C1/energy_closed_form", e, 1.0 / math.sqrt(2 * math.pi),
                       1e-8 * _scale(profile), relative=True)


def oracle_equivalence(report: AnalysisReport, profile="default", fast=False):
    s = PacketSpec()
    step = 0.25 if fast else 0.02
    x = axis(-12.0, 12.0, step)
    near_cone = np.array([2.0 - 1e-7, 2.0 + 1e-5, 5.0 - 1e-9, 5.0 + 1e-3])
    x = np.sort(np.concatenate([x, near_cone, -near_cone]))
    t = np.array([0.0, 2.0, -2.0, 5.0, -5.0])
    quad, _ = F.kg_fields_grid(s, x, t, "quadrature")
    tt, xx = np.meshgrid(t, x, indexing="ij")
    psi = F.psi_closed(s.delta_x, 0.0, xx, tt)
    phi = F.phi_closed(s.delta_x, xx, tt)
    err_psi = max(float(np.max(np.abs(a - quad[k]))) for a, k in zip(psi, ("psi", "psi_t", "psi_x")))
    err_phi = max(float(np.max(np.abs(a - quad[k]))) for a, k in zip(phi, ("phi", "phi_t", "phi_x")))
    report.check_bound("C2/psi_closed_vs_quadrature", err_psi, 1e-8 * _scale(profile))
    report.check_bound("C2/phi_closed_vs_quadrature", err_phi, 1e-7 * _scale(profile))
    # adaptive single-point route at a few points
    worst = 0.0
    for xv, tv in ((0.0, 0.0), (3.0, 2.0), (-7.5, 5.0), (11.0, -5.0), (5.0, 5.0)):
        a = F.psi_x(s, xv, tv, "quadrature")
        b = F.psi_x(s, xv, tv, "closed_form")
        worst = max(worst, abs(a.value - b.value), abs(a.d_t - b.d_t), abs(a.d_x - b.d_x))
    report.check_bound("C2/psi_adaptive_points", worst, 1e-8 * _scale(profile))


def conservation(report: AnalysisReport, profile="default", fast=False):
    step = 0.05 if fast else 0.02
    x = axis(-12.0, 12.0, step)
    t = np.array(CONSERVATION_TIMES)
    specs = CONSERVATION_SPECS[:2] if fast else CONSERVATION_SPECS
    for s in specs:
        g = build_grid(s, x, t, A.PROXY_CHANNELS)
        tag = f"m={s.mass:g},k0={s.k0:g}"
        for ch in A.PROXY_CHANNELS:
            worst = max(abs(A.integrate_channel(g, ch, i) - 1.0) for i in range(t.size))
            report.check_bound(f"C3/conservation/{tag}/{ch}", worst, 1e-6 * _scale(profile))


def _figure_grid(channels, spec=None):
    return build_grid(spec or PacketSpec(), axis(*DEFAULT_X), axis(*DEFAULT_T), channels)


def sign_structure(report: AnalysisReport, profile="default", fast=False, grid=None):
    g = grid or _figure_grid(A.PROXY_CHANNELS)
    for ch in ("born", "canonical_h_norm"):
        m = float(g.channels[ch].min())
        report.add(f"C4/nonnegative/{ch}", m, ">= 0", 0.0, m >= 0)
    for ch in ("pseudo_h_norm", "charge_norm"):
        found = [r for i in range(g.t_axis.size) for r in A.negative_regions(g, ch, i)]
        peak = float(np.max(np.abs(g.channels[ch])))
        depth = min((r.min_value for r in found), default=0.0) / peak
        report.add(f"C4/negative/{ch}/depth", depth, f"< -{A.NOISE_FLOOR}", A.NOISE_FLOOR,
                   depth < -A.NOISE_FLOOR)
        inside = sum(not r.outside_cone for r in found)
        report.add(f"C4/negative/{ch}/inside_cone", inside, 0, 0, len(found) > 0 and inside == 0)


def latency(report: AnalysisReport, profile="default", fast=False, grid=None):
    g = grid or _figure_grid(A.PROXY_CHANNELS)
    for t in (5.0, -5.0):
        i = int(np.argmin(np.abs(g.t_axis - t)))
        for ch in A.PROXY_CHANNELS:
            right, left = A.cone_offset(g, ch, i)
            for side, off in (("right", right), ("left", left)):
                name = f"C5/offset/{ch}/t={t:g}/{side}"
                if ch == "canonical_h_norm":
                    report.add(name, off, "|offset| <= 0.5", 0.5, abs(off) <= 0.5,
                               note="bound chosen by this tool")
                else:
                    report.add(name, off, "in (0, 1]", 1.0, 0.0 < off <= 1.0)


def proxy_convergence(report: AnalysisReport, profile="default", fast=False):
    s = PacketSpec(k0=10.0)
    x = axis(-12.0, 12.0, 0.02)
    g = build_grid(s, x, np.array([0.0, 5.0]), A.PROXY_CHANNELS)
    for i, t in enumerate(g.t_axis):
        report.check_bound(f"C6/proxy_divergence/t={t:g}", A.proxy_divergence(g, i), 5e-3)
        ref = np.exp(-((x - t) ** 2) / 2) / math.sqrt(2 * math.pi)
        for ch in A.PROXY_CHANNELS:
            err = float(np.max(np.abs(g.channels[ch][i] - ref)) / ref.max())
            report.check_bound(f"C6/large_k_gaussian/{ch}/t={t:g}", err, 1e-2)


def limit_residual(spec: PacketSpec, k_ref: float, x) -> float:
    """sup |phi sqrt(2 omega(k_ref)) - psi| / sup |psi| at t = 0."""
    f, _ = F.kg_fields_grid(spec, x, np.array([0.0]), "quadrature")
    fac = math.sqrt(2 * omega(spec, k_ref))
    return float(np.max(np.abs(f["phi"] * fac - f["psi"])) / np.max(np.abs(f["psi"])))


def limits(report: AnalysisReport, profile="default", fast=False):
    x = axis(-12.0, 12.0, 0.02)
    report.check_bound("C7/nonrelativistic_limit/m=20",
                       limit_residual(PacketSpec(mass=20.0), 0.0, x), 2e-3)
    report.check_bound("C7/narrow_packet_limit/k0=10",
                       limit_residual(PacketSpec(k0=10.0), 10.0, x), 2e-2,
                       note="first-order residual max|x G|/(4 k0) = 0.0214 exceeds this bound")


def velocity(report: AnalysisReport, profile="default", fast=False):
    x = axis(-12.0, 12.0, 0.02)
    for k0 in (0.1, 1.0, 10.0):
        s = PacketSpec(k0=k0)
        obs = observables(s)
        g = build_grid(s, x, np.array([-1.0, 1.0]), ("canonical_h_norm",))
        v = A.centroid_velocity(g, "canonical_h_norm", (0, 1))
        report.check_close(f"C8/velocity/k0={k0:g}", v, obs.momentum_p / obs.energy_E, 1e-2,
                           relative=True)


def nonrelativistic(report: AnalysisReport, profile="default", fast=False):
    x = axis(-15.0, 15.0, 0.005)
    h = 0.005
    for n in range(6):
        y = oscillator_h_n(n, x, 1.0)
        val = h * (y.sum() - 0.5 * (y[0] + y[-1]))
        report.check_close(f"C9/h_n_integral/n={n}", val, 1.0, 1e-8)
    y = oscillator_h_n(0, x, 1.0)
    pos, neg = x > 0, x < 0
    right = A.refined_argmax(x[pos], y[pos])
    left = -A.refined_argmax(-x[neg][::-1], y[neg][::-1])
    report.check_close("C9/h0_max_right", right, 1.0, h)
    report.check_close("C9/h0_max_left", left, -1.0, h)
    g0 = free_gaussian_compare(1.0, 1.0, 0.0, axis(-10.0, 10.0, 0.01))
    sign = g0.channels["nonrel_htilde_norm"][0] < 0
    expect = np.abs(g0.x_axis) > math.sqrt(2.0)
    report.add("C9/htilde_sign_pattern", int(np.sum(sign != expect)), 0, 0, bool(np.all(sign == expect)))
    times = [0.5, 1.0, 2.0]
    g = free_gaussian_compare(1.0, 1.0, times, axis(-40.0, 40.0, 0.01))
    for i, t in enumerate(times):
        var = A.variance_growth(g, "born", [i])[0]
        report.check_close(f"C9/variance/t={t:g}", var, float(free_gaussian_variance(1.0, 1.0, t)),
                           1e-4, relative=True)


def dirac_identities(report: AnalysisReport, profile="default", fast=False):
    rng = np.random.default_rng(20240611)
    worst_norm = worst_orth = 0.0
    for _ in range(100):
        k = rng.normal(size=3) * rng.uniform(0.1, 5.0)
        m = float(rng.uniform(0.0, 3.0))
        u = {s: spinor("u", k, s, m) for s in (0.5, -0.5)}
        v = {s: spinor("v", -k, s, m) for s in (0.5, -0.5)}
        for s in (0.5, -0.5):
            for s2 in (0.5, -0.5):
                target = 1.0 if s == s2 else 0.0
                worst_norm = max(worst_norm, abs(u[s].dot(u[s2]) - target))
                worst_orth = max(worst_orth, abs(u[s].dot(v[s2])))
                w = spinor("v", k, s, m)
                worst_norm = max(worst_norm, abs(w.dot(spinor("v", k, s2, m)) - target))
    report.check_bound("C10/spinor_orthonormality", worst_norm, 1e-12)
    report.check_bound("C10/spinor_u_v_orthogonality", worst_orth, 1e-12)
    x, t = (axis(-12.0, 12.0, 0.1), axis(-8.0, 8.0, 0.25)) if fast else (axis(*DEFAULT_X), axis(*DEFAULT_T))
    spec = PacketSpec(species="dirac2d")
    g = build_grid(spec, x, t, ("born", "pseudo_h_norm", "dirac_charge_norm", "dirac_canonical_h_norm"))
    d_rho = float(np.max(np.abs(g.channels["dirac_charge_norm"] - g.channels["born"])))
    d_h = float(np.max(np.abs(g.channels["dirac_canonical_h_norm"] - g.channels["pseudo_h_norm"])))
    report.check_bound("C10/charge_equals_born", d_rho, 1e-12 * _scale(profile))
    report.check_bound("C10/canonical_equals_pseudo", d_h, 1e-8 * _scale(profile))
    g10 = build_grid(PacketSpec(k0=10.0, species="dirac2d"), axis(-12.0, 12.0, 0.05), np.array([0.0, 5.0]),
                     ("pseudo_h_norm", "dirac_spatial_h_norm"))
    d_sp = float(np.max(np.abs(g10.channels["dirac_spatial_h_norm"] - g10.channels["pseudo_h_norm"])))
    report.check_bound("C10/spatial_form_right_movers/k0=10", d_sp, 1e-8,
                       note="spatial-derivative form agrees once the packet is chiral")


def determinism(report: AnalysisReport, profile="default", fast=False):
    from .scenarios import run_scenario
    name = "fig-compall-t5" if fast else "fig-neg-regions"
    with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
        pa, _ = run_scenario(name, a)
        pb, _ = run_scenario(name, b)
        same = all(filecmp.cmp(x, y, shallow=False) for x, y in zip(pa, pb))
    report.add(f"C11/byte_identical/{name}", int(same), 1, 0, same)


FAST = (energy_closed_form, oracle_equivalence, conservation, dirac_identities, determinism)
FULL = (energy_closed_form, oracle_equivalence, conservation, sign_structure, latency,
        proxy_convergence, limits, velocity, nonrelativistic, dirac_identities, determinism)


def run_checks(suite: str = "fast", tol_profile: str = "default") -> AnalysisReport:
    """Run one suite; the report passes iff every record passes."""
    if suite not in SUITES:
        raise UsageError(f"suite must be one of {SUITES}")
    if tol_profile not in PROFILES:
        raise UsageError(f"tol_profile must be one of {PROFILES}")
    report = AnalysisReport(spec={"suite": suite, "tol_profile": tol_profile},
                            provenance={"version": __version__})
    fast = suite == "fast"
    shared = None
    for fn in (FAST if fast else FULL):
        if fn in (sign_structure, latency):
            if shared is None:
                shared = _figure_grid(A.PROXY_CHANNELS)
            fn(report, tol_profile, fast, grid=shared)
        else:
            fn(report, tol_profile, fast)
    return report
