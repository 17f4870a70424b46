"""Nonrelativistic counterexamples: oscillator eigenstates and the free
Gaussian, with the electron-oscillator length converted to SI units.

Natural units hbar = 1 everywhere except in :class:`OscillatorScenario`,
which is the only place SI constants enter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import __version__, fields
from .analysis import DensityGrid
from .densities import nonrel_density_arrays, oscillator_h_n
from .errors import DomainError

HBAR_SI = 1.054571817e-34  # J s
ELECTRON_MASS_SI = 9.1093837015e-31  # kg
# reference value of the separation for electrons at 727 Hz
QUOTED_ELL_M = 1e-3


@dataclass(frozen=True)
class OscillatorScenario:
    """Oscillator state n with length unit ell = sqrt(hbar / (m omega)).

    When ``mass_SI`` and ``frequency_Hz`` are both given, ``ell_SI`` is
    computed from them; ``ell`` itself stays the natural length unit.
    """

    n: int = 0
    ell: float = 1.0
    mass_SI: float | None = None
    frequency_Hz: float | None = None

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or not 0 <= self.n <= 30:
            raise DomainError("n must be an integer in [0, 30]")
        if not self.ell > 0:
            raise DomainError("ell must be > 0")
        if (self.mass_SI is None) != (self.frequency_Hz is None):
            raise DomainError("give both mass_SI and frequency_Hz or neither")
        if self.mass_SI is not None and not (self.mass_SI > 0 and self.frequency_Hz > 0):
            raise DomainError("mass_SI and frequency_Hz must be > 0")

    @property
    def ell_SI(self) -> float | None:
        if self.mass_SI is None:
            return None
        return math.sqrt(HBAR_SI / (self.mass_SI * 2 * math.pi * self.frequency_Hz))

    def metadata(self) -> dict:
        meta = {"n": int(self.n), "ell": self.ell}
        if self.mass_SI is not None:
            ell_si = self.ell_SI
            meta.update({
                "mass_SI_kg": self.mass_SI,
                "frequency_Hz": self.frequency_Hz,
                "ell_SI_m": ell_si,
                "ell_quoted_m": QUOTED_ELL_M,
                "ell_discrepancy": bool(abs(ell_si - QUOTED_ELL_M) > 0.1 * QUOTED_ELL_M),
            })
        return meta


def electron_oscillator(n: int = 0, frequency_Hz: float = 727.0) -> OscillatorScenario:
    return OscillatorScenario(n=n, mass_SI=ELECTRON_MASS_SI, frequency_Hz=frequency_Hz)


def _oscillator_channels(scn: OscillatorScenario, x):
    psi = fields.oscillator_state(scn.n, x, scn.ell)
    return {"born": np.asarray(psi) ** 2, "oscillator_h_n": np.asarray(oscillator_h_n(scn.n, x, scn.ell))}


def oscillator_compare(scn: OscillatorScenario, x_grid) -> DensityGrid:
    """Born density and normalized energy density of oscillator state n."""
    x_grid = np.asarray(x_grid, dtype=float)
    values = {k: v[None, :] for k, v in _oscillator_channels(scn, x_grid).items()}
    meta = {"scenario": "oscillator", "oscillator": scn.metadata(), "version": __version__}
    return DensityGrid(x_grid, np.array([0.0]), values, meta,
                       tail=lambda ch, xs, t: _oscillator_channels(scn, xs)[ch])


def free_gaussian_energy(delta_x: float, m: float) -> float:
    """Kinetic energy <p^2>/2m = 1 / (8 m dx^2) of the free Gaussian."""
    return 1.0 / (8.0 * m * delta_x * delta_x)


def free_gaussian_density_arrays(delta_x: float, m: float, x, t):
    """Nonrelativistic densities of the free Gaussian, V = 0, as arrays."""
    psi, psi_t, psi_x, psi_xx, psi_xt = fields.nonrel_free_gaussian_arrays(delta_x, m, x, t)
    return nonrel_density_arrays(psi, psi_t, psi_x, psi_xx, psi_xt, 0.0, m)


def _free_channels(delta_x, m, x, t):
    d = free_gaussian_density_arrays(delta_x, m, x, t)
    e = free_gaussian_energy(delta_x, m)
    return {"born": d["born"], "nonrel_h_norm": d["h"] / e, "nonrel_htilde_norm": d["h_tilde"] / e,
            "nonrel_j": d["j"], "nonrel_jtilde": d["j_tilde"],
            "nonrel_hhat_norm": d["h_hat"] / (e + m)}


FREE_CHANNELS = ("born", "nonrel_h_norm", "nonrel_htilde_norm")


def free_gaussian_compare(delta_x: float, m: float, t=None, x_grid=None,
                          channels=FREE_CHANNELS) -> DensityGrid:
    """The three-density comparison for the freely spreading Gaussian.

    ``t`` defaults to m dx^2 (hbar = 1); it may also be a sequence of times.
    Energies are normalized by the conserved total 1/(8 m dx^2).
    """
    if not m > 0:
        raise DomainError("m must be > 0")
    if not delta_x > 0:
        raise DomainError("delta_x must be > 0")
    t_default = t is None
    if t_default:
        t = m * delta_x * delta_x
    t_axis = np.atleast_1d(np.asarray(t, dtype=float))
    if x_grid is None:
        half = 12.0 * math.sqrt(delta_x**2 + (t_axis.max(initial=0.0) / (2 * m * delta_x)) ** 2)
        x_grid = np.linspace(-half, half, 2401)
    x_grid = np.asarray(x_grid, dtype=float)
    tt, xx = np.meshgrid(t_axis, x_grid, indexing="ij")
    all_ch = _free_channels(delta_x, m, xx, tt)
    values = {c: all_ch[c] for c in channels}
    meta = {"scenario": "free-gaussian", "delta_x": delta_x, "mass": m,
            "t_default_used": t_default, "energy": free_gaussian_energy(delta_x, m),
            "version": __version__}
    return DensityGrid(x_grid, t_axis, values, meta,
                       tail=lambda ch, xs, tv: _free_channels(delta_x, m, xs, tv)[ch])


def free_gaussian_variance(delta_x: float, m: float, t) -> np.ndarray:
    """Exact spreading law dx^2 + t^2 / (4 m^2 dx^2)."""
    t = np.asarray(t, dtype=float)
    return delta_x**2 + t * t / (4 * m * m * delta_x**2)


def continuity_residual(delta_x: float, m: float, x_grid, t: float, dt: float = 1e-4,
                        tilde: bool = False) -> float:
    """max |d_t h + d_x J| / max h for the free Gaussian.

    d_t h is a central difference in time, d_x J a central difference of
    the analytic current on x_grid.
    """
    x = np.asarray(x_grid, dtype=float)
    key_h, key_j = ("h_tilde", "j_tilde") if tilde else ("h", "j")
    lo = free_gaussian_density_arrays(delta_x, m, x, t - dt)[key_h]
    hi = free_gaussian_density_arrays(delta_x, m, x, t + dt)[key_h]
    now = free_gaussian_density_arrays(delta_x, m, x, t)
    dh_dt = (hi - lo) / (2 * dt)
    dj_dx = np.gradient(now[key_j], x)
    return float(np.max(np.abs(dh_dt + dj_dx)) / np.max(np.abs(now[key_h])))
