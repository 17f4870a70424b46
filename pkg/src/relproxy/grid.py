"""Assemble density grids for a packet spec.

Every channel of one grid comes from a single field evaluation with one
method, so psi and phi can never silently disagree.
"""

from __future__ import annotations

import numpy as np

from . import __version__, fields
from .analysis import DensityGrid
from .densities import kg_density_arrays, momentum_density_arrays
from .dirac import dirac2d_arrays
from .errors import UnsupportedClosedFormError, UsageError
from .packets import PacketSpec, observables

PSI_CHANNELS = ("born", "pseudo_h", "pseudo_h_norm", "pseudo_p", "re_psi", "im_psi",
                "dirac_charge_norm", "dirac_canonical_h_norm", "dirac_spatial_h_norm")
PHI_CHANNELS = ("canonical_h", "canonical_h_norm", "charge_rho", "charge_norm",
                "canonical_p", "re_phi", "im_phi")
KG_CHANNELS = PSI_CHANNELS + PHI_CHANNELS
DEFAULT_CHANNELS = ("born", "canonical_h_norm", "pseudo_h_norm", "charge_norm")


def packet_energy(spec: PacketSpec) -> float:
    obs = observables(spec)
    return obs.energy_closed if obs.energy_closed is not None else obs.energy_E


def needed_fields(channels) -> tuple[str, ...]:
    unknown = [c for c in channels if c not in KG_CHANNELS]
    if unknown:
        raise UsageError(f"unknown channels {unknown}; valid: {list(KG_CHANNELS)}")
    out = []
    if any(c in PSI_CHANNELS for c in channels):
        out.append("psi")
    if any(c in PHI_CHANNELS for c in channels):
        out.append("phi")
    return tuple(out)


def channel_values(spec: PacketSpec, energy: float, f: dict[str, np.ndarray],
                   channels) -> dict[str, np.ndarray]:
    """Evaluate the named channels from field arrays keyed like FIELD_KEYS."""
    out: dict[str, np.ndarray] = {}
    if "psi" in f:
        shape = f["psi"].shape
        zero = np.zeros(shape, dtype=complex)
    else:
        shape = f["phi"].shape
        zero = np.zeros(shape, dtype=complex)
    psi = f.get("psi", zero)
    psi_t = f.get("psi_t", zero)
    psi_x = f.get("psi_x", zero)
    phi = f.get("phi", zero)
    phi_t = f.get("phi_t", zero)
    phi_x = f.get("phi_x", zero)
    kg = kg_density_arrays(psi, psi_t, phi, phi_t, phi_x, energy, spec.charge_q, spec.mass)
    pseudo_p, canonical_p = momentum_density_arrays(psi, psi_x, phi_t, phi_x)
    extra = {"pseudo_p": pseudo_p, "canonical_p": canonical_p,
             "re_psi": psi.real, "im_psi": psi.imag, "re_phi": phi.real, "im_phi": phi.imag}
    dirac = None
    for c in channels:
        if c in kg:
            out[c] = kg[c]
        elif c in extra:
            out[c] = extra[c]
        else:
            if spec.mass != 0:
                raise UnsupportedClosedFormError(f"{c}: the 1+1D Dirac state needs mass = 0")
            if dirac is None:
                dirac = dirac2d_arrays(psi, psi_t, psi_x)
            out[c] = {"dirac_charge_norm": dirac["rho_over_q"],
                      "dirac_canonical_h_norm": dirac["h_canonical"] / energy,
                      "dirac_spatial_h_norm": dirac["h_spatial"] / energy}[c]
    return out


def build_grid(spec: PacketSpec, x_axis, t_axis, channels=DEFAULT_CHANNELS,
               method: str = "auto", extra_meta: dict | None = None) -> DensityGrid:
    """Sample the requested channels on t_axis x x_axis.

    The returned grid carries a tail evaluator using the same method, so
    integrals can account for the algebraic tails beyond the window.
    """
    channels = tuple(channels)
    if not channels:
        raise UsageError("no channels requested")
    want = needed_fields(channels)
    x_axis = np.asarray(x_axis, dtype=float)
    t_axis = np.asarray(t_axis, dtype=float)
    energy = packet_energy(spec)
    f, used = fields.kg_fields_grid(spec, x_axis, t_axis, method, fields=want)
    values = channel_values(spec, energy, f, channels)

    def tail(channel: str, xs: np.ndarray, t: float) -> np.ndarray:
        far = fields.kg_fields_far(spec, xs, t, fields=needed_fields((channel,)), method=used)
        return channel_values(spec, energy, far, (channel,))[channel]

    meta = {"spec": spec.to_record(), "method": used, "energy_E": energy,
            "version": __version__, "channels": list(channels)}
    if extra_meta:
        meta.update(extra_meta)
    return DensityGrid(x_axis, t_axis, values, meta, tail)


def axis(lo: float, hi: float, step: float) -> np.ndarray:
    """Inclusive uniform axis lo, lo + step, ..., hi."""
    if not step > 0:
        raise UsageError(f"step must be > 0, got {step}")
    if hi < lo:
        raise UsageError(f"need min <= max, got {lo} > {hi}")
    n = int(round((hi - lo) / step))
    if abs(lo + n * step - hi) > 1e-9 * max(1.0, abs(hi)):
        n = int(np.floor((hi - lo) / step + 1e-9))
    return np.round(lo + step * np.arange(n + 1), 12) + 0.0


DEFAULT_X = (-12.0, 12.0, 0.02)
DEFAULT_T = (-8.0, 8.0, 0.05)
