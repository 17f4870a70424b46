"""Position proxies of the Klein-Gordon packet and nonrelativistic densities.

Units hbar = c = 1.  With psi the Fourier-synthesized wave packet and phi
the first-quantized field:

===============  ==========================================
born             |psi|^2
canonical_h      |phi_t|^2 + |phi_x|^2 + m^2 |phi|^2
pseudo_h         (i/2) (psi* psi_t - psi_t* psi)
charge_rho       i q (phi* phi_t - phi_t* phi)
pseudo_p         (1/2i) (psi* psi_x - psi_x* psi)
canonical_p      -(phi_t* phi_x + phi_x* phi_t)
===============  ==========================================

The normalized variants divide the energies by E and the charge by q, so
each integrates to one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fields
from .errors import CapabilityError, DomainError, UsageError
from .fields import FieldSample

DENSITY_NAMES = ("born", "canonical_h_norm", "pseudo_h_norm", "charge_norm", "pseudo_p",
                 "canonical_p", "nonrel_h_norm", "nonrel_htilde_norm", "oscillator_h_n")


@dataclass(frozen=True)
class ProxyBundle:
    born: float
    canonical_h: float
    pseudo_h: float
    charge_rho: float
    canonical_h_norm: float
    pseudo_h_norm: float
    charge_norm: float


@dataclass(frozen=True)
class NonrelDensities:
    born: float
    h: float
    h_tilde: float
    j: float
    j_tilde: float
    momentum_density: float
    h_hat: float


def kg_density_arrays(psi, psi_t, phi, phi_t, phi_x, energy: float,
                      charge_q: float = 1.0, mass: float = 0.0) -> dict[str, np.ndarray]:
    """All four proxies and their normalized forms on arrays."""
    if not energy > 0:
        raise DomainError("energy must be > 0")
    born = np.abs(psi) ** 2
    canonical = np.abs(phi_t) ** 2 + np.abs(phi_x) ** 2
    if mass:
        canonical = canonical + mass * mass * np.abs(phi) ** 2
    pseudo = -np.imag(np.conj(psi) * psi_t)
    charge_norm = -2.0 * np.imag(np.conj(phi) * phi_t)
    return {
        "born": born,
        "canonical_h": canonical,
        "pseudo_h": pseudo,
        "charge_rho": charge_q * charge_norm,
        "canonical_h_norm": canonical / energy,
        "pseudo_h_norm": pseudo / energy,
        "charge_norm": charge_norm,
    }


def momentum_density_arrays(psi, psi_x, phi_t, phi_x):
    """(pseudo_p, canonical_p) on arrays."""
    pseudo_p = np.imag(np.conj(psi) * psi_x)
    canonical_p = -2.0 * np.real(np.conj(phi_t) * phi_x)
    return pseudo_p, canonical_p


def _same_point(psi: FieldSample, phi: FieldSample):
    if psi.x != phi.x or psi.t != phi.t:
        raise UsageError(f"samples at different points: psi at ({psi.x}, {psi.t}), "
                         f"phi at ({phi.x}, {phi.t})")


def kg_proxies(psi: FieldSample, phi: FieldSample, E: float, q: float = 1.0,
               m: float = 0.0) -> ProxyBundle:
    """The four position proxies from a coherent psi/phi sample pair."""
    _same_point(psi, phi)
    d = kg_density_arrays(psi.value, psi.d_t, phi.value, phi.d_t, phi.d_x, E, q, m)
    return ProxyBundle(**{k: float(v) for k, v in d.items()})


def kg_momentum_densities(psi: FieldSample, phi: FieldSample) -> tuple[float, float]:
    """(pseudo_p, canonical_p) at the common sample point."""
    _same_point(psi, phi)
    p, c = momentum_density_arrays(psi.value, psi.d_x, phi.d_t, phi.d_x)
    return float(p), float(c)


def nonrel_density_arrays(psi, psi_t, psi_x, psi_xx, psi_xt, V, m: float):
    """Schrodinger densities on arrays; ``psi_xx``/``psi_xt`` may be None."""
    if not m > 0:
        raise DomainError("mass must be > 0")
    born = np.abs(psi) ** 2
    h = np.abs(psi_x) ** 2 / (2 * m) + V * born
    out = {
        "born": born,
        "h": h,
        "j": -np.real(np.conj(psi_t) * psi_x) / m,
        "momentum_density": np.imag(np.conj(psi) * psi_x),
        "h_hat": h + m * born,
    }
    if psi_xx is not None:
        out["h_tilde"] = V * born - np.real(np.conj(psi) * psi_xx) / (2 * m)
    if psi_xt is not None:
        out["j_tilde"] = np.real(np.conj(psi) * psi_xt - np.conj(psi_t) * psi_x) / (2 * m)
    return out


def nonrel_densities(sample: FieldSample, V_at_x: float, m: float) -> NonrelDensities:
    """All nonrelativistic densities at the sample point.

    Raises
    ------
    CapabilityError
        If the sample lacks the second derivatives ``d_xx`` and ``d_xt``.
    """
    if sample.d_xx is None or sample.d_xt is None:
        raise CapabilityError("nonrel_densities needs d_xx and d_xt in the sample")
    d = nonrel_density_arrays(sample.value, sample.d_t, sample.d_x, sample.d_xx,
                              sample.d_xt, V_at_x, m)
    return NonrelDensities(**{k: float(v) for k, v in d.items()})


def oscillator_h_n(n: int, x, ell: float):
    """Energy density of the n-th oscillator state normalized to unit integral.

    With V = m omega^2 x^2 / 2 and ell^2 = 1/(m omega) this is
    (ell^2 psi_n'^2 + x^2 psi_n^2 / ell^2) / (2n + 1).
    """
    psi = fields.oscillator_state(n, x, ell)
    dpsi = fields.oscillator_state_dx(n, x, ell)
    x = np.asarray(x, dtype=float)
    out = (ell * ell * dpsi**2 + (x / ell) ** 2 * psi**2) / (2 * n + 1)
    return out.item() if np.ndim(out) == 0 else out
