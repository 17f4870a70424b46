"""Dirac spinor algebra and the massless 1+1D Dirac single-particle state.

In 1+1D the gamma matrices are gamma_0 = diag(-1, 1) and
gamma_1 = [[0, 1], [-1, 0]].  With gamma_0^2 = 1 and gamma_1^2 = -1 the
metric is (+, -), so gamma^1 = -gamma_1 and gamma^0 gamma^1 = sigma_x.

The single-particle spinor is phi = psi (1, 1) / sqrt(2).  Two energy
densities are reported:

``h_canonical``
    The on-shell form (i/2)(phi^+ phi_t - phi_t^+ phi), which equals the
    scalar pseudo-density of psi.
``h_spatial``
    (1/2i)(phi^+ g^0 g^1 phi_x - phi_x^+ g^0 g^1 phi), the spatial-derivative form.
    It equals the on-shell form only where phi obeys the massless Dirac
    equation; (1, 1) is chiral, so that holds for packets built from k > 0
    modes alone.  For other packets it reduces to the pseudo-momentum
    density of psi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fields
from .errors import DomainError, UnsupportedClosedFormError
from .packets import PacketSpec

GAMMA_0 = np.array([[-1, 0], [0, 1]], dtype=complex)
GAMMA_1_LOWER = np.array([[0, 1], [-1, 0]], dtype=complex)
GAMMA_1 = -GAMMA_1_LOWER
ALPHA = GAMMA_0 @ GAMMA_1
CHIRAL = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)


@dataclass(frozen=True)
class Spinor4:
    components: tuple[complex, complex, complex, complex]
    k: tuple[float, float, float]
    s: float
    branch: str

    def array(self) -> np.ndarray:
        return np.array(self.components, dtype=complex)

    def dot(self, other: "Spinor4") -> complex:
        """Hermitian product self^+ . other."""
        return complex(np.vdot(self.array(), other.array()))


def spinor(branch: str, k, s: float, m: float) -> Spinor4:
    """Normalized 4-spinor u(k, s) or v(k, s) in the Dirac representation."""
    if branch not in ("u", "v"):
        raise DomainError(f"branch must be 'u' or 'v', got {branch!r}")
    if s not in (0.5, -0.5):
        raise DomainError(f"s must be +1/2 or -1/2, got {s!r}")
    if m < 0:
        raise DomainError("mass must be >= 0")
    k1, k2, k3 = (float(v) for v in k)
    energy = math.sqrt(k1 * k1 + k2 * k2 + k3 * k3 + m * m)
    if energy == 0:
        raise DomainError("spinor undefined for m = 0 and k = 0")
    kp, km = complex(k1, k2), complex(k1, -k2)
    em = energy + m
    if branch == "u":
        comps = (em, 0.0, k3, kp) if s == 0.5 else (0.0, em, km, -k3)
    else:
        comps = (km, -k3, 0.0, em) if s == 0.5 else (k3, kp, em, 0.0)
    norm = 1.0 / math.sqrt(2.0 * energy * em)
    return Spinor4(tuple(complex(c) * norm for c in comps), (k1, k2, k3), s, branch)


@dataclass(frozen=True)
class DiracDensities2D:
    rho_over_q: float
    h_canonical: float
    h_pseudo: float
    h_spatial: float


def _require_massless(spec):
    if spec.mass != 0:
        raise UnsupportedClosedFormError("the 1+1D Dirac state is defined for mass = 0 only")
    if spec.species != "dirac2d":
        raise DomainError("spec.species must be 'dirac2d'")


def dirac2d_arrays(psi, psi_t, psi_x) -> dict[str, np.ndarray]:
    """Spinor densities from psi and its derivatives on arrays.

    The spinor components are built explicitly and contracted with the
    gamma matrices; no scalar shortcut is taken.
    """
    psi, psi_t, psi_x = (np.asarray(a, dtype=complex) for a in (psi, psi_t, psi_x))
    phi = psi[..., None] * CHIRAL
    phi_t = psi_t[..., None] * CHIRAL
    phi_x = psi_x[..., None] * CHIRAL
    rho = np.real(np.sum(np.conj(phi) * phi, axis=-1))
    h_can = np.real(0.5j * np.sum(np.conj(phi) * phi_t - np.conj(phi_t) * phi, axis=-1))
    a_phi = phi @ ALPHA.T
    a_phix = phi_x @ ALPHA.T
    h_sp = np.real(np.sum(np.conj(phi) * a_phix - np.conj(phi_x) * a_phi, axis=-1) / 2j)
    h_pseudo = -np.imag(np.conj(psi) * psi_t)
    return {"rho_over_q": rho, "h_canonical": h_can, "h_pseudo": h_pseudo, "h_spatial": h_sp}


def dirac2d_single_particle(spec: PacketSpec, x: float, t: float,
                            method: str = "auto") -> DiracDensities2D:
    """Charge and energy densities of the massless 1+1D Dirac packet."""
    _require_massless(spec)
    s = fields.psi_x(spec, x, t, method)
    d = dirac2d_arrays(s.value, s.d_t, s.d_x)
    return DiracDensities2D(**{k: float(v) for k, v in d.items()})
