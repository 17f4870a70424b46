"""Gaussian k-space packets, the free dispersion and global observables.

Natural units throughout: hbar = c = 1.  A packet is

    psi(k, t) = (2 dx^2 / pi)^(1/4) exp(-dx^2 (k - k0)^2) exp(-i omega(k) t)

so that |psi(k)|^2 is a normalized Gaussian with standard deviation
dk = 1 / (2 dx).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any, Mapping

import numpy as np

from . import numerics
from .errors import DomainError, UsageError

SPECIES = ("scalar", "dirac2d")


@dataclass(frozen=True)
class PacketSpec:
    """Parameters of a Gaussian packet.

    Attributes
    ----------
    delta_x : float
        Width parameter of the k-space Gaussian, dk = 1 / (2 delta_x).
    k0 : float
        Center wavenumber.
    mass : float
        Rest mass in units of hbar / (c delta_x) when delta_x = 1.
    charge_q : float
        Charge unit multiplying the normalized charge density.
    species : str
        ``"scalar"`` (Klein-Gordon) or ``"dirac2d"`` (massless 1+1D Dirac).
    """

    delta_x: float = 1.0
    k0: float = 0.0
    mass: float = 0.0
    charge_q: float = 1.0
    species: str = "scalar"

    def __post_init__(self):
        for name in ("delta_x", "k0", "mass", "charge_q"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise DomainError(f"{name} must be a real number")
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite")
            object.__setattr__(self, name, float(value))
        if self.delta_x <= 0:
            raise DomainError("delta_x must be > 0")
        if self.mass < 0:
            raise DomainError("mass must be >= 0")
        if self.species not in SPECIES:
            raise DomainError(f"species must be one of {SPECIES}, got {self.species!r}")

    @property
    def delta_k(self) -> float:
        return 0.5 / self.delta_x

    @property
    def k_range(self) -> tuple[float, float]:
        """Truncated k interval outside which the envelope is < 1e-18."""
        half = numerics.ENVELOPE_CUTOFF / self.delta_x
        return (self.k0 - half, self.k0 + half)

    def to_record(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_record(cls, record: Mapping[str, Any]) -> "PacketSpec":
        known = {"delta_x", "k0", "mass", "charge_q", "species"}
        extra = set(record) - known
        if extra:
            raise UsageError(f"unknown packet keys: {sorted(extra)}")
        values: dict[str, Any] = {}
        for key, raw in record.items():
            if key == "species":
                values[key] = str(raw)
            else:
                try:
                    values[key] = float(raw)
                except (TypeError, ValueError):
                    raise UsageError(f"{key}: not a number: {raw!r}") from None
        return cls(**values)


@dataclass(frozen=True)
class Observables:
    norm: float
    energy_E: float
    momentum_p: float
    charge_Q: float
    energy_closed: float | None = None


def omega(spec: PacketSpec, k):
    """Free dispersion sqrt(k^2 + m^2); exactly |k| when massless."""
    k = np.asarray(k, dtype=float)
    out = np.abs(k) if spec.mass == 0 else np.hypot(k, spec.mass)
    return out.item() if out.ndim == 0 else out


def complex_omega(spec: PacketSpec, k):
    """Analytic continuation of :func:`omega` off the real axis.

    Principal square root of k^2 + m^2; on the real axis it reduces to
    omega and it is analytic in the sectors |arg(+-k)| < pi/4.
    """
    k = np.asarray(k, dtype=complex)
    return np.sqrt(k * k + spec.mass**2)


def envelope(spec: PacketSpec, k):
    """The t = 0 amplitude (2 dx^2/pi)^(1/4) exp(-dx^2 (k - k0)^2).

    Accepts complex k (used by contour synthesis).
    """
    d = spec.delta_x
    return (2.0 * d * d / math.pi) ** 0.25 * np.exp(-d * d * (k - spec.k0) ** 2)


def amplitude_k(spec: PacketSpec, k, t=0.0):
    """psi(k, t): the envelope times the pure phase exp(-i omega t)."""
    k = np.asarray(k, dtype=float)
    out = envelope(spec, k) * np.exp(-1j * omega(spec, k) * t)
    return out.item() if out.ndim == 0 else out


def _k_breaks(spec):
    lo, hi = spec.k_range
    return [lo, 0.0, hi] if lo < 0.0 < hi else [lo, hi]


def _integrate(spec, f, tol):
    edges = _k_breaks(spec)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += numerics.integrate_adaptive(f, a, b, tol, rel_tol=1e-13).value.real
    return total


def massless_energy(spec: PacketSpec) -> float:
    """Closed form of int |k| |psi(k)|^2 dk for any k0."""
    d, k0 = spec.delta_x, spec.k0
    return (abs(k0) * math.erf(math.sqrt(2.0) * d * abs(k0))
            + math.exp(-2.0 * (d * k0) ** 2) / (math.sqrt(2.0 * math.pi) * d))


def observables(spec: PacketSpec, tol: float = 1e-13) -> Observables:
    """Norm, energy, momentum and charge of the packet by quadrature.

    For massless packets ``energy_closed`` holds the exact energy; for
    k0 = 0 it reduces to 1 / sqrt(2 pi delta_x^2).
    """
    def density(k):
        return abs(envelope(spec, k)) ** 2

    norm = _integrate(spec, density, tol)
    energy = _integrate(spec, lambda k: omega(spec, k) * density(k), tol)
    momentum = _integrate(spec, lambda k: k * density(k), tol)
    closed = massless_energy(spec) if spec.mass == 0 else None
    return Observables(norm=norm, energy_E=energy, momentum_p=momentum,
                       charge_Q=spec.charge_q * norm, energy_closed=closed)
