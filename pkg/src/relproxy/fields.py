"""The x-space wave packet psi(x, t), the first-quantized field phi(x, t)
and the nonrelativistic reference states.

psi is the plain Fourier synthesis of the k-space amplitude; phi carries an
extra mode weight 1/sqrt(2 omega).  Derivatives are spectral: the weight is
multiplied by -i omega (time) or i k (space) under the integral.

Closed forms
------------
psi, massless, any k0: each half-line integral is a scaled complementary
error function.  It is written with the Faddeeva function w(z) evaluated
only in the upper half plane, where |w| <= 1, so nothing overflows for any
|x +- t|.  Negative k0 uses the mirror psi_{k0}(x, t) = psi_{-k0}(-x, t).

phi, massless, k0 = 0: each light-cone branch reduces to quarter-order
modified Bessel functions of s = (x -+ t)^2 / (8 dx^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import DomainError, UnsupportedClosedFormError, UsageError
from .packets import PacketSpec, complex_omega, envelope, omega

METHODS = ("auto", "closed_form", "quadrature")
_ALIASES = {"closed": "closed_form", "quad": "quadrature"}


@dataclass(frozen=True)
class FieldSample:
    """A complex field value with derivatives at one spacetime point."""

    value: complex
    d_t: complex
    d_x: complex
    method: str
    x: float = 0.0
    t: float = 0.0
    d_xx: complex | None = None
    d_xt: complex | None = None


def _method(method: str) -> str:
    method = _ALIASES.get(method, method)
    if method not in METHODS:
        raise UsageError(f"method must be one of {METHODS}, got {method!r}")
    return method


def psi_has_closed_form(spec: PacketSpec) -> bool:
    return spec.mass == 0


def phi_has_closed_form(spec: PacketSpec) -> bool:
    return spec.mass == 0 and spec.k0 == 0


def resolve_method(spec: PacketSpec, method: str, field: str = "both") -> str:
    """Map ``auto`` to a concrete method and validate explicit requests.

    ``auto`` picks the closed form only when every requested field has one,
    so psi and phi on a grid always come from the same route.
    """
    method = _method(method)
    checks = {"psi": psi_has_closed_form(spec),
              "phi": phi_has_closed_form(spec),
              "both": psi_has_closed_form(spec) and phi_has_closed_form(spec)}
    available = checks[field]
    if method == "auto":
        return "closed_form" if available else "quadrature"
    if method == "closed_form" and not available:
        what = {"psi": "psi needs mass = 0",
                "phi": "phi needs mass = 0 and k0 = 0",
                "both": "psi and phi together need mass = 0 and k0 = 0"}[field]
        raise UnsupportedClosedFormError(f"no closed form: {what}")
    return method


# ---------------------------------------------------------------------------
# closed forms (vectorized)

def psi_closed(delta_x: float, k0: float, x, t):
    """(psi, psi_t, psi_x) of the massless packet as arrays."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if k0 < 0:
        val, d_t, d_x = psi_closed(delta_x, -k0, -x, t)
        return val, d_t, -d_x
    d = delta_x
    b = d * k0
    a_r = (x - t) / (2 * d)
    a_l = (x + t) / (2 * d)
    pref = math.sqrt(math.pi) / (2 * d)
    g = math.exp(-b * b)
    h_r = pref * (2.0 * np.exp(2j * a_r * b - a_r * a_r) - g * numerics.faddeeva(-a_r + 1j * b))
    h_l = pref * g * numerics.faddeeva(-a_l + 1j * b)
    c_r = k0 + 1j * (x - t) / (2 * d * d)
    c_l = k0 + 1j * (x + t) / (2 * d * d)
    edge = 1j * g / (2 * d * d)
    dh_r = 1j * c_r * h_r + edge
    dh_l = 1j * c_l * h_l - edge
    norm = (d * d / (2 * math.pi**3)) ** 0.25
    return norm * (h_r + h_l), norm * (dh_l - dh_r), norm * (dh_r + dh_l)


_TINY = 1e-6


def _bessel_branch(a, d):
    """Even/odd parts E, O of one light-cone branch and dE/dA, dO/dA."""
    a = np.asarray(a, dtype=float)
    abs_a = np.abs(a)
    sgn = np.sign(a)
    s = a * a / (8 * d * d)
    root = np.sqrt(abs_a)
    e = np.empty_like(a)
    o = np.empty_like(a)
    de = np.empty_like(a)
    do = np.empty_like(a)
    big = abs_a >= _TINY * d
    if np.any(big):
        sb, rb, ab = s[big], root[big], a[big]
        im14 = numerics.bessel_quarter("I", -0.25, sb, scaled=True)
        ip14 = numerics.bessel_quarter("I", 0.25, sb, scaled=True)
        im34 = numerics.bessel_quarter("I", -0.75, sb, scaled=True)
        ip34 = numerics.bessel_quarter("I", 0.75, sb, scaled=True)
        e[big] = rb * im14
        o[big] = sgn[big] * rb * ip14
        de[big] = rb * ab / (4 * d * d) * (ip34 - im14)
        do[big] = rb * np.abs(ab) / (4 * d * d) * (im34 - ip14)
    small = ~big
    if np.any(small):
        # leading terms of the power series; relative error O(s) < 1e-13
        q = (16 * d * d) ** 0.25
        e[small] = q / math.gamma(0.75)
        o[small] = a[small] / (q * math.gamma(1.25))
        de[small] = -a[small] * q / (4 * d * d * math.gamma(0.75))
        do[small] = q**3 / (math.gamma(0.25) * 4 * d * d)
    return e, o, de, do


def phi_closed(delta_x: float, x, t):
    """(phi, phi_t, phi_x) of the massless k0 = 0 packet as arrays."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    d = delta_x
    e_r, o_r, de_r, do_r = _bessel_branch(x - t, d)
    e_l, o_l, de_l, do_l = _bessel_branch(x + t, d)
    pref = 0.25 * (math.pi / (2 * d * d)) ** 0.25
    f = e_r + 1j * o_r
    g = e_l - 1j * o_l
    df = de_r + 1j * do_r
    dg = de_l - 1j * do_l
    return pref * (f + g), pref * (dg - df), pref * (df + dg)


# ---------------------------------------------------------------------------
# spectral weights

def spectral_weights(spec: PacketSpec, field: str, complex_k: bool = False):
    """Weights (value, d_t, d_x) for synthesis of ``psi`` or ``phi``."""
    om = (lambda k: complex_omega(spec, k)) if complex_k else (lambda k: omega(spec, k))

    if field == "psi":
        def base(k):
            return envelope(spec, k)
    elif field == "phi":
        def base(k):
            return envelope(spec, k) / np.sqrt(2.0 * om(k))
    else:
        raise UsageError(f"field must be 'psi' or 'phi', got {field!r}")
    return [base,
            lambda k: -1j * om(k) * base(k),
            lambda k: 1j * k * base(k)]


def _dispersion(spec):
    return lambda k: omega(spec, k)


def _synth_kwargs(spec):
    return dict(k_range=spec.k_range, max_width=0.25 / spec.delta_x)


def _quadrature_point(spec, field, x, t, tol):
    vals = numerics.synthesize(spectral_weights(spec, field), x, t, _dispersion(spec),
                               tol=tol, **_synth_kwargs(spec))
    return FieldSample(vals[0], vals[1], vals[2], "quadrature", x, t)


def _check_point(x, t):
    try:
        x, t = float(x), float(t)
    except (TypeError, ValueError):
        raise DomainError("x and t must be real numbers") from None
    if not (math.isfinite(x) and math.isfinite(t)):
        raise DomainError("x and t must be finite")
    return x, t


def psi_x(spec: PacketSpec, x: float, t: float, method: str = "auto",
          tol: float = numerics.DEFAULT_TOL) -> FieldSample:
    """The wave packet psi(x, t) with its first derivatives."""
    x, t = _check_point(x, t)
    method = resolve_method(spec, method, "psi")
    if method == "closed_form":
        v, dt, dx = psi_closed(spec.delta_x, spec.k0, x, t)
        return FieldSample(complex(v), complex(dt), complex(dx), method, x, t)
    return _quadrature_point(spec, "psi", x, t, tol)


def phi_x(spec: PacketSpec, x: float, t: float, method: str = "auto",
          tol: float = numerics.DEFAULT_TOL) -> FieldSample:
    """The first-quantized field phi(x, t) with its first derivatives."""
    x, t = _check_point(x, t)
    method = resolve_method(spec, method, "phi")
    if method == "closed_form":
        v, dt, dx = phi_closed(spec.delta_x, x, t)
        return FieldSample(complex(v), complex(dt), complex(dx), method, x, t)
    return _quadrature_point(spec, "phi", x, t, tol)


FIELD_KEYS = ("psi", "psi_t", "psi_x", "phi", "phi_t", "phi_x")


def kg_fields_grid(spec: PacketSpec, x_axis, t_axis, method: str = "auto",
                   fields=("psi", "phi")) -> tuple[dict[str, np.ndarray], str]:
    """psi, phi and their derivatives on the grid t_axis x x_axis.

    Returns a dict of complex (len(t), len(x)) arrays keyed by
    :data:`FIELD_KEYS` and the concrete method used.
    """
    x_axis = np.asarray(x_axis, dtype=float)
    t_axis = np.asarray(t_axis, dtype=float)
    want = "both" if set(fields) == {"psi", "phi"} else fields[0]
    method = resolve_method(spec, method, want)
    out: dict[str, np.ndarray] = {}
    if method == "closed_form":
        tt, xx = np.meshgrid(t_axis, x_axis, indexing="ij")
        if "psi" in fields:
            out["psi"], out["psi_t"], out["psi_x"] = psi_closed(spec.delta_x, spec.k0, xx, tt)
        if "phi" in fields:
            out["phi"], out["phi_t"], out["phi_x"] = phi_closed(spec.delta_x, xx, tt)
        return out, method
    weights, names = [], []
    for field in fields:
        weights += spectral_weights(spec, field)
        names += [field, field + "_t", field + "_x"]
    arrays = numerics.synthesize_grid(weights, x_axis, t_axis, _dispersion(spec),
                                      **_synth_kwargs(spec))
    return dict(zip(names, arrays)), method


def kg_fields_far(spec: PacketSpec, x, t: float, fields=("psi", "phi"),
                  method: str = "auto") -> dict[str, np.ndarray]:
    """Fields at arbitrary, possibly very distant, points of one time slice.

    Points outside the light cone (|x| > |t|) use rotated k contours, which
    stay accurate however far out x is; the rest use real-axis synthesis.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    want = "both" if set(fields) == {"psi", "phi"} else fields[0]
    method = resolve_method(spec, method, want)
    out: dict[str, np.ndarray] = {}
    if method == "closed_form":
        if "psi" in fields:
            out["psi"], out["psi_t"], out["psi_x"] = psi_closed(spec.delta_x, spec.k0, x, t)
        if "phi" in fields:
            out["phi"], out["phi_t"], out["phi_x"] = phi_closed(spec.delta_x, x, t)
        return out
    names = [n for f in fields for n in (f, f + "_t", f + "_x")]
    for n in names:
        out[n] = np.empty(x.size, dtype=complex)
    outside = np.abs(x) > np.abs(t) + 1.0 * spec.delta_x
    if np.any(outside):
        weights = [w for f in fields for w in spectral_weights(spec, f, complex_k=True)]
        vals = numerics.synthesize_rays(weights, x[outside], t,
                                        lambda k: complex_omega(spec, k),
                                        delta_x=spec.delta_x, k0=spec.k0)
        for n, v in zip(names, vals):
            out[n][outside] = v
    if np.any(~outside):
        weights = [w for f in fields for w in spectral_weights(spec, f)]
        vals = numerics.synthesize_points(weights, x[~outside], t, _dispersion(spec),
                                          **_synth_kwargs(spec))
        for n, v in zip(names, vals):
            out[n][~outside] = v
    return out


# ---------------------------------------------------------------------------
# nonrelativistic reference states (hbar = 1)

def nonrel_free_gaussian(delta_x: float, m: float, x: float, t: float) -> FieldSample:
    """Freely spreading Gaussian at rest, exact, with analytic derivatives.

    psi = (2 pi dx^2)^(-1/4) (1 + i tau)^(-1/2) exp(-x^2 / (4 dx^2 (1 + i tau)))
    with tau = t / (2 m dx^2).  Also fills ``d_xx`` and ``d_xt``.
    """
    if not m > 0:
        raise DomainError("nonrel_free_gaussian: m must be > 0")
    if not delta_x > 0:
        raise DomainError("nonrel_free_gaussian: delta_x must be > 0")
    v, dt, dx, dxx, dxt = nonrel_free_gaussian_arrays(delta_x, m, x, t)
    return FieldSample(complex(v), complex(dt), complex(dx), "closed_form", float(x), float(t),
                       d_xx=complex(dxx), d_xt=complex(dxt))


def nonrel_free_gaussian_arrays(delta_x: float, m: float, x, t):
    """(psi, psi_t, psi_x, psi_xx, psi_xt) on broadcast arrays."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    d2 = delta_x * delta_x
    rate = 1.0 / (2.0 * m * d2)
    z = 1.0 + 1j * t * rate
    beta = 1.0 / (4.0 * d2 * z)
    psi = (2 * math.pi * d2) ** -0.25 * z**-0.5 * np.exp(-beta * x * x)
    psi_x = -2.0 * beta * x * psi
    psi_xx = (4.0 * beta * beta * x * x - 2.0 * beta) * psi
    beta_t = -1j * rate * 4.0 * d2 * beta * beta
    log_t = -0.5j * rate / z - beta_t * x * x
    psi_t = log_t * psi
    psi_xt = -2.0 * x * (beta_t * psi + beta * psi_t)
    return psi, psi_t, psi_x, psi_xx, psi_xt


def _oscillator(n, x, ell):
    xi = np.asarray(x, dtype=float) / ell
    norm = (2.0**n * math.factorial(n) * math.sqrt(math.pi) * ell) ** -0.5
    return norm * numerics.hermite(n, xi) * np.exp(-0.5 * xi * xi)


def _check_oscillator(n, ell):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 0:
        raise DomainError("oscillator_state: n must be a non-negative integer")
    if n > 30:
        raise DomainError("oscillator_state: n must be <= 30")
    if not ell > 0:
        raise DomainError("oscillator_state: ell must be > 0")
    return int(n)


def oscillator_state(n: int, x, ell: float):
    """Normalized oscillator eigenfunction psi_n(x) with length unit ell."""
    n = _check_oscillator(n, ell)
    out = _oscillator(n, x, ell)
    return out.item() if np.ndim(out) == 0 else out


def oscillator_state_dx(n: int, x, ell: float):
    """d psi_n / dx from the ladder relation."""
    n = _check_oscillator(n, ell)
    down = _oscillator(n - 1, x, ell) if n > 0 else 0.0
    out = (math.sqrt(n / 2.0) * down - math.sqrt((n + 1) / 2.0) * _oscillator(n + 1, x, ell)) / ell
    return out.item() if np.ndim(out) == 0 else out
