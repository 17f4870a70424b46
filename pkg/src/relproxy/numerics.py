"""Special functions and quadrature kernels.

Everything here is a pure function of its arguments.  Complex values are
plain Python ``complex`` / numpy ``complex128``.

Fourier synthesis convention::

    F(x, t) = (2 pi)^(-1/2) * Integral dk  w(k) exp(i [k x - omega(k) t])

The k axis is always split at 0 and each half-line is integrated in the
variable u = sqrt(|k|).  The Jacobian 2u removes a |k|^(-1/2) endpoint
singularity and the |k| kink of the massless dispersion never lies inside
a panel.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special
from scipy.integrate import IntegrationWarning, quad

from .errors import AccuracyError, DivergenceError, DomainError, RangeError

# Gaussian envelopes are cut where exp(-(dk * delta_x)^2) < 1e-18.
ENVELOPE_CUTOFF = 6.5
MAX_PANEL_PHASE = math.pi / 2
DEFAULT_TOL = 1e-10
GL_ORDER = 12

_LOG_DBL_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    abs_error_estimate: float
    evaluations: int


# ---------------------------------------------------------------------------
# error functions

def faddeeva(z):
    """w(z) = exp(-z^2) erfc(-i z)."""
    return special.wofz(z)


def erfi(z):
    """Imaginary error function erfi(z) = -i erf(i z).

    Real input gives a real result.  Raises :class:`RangeError` where
    exp(z^2) overflows.
    """
    z_arr = np.asarray(z)
    if not np.all(np.isfinite(z_arr)):
        raise DomainError("erfi: argument must be finite")
    if np.any(np.real(z_arr * z_arr) > _LOG_DBL_MAX):
        raise RangeError("erfi: exp(z^2) overflows for this argument")
    out = special.erfi(z_arr)
    return out.item() if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# modified Bessel functions of quarter-integer order

_QUARTER_ORDERS = (-0.75, -0.25, 0.25, 0.75)
# I: power series below, Hankel asymptotic above.  The two agree to ~1e-14
# on [15, 40] (see tests/test_numerics.py::test_bessel_branch_overlap).
I_SWITCH = 25.0
# K: reflection formula below K_SERIES_MAX, trapezoid on the integral
# representation up to I_SWITCH, asymptotic beyond.
K_SERIES_MAX = 2.0


def _i_series_scaled(nu, x):
    half = 0.5 * x
    with np.errstate(divide="ignore"):
        term = half**nu / math.gamma(nu + 1.0)
    total = term.copy()
    q = half * half
    for k in range(1, 400):
        term = term * q / (k * (k + nu))
        total = total + term
        if np.all(term <= 1e-17 * total):
            break
    return total * np.exp(-x)


def _asymptotic_coeffs(nu, x):
    """Partial sums of sum_k a_k(nu) / x^k (without sign alternation)."""
    mu = 4.0 * nu * nu
    terms = []
    a = np.ones_like(x)
    terms.append(a)
    for k in range(1, 60):
        a = a * (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        terms.append(a)
        if np.all(np.abs(a) < 1e-17):
            break
    return terms


def _i_asymptotic_scaled(nu, x):
    terms = _asymptotic_coeffs(nu, x)
    total = np.zeros_like(x)
    for k, a in enumerate(terms):
        total = total + (-1) ** k * a
    return total / np.sqrt(2.0 * math.pi * x)


def _k_asymptotic_scaled(nu, x):
    total = np.zeros_like(x)
    for a in _asymptotic_coeffs(nu, x):
        total = total + a
    return total * np.sqrt(math.pi / (2.0 * x))


def _k_integral_scaled(nu, x):
    # e^x K_nu(x) = int_0^inf exp(-x (cosh s - 1)) cosh(nu s) ds;
    # the integrand is even and analytic, so the trapezoid rule converges
    # geometrically.
    out = np.empty_like(x)
    for i, xi in enumerate(x):
        s_max = math.acosh(1.0 + 45.0 / xi)
        s = np.linspace(0.0, s_max, 321)
        f = np.exp(-xi * (np.cosh(s) - 1.0)) * np.cosh(nu * s)
        h = s[1] - s[0]
        out[i] = h * (f.sum() - 0.5 * f[0] - 0.5 * f[-1])
    return out


def bessel_i(nu, x, scaled=False):
    """Modified Bessel function I_nu(x) for real x >= 0 and nu > -1."""
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x).ravel()
    if np.any(flat < 0) or not np.all(np.isfinite(flat)):
        raise DomainError("bessel_i: x must be finite and >= 0")
    out = np.empty_like(flat)
    small = flat <= I_SWITCH
    if np.any(small):
        out[small] = _i_series_scaled(nu, flat[small])
    if np.any(~small):
        out[~small] = _i_asymptotic_scaled(nu, flat[~small])
    if not scaled:
        with np.errstate(over="ignore"):
            out = out * np.exp(flat)
    out = out.reshape(x.shape)
    return out.item() if out.ndim == 0 else out


def bessel_k(nu, x, scaled=False):
    """Modified Bessel function K_nu(x) for real x > 0, non-integer nu."""
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x).ravel()
    if np.any(flat < 0) or not np.all(np.isfinite(flat)):
        raise DomainError("bessel_k: x must be finite and >= 0")
    if np.any(flat == 0):
        raise DivergenceError("bessel_k: K_nu diverges at x = 0")
    out = np.empty_like(flat)
    lo = flat <= K_SERIES_MAX
    mid = (flat > K_SERIES_MAX) & (flat <= I_SWITCH)
    hi = flat > I_SWITCH
    if np.any(lo):
        xs = flat[lo]
        diff = _i_series_scaled(-nu, xs) - _i_series_scaled(nu, xs)
        out[lo] = 0.5 * math.pi / math.sin(nu * math.pi) * diff * np.exp(2 * xs)
    if np.any(mid):
        out[mid] = _k_integral_scaled(nu, flat[mid])
    if np.any(hi):
        out[hi] = _k_asymptotic_scaled(nu, flat[hi])
    if not scaled:
        out = out * np.exp(-flat)
    out = out.reshape(x.shape)
    return out.item() if out.ndim == 0 else out


def bessel_quarter(kind, order, x, scaled=False):
    """I or K of order +-1/4 (or +-3/4) at real x >= 0.

    ``scaled`` returns exp(-x) I(x) or exp(x) K(x).
    """
    if order not in _QUARTER_ORDERS:
        raise DomainError(f"order must be one of {_QUARTER_ORDERS}, got {order}")
    if kind == "I":
        return bessel_i(order, x, scaled)
    if kind == "K":
        return bessel_k(order, x, scaled)
    raise DomainError(f"kind must be 'I' or 'K', got {kind!r}")


# ---------------------------------------------------------------------------
# adaptive quadrature

def _quad_part(f, a, b, tol, rel_tol, limit):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        out = quad(f, a, b, epsabs=tol, epsrel=rel_tol, limit=limit, full_output=1)
    value, err, info = out[0], out[1], out[2]
    ok = len(out) == 3
    return value, err, info["neval"], ok


def integrate_adaptive(f: Callable[[float], complex], a: float, b: float,
                       tol: float = DEFAULT_TOL, limit: int = 500,
                       rel_tol: float = 0.0) -> QuadratureResult:
    """Adaptive Gauss-Kronrod quadrature of a complex-valued f on [a, b].

    Infinite limits are allowed (mapped internally by QUADPACK).  The
    target is max(tol, rel_tol * |value|).
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    re, err_re, n_re, ok_re = _quad_part(lambda k: complex(f(k)).real, a, b, tol / 2, rel_tol, limit)
    im, err_im, n_im, ok_im = _quad_part(lambda k: complex(f(k)).imag, a, b, tol / 2, rel_tol, limit)
    err = math.hypot(err_re, err_im)
    value = complex(re, im)
    if not (ok_re and ok_im) and err > max(tol, rel_tol * abs(value)):
        raise AccuracyError(f"integrate_adaptive: no convergence on [{a}, {b}]",
                            best=value, abs_error=err)
    return QuadratureResult(value, err, n_re + n_im)


# ---------------------------------------------------------------------------
# Fourier synthesis

def _gl(order):
    xi, wi = leggauss(order)
    return xi, wi


def fourier_nodes(k_lo, k_hi, phase_rate, max_width=0.25, order=GL_ORDER):
    """Quadrature nodes/weights for int_{k_lo}^{k_hi} f(k) dk.

    Panels are uniform in k with width bounded by ``max_width`` and by a
    phase change of at most pi/2 at ``phase_rate`` (radians per unit k).
    Inside each panel the Gauss-Legendre nodes live in u = sqrt(|k|).
    """
    if not k_hi > k_lo:
        raise DomainError("fourier_nodes: need k_hi > k_lo")
    width = max_width
    if phase_rate > 0:
        width = min(width, MAX_PANEL_PHASE / phase_rate)
    xi, wi = _gl(order)
    segments = []
    if k_lo < 0.0 < k_hi:
        segments = [(-1.0, 0.0, -k_lo), (1.0, 0.0, k_hi)]
    elif k_hi <= 0.0:
        segments = [(-1.0, -k_hi, -k_lo)]
    else:
        segments = [(1.0, k_lo, k_hi)]
    ks, ws = [], []
    for sign, p, q in segments:
        n = max(1, int(math.ceil((q - p) / width - 1e-12)))
        edges = np.sqrt(np.linspace(p, q, n + 1))
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        u = (mid[:, None] + half[:, None] * xi[None, :]).ravel()
        w = (half[:, None] * wi[None, :]).ravel() * 2.0 * u
        ks.append(sign * u * u)
        ws.append(w)
    return np.concatenate(ks), np.concatenate(ws)


_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _as_list(weights):
    if callable(weights):
        return [weights], True
    return list(weights), False


def synthesize_grid(weights, x, t, dispersion, k_range=(-ENVELOPE_CUTOFF, ENVELOPE_CUTOFF),
                    max_width=0.25, order=GL_ORDER, group_speed=1.0):
    """Synthesize one or more weights on the rectangular grid t x x.

    Returns complex arrays of shape (len(t), len(x)).  The kernel
    exp(i k x) exp(-i omega t) factorizes, so the work is one matrix
    product per weight.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    fns, single = _as_list(weights)
    rate = float(np.max(np.abs(x))) + group_speed * float(np.max(np.abs(t)))
    k, w = fourier_nodes(k_range[0], k_range[1], rate, max_width, order)
    time_phase = np.exp(-1j * np.outer(t, dispersion(k)))
    coeffs = [time_phase * (np.asarray(fn(k)) * w * _INV_SQRT_2PI)[None, :] for fn in fns]
    outs = [np.empty((t.size, x.size), dtype=complex) for _ in fns]
    chunk = max(1, int(2e7 // max(k.size, 1)))
    for start in range(0, x.size, chunk):
        sl = slice(start, start + chunk)
        kernel = np.exp(1j * np.outer(k, x[sl]))
        for out, coeff in zip(outs, coeffs):
            out[:, sl] = coeff @ kernel
    return outs[0] if single else outs


def synthesize_points(weights, x, t, dispersion, k_range=(-ENVELOPE_CUTOFF, ENVELOPE_CUTOFF),
                      max_width=0.25, order=GL_ORDER, group_speed=1.0):
    """Synthesize at paired points (x_j, t_j) of broadcastable arrays."""
    xb, tb = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    shape = xb.shape
    xf, tf = xb.ravel(), tb.ravel()
    fns, single = _as_list(weights)
    rate = float(np.max(np.abs(xf), initial=0.0)) + group_speed * float(np.max(np.abs(tf), initial=0.0))
    k, w = fourier_nodes(k_range[0], k_range[1], rate, max_width, order)
    om = dispersion(k)
    gs = [np.asarray(fn(k)) * w * _INV_SQRT_2PI for fn in fns]
    outs = [np.empty(xf.size, dtype=complex) for _ in fns]
    chunk = max(1, int(4e6 // max(k.size, 1)))
    for start in range(0, xf.size, chunk):
        sl = slice(start, start + chunk)
        kernel = np.exp(1j * (np.outer(xf[sl], k) - np.outer(tf[sl], om)))
        for out, g in zip(outs, gs):
            out[sl] = kernel @ g
    outs = [o.reshape(shape) for o in outs]
    if not shape:
        outs = [complex(o) for o in outs]
    return outs[0] if single else outs


def synthesize(weight, x, t, dispersion, tol=DEFAULT_TOL,
               k_range=(-ENVELOPE_CUTOFF, ENVELOPE_CUTOFF), max_width=0.25,
               max_refinements=6, group_speed=1.0):
    """(2 pi)^(-1/2) int dk weight(k) exp(i [k x - omega(k) t]) at one point.

    ``weight`` may be a callable or a list of callables sharing the nodes.
    The panel width is halved until two successive estimates agree to
    ``tol``; :class:`AccuracyError` carries the best estimate otherwise.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    if not (math.isfinite(x) and math.isfinite(t)):
        raise DomainError("synthesize: x and t must be finite")
    single = callable(weight)
    fns = [weight] if single else list(weight)

    def estimate(width):
        return synthesize_points(fns, float(x), float(t), dispersion, k_range,
                                 max_width=width, group_speed=group_speed)

    width = max_width
    prev = estimate(width)
    diff = math.inf
    for _ in range(max_refinements):
        width /= 2
        cur = estimate(width)
        diff = max(abs(c - p) for c, p in zip(cur, prev))
        if diff <= tol:
            if not all(math.isfinite(abs(c)) for c in cur):
                raise DomainError("synthesize: non-finite result")
            return cur[0] if single else cur
        prev = cur
    best = prev[0] if single else prev
    raise AccuracyError("synthesize: refinement did not converge", best=best, abs_error=diff)


def ray_angle(delta_x, k0, cap=math.pi / 8):
    """Rotation angle keeping the continued Gaussian growth below e^2."""
    b2 = (delta_x * k0) ** 2
    if b2 <= 0:
        return cap
    # sin^2 / cos(2 theta) <= 2 / b2
    s2 = (2.0 / b2) / (1.0 + 4.0 / b2)
    return min(cap, math.asin(math.sqrt(s2)))


def synthesize_rays(weights, x, t, dispersion, delta_x=1.0, k0=0.0, group_speed=1.0,
                    order=GL_ORDER, theta=None):
    """Synthesis outside the light cone (|x| > c|t|) by rotated contours.

    Each half-line k > 0 and k < 0 is turned into the half-plane where
    exp(i k x) decays.  The weights and the dispersion must be analytic
    continuations from the respective half-line and accept complex k;
    sqrt(k^2 + mu^2) with the principal branch qualifies, including mu = 0.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    fns, single = _as_list(weights)
    margin = np.abs(x) - group_speed * abs(float(t))
    if np.any(margin <= 0):
        raise DomainError("synthesize_rays requires |x| > c|t|")
    th = ray_angle(delta_x, k0) if theta is None else theta
    xi, wi = _gl(order)
    kabs = abs(k0)
    c2 = math.cos(2 * th)
    disc = (kabs * math.cos(th)) ** 2 - c2 * (kabs**2 - 45.0 / delta_x**2)
    r_gauss = (kabs * math.cos(th) + math.sqrt(max(disc, 0.0))) / c2
    outs = [np.empty(x.size, dtype=complex) for _ in fns]
    for i, xv in enumerate(x):
        sigma = 1.0 if xv > 0 else -1.0
        r_max = min(r_gauss, 45.0 / (math.sin(th) * margin[i]))
        rate = abs(xv) + group_speed * abs(t) + 4.0 * delta_x**2 * (r_max + kabs) * math.sin(th)
        n = max(1, int(math.ceil(r_max * rate / MAX_PANEL_PHASE)), int(math.ceil(r_max * delta_x / 0.25)))
        edges = np.sqrt(np.linspace(0.0, r_max, n + 1))
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        v = (mid[:, None] + half[:, None] * xi[None, :]).ravel()
        dr = (half[:, None] * wi[None, :]).ravel() * 2.0 * v
        r = v * v
        acc = [0j] * len(fns)
        for direction in (np.exp(1j * sigma * th), -np.exp(-1j * sigma * th)):
            k = r * direction
            jac = dr * (direction if direction.real > 0 else -direction)
            kern = np.exp(1j * (k * xv - dispersion(k) * t)) * jac
            for j, fn in enumerate(fns):
                acc[j] += np.sum(fn(k) * kern)
        for j in range(len(fns)):
            outs[j][i] = acc[j] * _INV_SQRT_2PI
    return outs[0] if single else outs


# ---------------------------------------------------------------------------

def hermite(n: int, x):
    """Physicists' Hermite polynomial H_n(x) by three-term recurrence."""
    if n < 0:
        raise DomainError("hermite: n must be >= 0")
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if n == 0:
        return h_prev.item() if h_prev.ndim == 0 else h_prev
    h = 2.0 * x
    for j in range(1, n):
        h_prev, h = h, 2.0 * x * h - 2.0 * j * h_prev
    return h.item() if h.ndim == 0 else h
