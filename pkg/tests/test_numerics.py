import math

import numpy as np
import pytest

from relproxy import numerics
from relproxy.errors import AccuracyError, DivergenceError, DomainError, RangeError

# frozen oracle values (scipy quad of the defining integrals, math.gamma)
ERFI_1 = 1.6504257587975428
I_QUARTER_1 = 1.123851871670946
GAMMA_QUARTER = 3.6256099082219087


class TestErfi:
    def test_origin(self):
        assert numerics.erfi(0.0) == 0.0

    def test_one(self):
        assert numerics.erfi(1.0) == pytest.approx(ERFI_1, rel=1e-14)

    @pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
    def test_odd(self, x):
        assert numerics.erfi(-x) == -numerics.erfi(x)

    def test_overflow_is_range_error(self):
        with pytest.raises(RangeError):
            numerics.erfi(30.0)

    def test_non_finite(self):
        with pytest.raises(DomainError):
            numerics.erfi(float("nan"))

    def test_faddeeva_relation(self):
        # erfi(x) = -i (1 - exp(x^2) w(x))... via erf(ix) = 1 - exp(x^2) w(-x) for real x
        x = 0.7
        erf_ix = 1.0 - math.exp(x * x) * numerics.faddeeva(-x)
        assert (-1j * erf_ix).real == pytest.approx(numerics.erfi(x), rel=1e-13)


class TestBessel:
    def test_i_quarter_at_one(self):
        assert numerics.bessel_quarter("I", 0.25, 1.0) == pytest.approx(I_QUARTER_1, rel=1e-12)

    def test_i_minus_quarter_small_x_limit(self):
        # x^{1/4} I_{-1/4}(x) -> 2^{1/4} / Gamma(3/4)
        limit = 2**0.25 / math.gamma(0.75)
        for x in (1e-4, 1e-6, 1e-8):
            assert x**0.25 * numerics.bessel_quarter("I", -0.25, x) == pytest.approx(limit, rel=1e-6)

    @pytest.mark.parametrize("nu", [0.25, 0.75])
    @pytest.mark.parametrize("x", [0.5, 2.0, 10.0])
    def test_wronskian(self, nu, x):
        h = 1e-5 * max(x, 1.0)
        i = lambda z: numerics.bessel_quarter("I", nu, z)
        k = lambda z: numerics.bessel_quarter("K", nu, z)
        di = (i(x + h) - i(x - h)) / (2 * h)
        dk = (k(x + h) - k(x - h)) / (2 * h)
        assert i(x) * dk - di * k(x) == pytest.approx(-1.0 / x, rel=1e-7)

    @pytest.mark.parametrize("x", [0.3, 1.9, 2.1, 24.0, 26.0, 60.0])
    def test_scaled_forms_consistent(self, x):
        for nu in (-0.75, -0.25, 0.25, 0.75):
            if x < 30:
                assert numerics.bessel_quarter("I", nu, x, scaled=True) == pytest.approx(
                    math.exp(-x) * numerics.bessel_quarter("I", nu, x), rel=1e-13)
            assert numerics.bessel_quarter("K", nu, x, scaled=True) == pytest.approx(
                math.exp(x) * numerics.bessel_quarter("K", nu, x), rel=1e-12)

    def test_k_even_in_order(self):
        for x in (0.5, 3.0, 30.0):
            assert numerics.bessel_quarter("K", -0.25, x) == pytest.approx(
                numerics.bessel_quarter("K", 0.25, x), rel=1e-13)

    @pytest.mark.parametrize("nu", [-0.75, -0.25, 0.25, 0.75])
    def test_against_scipy_across_branches(self, nu):
        # scipy.special is an independent implementation (Amos), used only as an oracle
        from scipy import special
        x = np.concatenate([np.geomspace(1e-3, 1.0, 9), [1.999, 2.0, 2.001, 7.0, 24.99, 25.0,
                                                         25.01, 40.0, 300.0]])
        i = numerics.bessel_quarter("I", nu, x, scaled=True)
        k = numerics.bessel_quarter("K", nu, x, scaled=True)
        assert np.max(np.abs(i / special.ive(nu, x) - 1)) < 1e-12
        assert np.max(np.abs(k / special.kve(nu, x) - 1)) < 1e-12

    def test_bad_order(self):
        with pytest.raises(DomainError):
            numerics.bessel_quarter("I", 0.5, 1.0)

    def test_bad_kind(self):
        with pytest.raises(DomainError):
            numerics.bessel_quarter("J", 0.25, 1.0)

    def test_negative_argument(self):
        with pytest.raises(DomainError):
            numerics.bessel_quarter("I", 0.25, -1.0)

    def test_k_at_zero_diverges(self):
        with pytest.raises(DivergenceError):
            numerics.bessel_quarter("K", 0.25, 0.0)


class TestIntegrateAdaptive:
    def test_gaussian(self):
        r = numerics.integrate_adaptive(lambda k: math.exp(-k * k), -np.inf, np.inf, tol=1e-12)
        assert r.value.real == pytest.approx(math.sqrt(math.pi), abs=1e-12)
        assert r.value.imag == 0.0

    def test_abs_k(self):
        half = numerics.integrate_adaptive(lambda k: k * math.exp(-k * k), 0, np.inf, tol=1e-13)
        assert 2 * half.value.real == pytest.approx(1.0, abs=1e-12)

    def test_inverse_sqrt_singularity(self):
        half = numerics.integrate_adaptive(lambda k: k**-0.5 * math.exp(-k * k), 0, np.inf,
                                           tol=1e-12)
        assert 2 * half.value.real == pytest.approx(GAMMA_QUARTER, abs=1e-10)

    def test_complex_integrand(self):
        r = numerics.integrate_adaptive(lambda k: np.exp(1j * k), 0, math.pi, tol=1e-12)
        assert r.value == pytest.approx(2j, abs=1e-12)

    def test_accuracy_error_carries_best(self):
        with pytest.raises(AccuracyError) as info:
            numerics.integrate_adaptive(lambda k: math.sin(1.0 / k) / k, 1e-6, 1.0,
                                        tol=1e-14, limit=5)
        assert info.value.best is not None

    def test_bad_tol(self):
        with pytest.raises(DomainError):
            numerics.integrate_adaptive(lambda k: 1.0, 0, 1, tol=0.0)


def gaussian_weight(k):
    return (2 / math.pi) ** 0.25 * np.exp(-k * k)


class TestSynthesize:
    def test_psi_origin(self):
        v = numerics.synthesize(gaussian_weight, 0.0, 0.0, np.abs)
        assert v.real == pytest.approx((2 * math.pi) ** -0.25, abs=1e-12)

    def test_phi_origin(self):
        w = lambda k: gaussian_weight(k) / np.sqrt(2 * np.abs(k))
        v = numerics.synthesize(w, 0.0, 0.0, np.abs, tol=1e-10)
        assert v.real == pytest.approx(GAMMA_QUARTER / (8 * math.pi**3) ** 0.25, abs=1e-9)

    def test_even_real_weight_gives_even_real_field(self):
        xs = np.linspace(0.1, 6, 7)
        for x in xs:
            left = numerics.synthesize(gaussian_weight, -x, 0.0, np.abs)
            right = numerics.synthesize(gaussian_weight, x, 0.0, np.abs)
            assert abs(left - right) < 1e-13
            assert abs(right.imag) < 1e-13

    def test_list_of_weights(self):
        vals = numerics.synthesize([gaussian_weight, lambda k: 2 * gaussian_weight(k)],
                                   0.3, 1.0, np.abs)
        assert vals[1] == pytest.approx(2 * vals[0], abs=1e-13)

    def test_grid_matches_points(self):
        x = np.linspace(-4, 4, 9)
        t = np.array([0.0, 2.0])
        grid = numerics.synthesize_grid([gaussian_weight], x, t, np.abs)[0]
        pts = numerics.synthesize_points([gaussian_weight], x, 2.0, np.abs)[0]
        assert np.max(np.abs(grid[1] - pts)) < 1e-14

    def test_non_finite_point(self):
        with pytest.raises(DomainError):
            numerics.synthesize(gaussian_weight, float("inf"), 0.0, np.abs)

    def test_rays_match_real_axis_outside_cone(self):
        x = np.array([4.0, -6.0, 9.0])
        weights = [lambda k: (2 / math.pi) ** 0.25 * np.exp(-k * k)]
        ray = numerics.synthesize_rays(weights, x, 1.0, lambda k: np.sqrt(k * k))[0]
        real = numerics.synthesize_points(weights, x, 1.0, np.abs)[0]
        assert np.max(np.abs(ray - real)) < 1e-13


class TestHermite:
    def test_low_orders(self):
        assert numerics.hermite(0, 0.7) == 1.0
        assert numerics.hermite(1, 0.7) == pytest.approx(1.4)

    def test_h3(self):
        assert numerics.hermite(3, 2.0) == 40.0

    def test_negative_order(self):
        with pytest.raises(DomainError):
            numerics.hermite(-1, 0.0)

    def test_array(self):
        x = np.array([0.0, 1.0, 2.0])
        assert np.allclose(numerics.hermite(2, x), 4 * x * x - 2)
