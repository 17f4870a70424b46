import math

import numpy as np
import pytest

from relproxy import nonrel
from relproxy.analysis import integrate_channel, refined_argmax, variance_growth
from relproxy.errors import DomainError


class TestOscillator:
    @pytest.mark.parametrize("n", [0, 1])
    def test_born_and_energy_both_normalized(self, n):
        x = np.linspace(-10, 10, 2001)
        g = nonrel.oscillator_compare(nonrel.OscillatorScenario(n=n), x)
        born = integrate_channel(g, "born", 0)
        h = integrate_channel(g, "oscillator_h_n", 0)
        assert born - h == pytest.approx(0.0, abs=1e-12)
        assert h == pytest.approx(1.0, abs=1e-12)

    def test_ground_state_maxima(self):
        ell = 2.0
        x = np.linspace(-8, 8, 1601)
        g = nonrel.oscillator_compare(nonrel.OscillatorScenario(n=0, ell=ell), x)
        born, h = g.slice("born", 0), g.slice("oscillator_h_n", 0)
        assert x[np.argmax(born)] == 0.0
        assert refined_argmax(x[x > 0], h[x > 0]) == pytest.approx(ell, abs=2 * g.dx)
        assert refined_argmax(-x[x < 0][::-1], h[x < 0][::-1]) == pytest.approx(ell, abs=2 * g.dx)

    def test_electron_length_scale(self):
        scn = nonrel.electron_oscillator(0, 727.0)
        want = math.sqrt(1.054571817e-34 / (9.1093837015e-31 * 2 * math.pi * 727.0))
        assert scn.ell_SI == pytest.approx(want, rel=1e-12)
        assert scn.ell_SI == pytest.approx(1.6e-4, rel=0.05)
        meta = scn.metadata()
        assert meta["ell_discrepancy"] is True
        assert meta["ell_quoted_m"] == 1e-3

    def test_no_si_fields_without_mass(self):
        assert nonrel.OscillatorScenario().ell_SI is None

    @pytest.mark.parametrize("kwargs", [{"n": -1}, {"ell": 0.0}, {"mass_SI": 1.0},
                                        {"mass_SI": -1.0, "frequency_Hz": 1.0}])
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            nonrel.OscillatorScenario(**kwargs)


class TestFreeGaussian:
    def test_energy(self):
        assert nonrel.free_gaussian_energy(0.5, 2.0) == pytest.approx(1 / (8 * 2.0 * 0.25))

    def test_default_time(self):
        g = nonrel.free_gaussian_compare(1.5, 2.0)
        assert g.t_axis.tolist() == [2.0 * 1.5**2]
        assert g.metadata["t_default_used"] is True

    def test_htilde_sign_pattern(self):
        d = 1.0
        x = np.linspace(-8, 8, 1601)
        g = nonrel.free_gaussian_compare(d, 1.0, t=0.0, x_grid=x)
        h = g.slice("nonrel_htilde_norm", 0)
        edge = math.sqrt(2) * d
        assert np.all(h[np.abs(x) > edge + 1e-9] < 0)
        assert np.all(h[np.abs(x) < edge - 1e-9] > 0)

    @pytest.mark.parametrize("t", [0.0, 1.0, 4.0])
    def test_equal_integrals(self, t):
        g = nonrel.free_gaussian_compare(1.0, 1.0, t=t)
        h = integrate_channel(g, "nonrel_h_norm", 0)
        ht = integrate_channel(g, "nonrel_htilde_norm", 0)
        assert h == pytest.approx(1.0, abs=1e-10)
        assert ht == pytest.approx(h, abs=1e-10)

    def test_variance_at_default_time(self):
        d, m = 1.0, 3.0
        g = nonrel.free_gaussian_compare(d, m)
        var = variance_growth(g, "born")[0]
        assert var == pytest.approx(nonrel.free_gaussian_variance(d, m, m * d * d), rel=1e-4)
        assert nonrel.free_gaussian_variance(d, m, m * d * d) == pytest.approx(1.25)

    @pytest.mark.parametrize("tilde", [False, True])
    def test_continuity(self, tilde):
        x = np.linspace(-10, 10, 4001)
        assert nonrel.continuity_residual(1.0, 1.0, x, 0.7, tilde=tilde) < 1e-5

    def test_invalid(self):
        with pytest.raises(DomainError):
            nonrel.free_gaussian_compare(1.0, 0.0)
