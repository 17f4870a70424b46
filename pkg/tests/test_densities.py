import math

import numpy as np
import pytest
from scipy.integrate import quad

from relproxy import densities, fields
from relproxy.analysis import integrate_channel
from relproxy.errors import CapabilityError, DomainError, UsageError
from relproxy.grid import axis, build_grid
from relproxy.packets import PacketSpec

E_REST = 1 / math.sqrt(2 * math.pi)
# H(0,0) = |phi_t(0,0)|^2 with phi_t(0,0) = -i (8 pi^3)^(-1/4) Gamma(3/4)
H_00 = (8 * math.pi**3) ** -0.5 * math.gamma(0.75) ** 2
PSI_00 = (2 * math.pi) ** -0.25
PHI_00 = math.gamma(0.25) / (8 * math.pi**3) ** 0.25


def origin_bundle(method="auto"):
    spec = PacketSpec()
    return densities.kg_proxies(fields.psi_x(spec, 0, 0, method), fields.phi_x(spec, 0, 0, method),
                                E_REST)


class TestKgProxiesAtOrigin:
    @pytest.mark.parametrize("method", ["closed_form", "quadrature"])
    def test_born(self, method):
        assert origin_bundle(method).born == pytest.approx(E_REST, abs=1e-10)

    @pytest.mark.parametrize("method", ["closed_form", "quadrature"])
    def test_canonical(self, method):
        b = origin_bundle(method)
        assert b.canonical_h == pytest.approx(H_00, abs=1e-10)
        assert b.canonical_h_norm == pytest.approx(0.2390, abs=5e-5)

    @pytest.mark.parametrize("method", ["closed_form", "quadrature"])
    def test_charge_and_pseudo(self, method):
        b = origin_bundle(method)
        # rho/q = 2 phi |phi_t| and H~ = psi |psi_t|, assembled from the Gamma values
        rho = 2 * PHI_00 * (8 * math.pi**3) ** -0.25 * math.gamma(0.75)
        psi_t = (2 / math.pi) ** 0.25 / math.sqrt(2 * math.pi)  # int |k| e^{-k^2} dk = 1
        assert b.charge_norm == pytest.approx(rho, abs=1e-9)
        assert b.pseudo_h_norm == pytest.approx(PSI_00 * psi_t / E_REST, abs=1e-9)
        assert b.charge_norm == pytest.approx(0.5642, abs=5e-5)
        assert b.pseudo_h_norm == pytest.approx(b.charge_norm, abs=1e-9)

    def test_charge_scaling(self):
        spec = PacketSpec(charge_q=-3.0)
        b = densities.kg_proxies(fields.psi_x(spec, 0.4, 1.0), fields.phi_x(spec, 0.4, 1.0),
                                 E_REST, q=-3.0)
        assert b.charge_rho == pytest.approx(-3.0 * b.charge_norm)

    def test_mismatched_points(self, rest):
        with pytest.raises(UsageError):
            densities.kg_proxies(fields.psi_x(rest, 0, 0), fields.phi_x(rest, 1, 0), E_REST)

    def test_bad_energy(self):
        with pytest.raises(DomainError):
            densities.kg_density_arrays(1, 0, 1, 0, 0, energy=0.0)

    def test_mass_term(self):
        d = densities.kg_density_arrays(0, 0, 2.0, 0, 0, energy=1.0, mass=0.5)
        assert d["canonical_h"] == pytest.approx(1.0)


class TestMomentumDensities:
    def test_vanish_at_origin_at_rest(self, rest):
        p, c = densities.kg_momentum_densities(fields.psi_x(rest, 0, 0), fields.phi_x(rest, 0, 0))
        assert abs(p) < 1e-15 and abs(c) < 1e-15

    @pytest.mark.parametrize("k0", [0.0, 10.0])
    def test_integrals(self, k0):
        spec = PacketSpec(k0=k0)
        grid = build_grid(spec, axis(-12, 12, 0.02), [0.0, 3.0], ("pseudo_p", "canonical_p"))
        for ti in range(2):
            for ch in ("pseudo_p", "canonical_p"):
                got = integrate_channel(grid, ch, ti)
                if k0 == 0:
                    assert abs(got) < 1e-10
                else:
                    assert got == pytest.approx(k0, rel=1e-6)


class TestNonrel:
    def test_free_gaussian_htilde_sign(self):
        d = 1.0
        x = np.linspace(-6, 6, 1201)
        out = densities.nonrel_density_arrays(*fields.nonrel_free_gaussian_arrays(d, 1.0, x, 0.0),
                                              V=0.0, m=1.0)
        inside = np.abs(x) < math.sqrt(2) * d - 1e-9
        outside = np.abs(x) > math.sqrt(2) * d + 1e-9
        assert np.all(out["h_tilde"][inside] > 0)
        assert np.all(out["h_tilde"][outside] < 0)

    def test_real_state_has_no_momentum(self):
        s = fields.nonrel_free_gaussian(1.0, 2.0, 0.8, 0.0)
        assert densities.nonrel_densities(s, 0.0, 2.0).momentum_density == 0.0

    def test_capability_error_without_second_derivatives(self):
        s = fields.FieldSample(1.0, 0.0, 0.0, "closed_form")
        with pytest.raises(CapabilityError):
            densities.nonrel_densities(s, 0.0, 1.0)

    def test_h_hat_adds_rest_energy(self):
        s = fields.nonrel_free_gaussian(1.0, 2.0, 0.3, 0.5)
        d = densities.nonrel_densities(s, 0.0, 2.0)
        assert d.h_hat == pytest.approx(d.h + 2.0 * d.born)

    @pytest.mark.parametrize("n", [0, 1, 2, 4])
    def test_oscillator_energy(self, n):
        # int h dx = (n + 1/2) omega with m = omega = 1 so ell = 1
        ell = 1.0
        def h(x):
            psi = fields.oscillator_state(n, x, ell)
            dpsi = fields.oscillator_state_dx(n, x, ell)
            return densities.nonrel_density_arrays(psi, 0, dpsi, None, None, 0.5 * x * x, 1.0)["h"]
        assert quad(h, -np.inf, np.inf, epsabs=1e-13)[0] == pytest.approx(n + 0.5, abs=1e-10)


class TestOscillatorEnergyDensity:
    def test_ground_state_shape(self):
        ell = 1.3
        assert densities.oscillator_h_n(0, 0.0, ell) == 0.0
        x = np.linspace(-3 * ell, 3 * ell, 6001)
        h = densities.oscillator_h_n(0, x, ell)
        peaks = x[1:-1][(h[1:-1] > h[:-2]) & (h[1:-1] > h[2:])]
        assert np.allclose(np.sort(peaks), [-ell, ell], atol=x[1] - x[0])

    def test_closed_shape(self):
        ell, x = 1.0, np.linspace(-4, 4, 9)
        want = 2 * x * x * fields.oscillator_state(0, x, ell) ** 2
        assert np.allclose(densities.oscillator_h_n(0, x, ell), want, atol=1e-15)

    def test_first_excited_normalized(self):
        assert quad(lambda x: densities.oscillator_h_n(1, x, 1.0), -np.inf, np.inf)[0] == \
            pytest.approx(1.0, abs=1e-10)

    def test_separation_from_born(self):
        x = np.linspace(-4, 4, 801)
        born = fields.oscillator_state(0, x, 1.0) ** 2
        assert x[np.argmax(born)] == 0.0
        assert densities.oscillator_h_n(0, 0.0, 1.0) == 0.0
