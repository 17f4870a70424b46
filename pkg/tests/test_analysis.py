import json
import math

import numpy as np
import pytest

from relproxy import analysis
from relproxy.analysis import AnalysisReport, DensityGrid
from relproxy.errors import BoundaryLeakError, NotApplicableError, UsageError
from relproxy.grid import axis, build_grid
from relproxy.nonrel import free_gaussian_compare
from relproxy.packets import PacketSpec, observables

X = axis(-12, 12, 0.02)
PROXIES = ("born", "canonical_h_norm", "pseudo_h_norm", "charge_norm")


@pytest.fixture(scope="module")
def rest_grid():
    return build_grid(PacketSpec(), X, [-5.0, 0.0, 0.5, 5.0], PROXIES + ("canonical_h",))


class TestGrid:
    def test_shape_checked(self):
        with pytest.raises(UsageError):
            DensityGrid([0, 1, 2], [0.0], {"a": np.zeros((2, 3))})

    def test_uniform_axis_required(self):
        with pytest.raises(UsageError):
            DensityGrid([0, 1, 3], [0.0], {"a": np.zeros((1, 3))})

    def test_unknown_channel(self, rest_grid):
        with pytest.raises(UsageError):
            rest_grid.channel("nope")


class TestIntegrate:
    @pytest.mark.parametrize("ti", range(4))
    def test_born_normalized(self, rest_grid, ti):
        assert analysis.integrate_channel(rest_grid, "born", ti) == pytest.approx(1.0, abs=1e-6)

    def test_canonical_total_energy(self, rest_grid):
        got = analysis.integrate_channel(rest_grid, "canonical_h", 1)
        assert got == pytest.approx(1 / math.sqrt(2 * math.pi), abs=1e-6)

    def test_zeros(self):
        g = DensityGrid(axis(-1, 1, 0.5), [0.0], {"z": np.zeros((1, 5))})
        assert analysis.integrate_channel(g, "z", 0) == 0.0

    def test_leak_without_tail_raises(self, rest_grid):
        g = DensityGrid(rest_grid.x_axis, rest_grid.t_axis, dict(rest_grid.channels))
        with pytest.raises(BoundaryLeakError):
            analysis.integrate_channel(g, "canonical_h_norm", 1, tails="raise")
        with pytest.raises(BoundaryLeakError):
            analysis.integrate_channel(g, "canonical_h_norm", 1)

    def test_exact_tails_matter(self, rest_grid):
        inner = analysis._trapezoid_corrected(rest_grid.slice("charge_norm", 1), rest_grid.dx)
        full = analysis.integrate_channel(rest_grid, "charge_norm", 1)
        assert abs(inner - 1.0) > 1e-4
        assert full == pytest.approx(1.0, abs=1e-9)

    def test_polynomial_exactness(self):
        x = axis(-1, 1, 0.1)
        # the endpoint-corrected rule integrates cubics exactly
        assert analysis._trapezoid_corrected(x**3 + x * x, 0.1) == pytest.approx(2 / 3, abs=1e-13)

    def test_bad_tails_mode(self, rest_grid):
        with pytest.raises(UsageError):
            analysis.integrate_channel(rest_grid, "born", 0, tails="maybe")


class TestNegativeRegions:
    def test_born_never_negative(self, rest_grid):
        for ti in range(4):
            assert analysis.negative_regions(rest_grid, "born", ti) == []

    def test_charge_at_five(self, rest_grid):
        regions = analysis.negative_regions(rest_grid, "charge_norm", 3)
        assert regions and all(r.outside_cone for r in regions)

    def test_pseudo_near_origin(self, rest_grid):
        regions = analysis.negative_regions(rest_grid, "pseudo_h_norm", 1)
        assert regions and all(r.outside_cone for r in regions)

    def test_pseudo_at_five_is_nonnegative(self, rest_grid):
        # Once the two lobes separate, the energy pseudo-density of the
        # massless packet at rest is non-negative on the grid; its negative
        # regions live at small |t| only.
        assert analysis.negative_regions(rest_grid, "pseudo_h_norm", 3) == []
        assert rest_grid.slice("pseudo_h_norm", 3).min() > -1e-8

    def test_floor_must_be_positive(self, rest_grid):
        with pytest.raises(UsageError):
            analysis.negative_regions(rest_grid, "born", 0, floor_fraction=0.0)


class TestConeOffset:
    def test_born_lag_within_width(self, rest_grid):
        right, left = analysis.cone_offset(rest_grid, "born", 3)
        assert 0 < right <= 1.0
        assert right == pytest.approx(left, abs=rest_grid.dx)

    def test_canonical_centered(self, rest_grid):
        right, _ = analysis.cone_offset(rest_grid, "canonical_h_norm", 3)
        assert abs(right) <= 0.5

    def test_time_reversal(self, rest_grid):
        assert analysis.cone_offset(rest_grid, "born", 0) == pytest.approx(
            analysis.cone_offset(rest_grid, "born", 3), abs=1e-12)

    def test_not_applicable_at_small_t(self, rest_grid):
        with pytest.raises(NotApplicableError):
            analysis.cone_offset(rest_grid, "born", 2)

    def test_refined_argmax_parabola(self):
        x = np.linspace(-1, 1, 21)
        assert analysis.refined_argmax(x, -(x - 0.033) ** 2) == pytest.approx(0.033, abs=1e-12)

    def test_refined_argmax_edge(self):
        with pytest.raises(NotApplicableError):
            analysis.refined_argmax(np.arange(3.0), np.arange(3.0))


class TestDivergence:
    def test_large_k_small(self):
        g = build_grid(PacketSpec(k0=10.0), X, [0.0], PROXIES)
        assert analysis.proxy_divergence(g, 0) <= 5e-3

    def test_rest_is_large(self, rest_grid):
        assert analysis.proxy_divergence(rest_grid, 1) > 0.3

    def test_identical_channels(self, rest_grid):
        g = DensityGrid(X, [0.0], {"a": rest_grid.slice("born", 1)[None], "b": rest_grid.slice(
            "born", 1)[None].copy()})
        assert analysis.proxy_divergence(g, 0, ("a", "b")) == 0.0

    def test_missing_channel(self, rest_grid):
        with pytest.raises(UsageError):
            analysis.proxy_divergence(rest_grid, 0, ("born", "nope"))


class TestVelocityAndVariance:
    @pytest.mark.parametrize("mass", [0.0, 0.2])
    def test_at_rest(self, mass):
        g = build_grid(PacketSpec(mass=mass), X, [0.0, 2.0], ("canonical_h_norm",))
        assert abs(analysis.centroid_velocity(g)) < 1e-6

    def test_fast_packet(self):
        spec = PacketSpec(k0=10.0)
        g = build_grid(spec, axis(-8, 20, 0.02), [0.0, 4.0], ("canonical_h_norm",))
        obs = observables(spec)
        assert analysis.centroid_velocity(g) == pytest.approx(obs.momentum_p / obs.energy_E,
                                                              rel=1e-2)

    def test_same_time_rejected(self):
        g = build_grid(PacketSpec(), X, [1.0], ("born",))
        with pytest.raises(UsageError):
            analysis.centroid_velocity(g, "born", (0, 0))

    def test_free_spreading(self):
        m, d = 1.0, 1.0
        times = [0.0, 1.0, 2.0 * m * d * d, 3.0]
        g = free_gaussian_compare(d, m, t=times, channels=("born",))
        var = analysis.variance_growth(g, "born")
        assert var[0] == pytest.approx(d * d, rel=1e-10)
        assert var[2] == pytest.approx(2 * d * d, rel=1e-4)
        assert all(b >= a for a, b in zip(var, var[1:]))


class TestReport:
    def test_checks_and_json(self):
        r = AnalysisReport(spec={"k0": 0.0})
        r.check_close("b", 1.0, 1.0 + 1e-9, 1e-8)
        r.check_bound("a", 0.5, 1.0)
        assert r.passed
        r.check_close("c", 2.0, 1.0, 0.1, relative=True)
        assert not r.passed
        names = [c["name"] for c in json.loads(r.to_json())["checks"]]
        assert names == ["a", "b", "c"]
