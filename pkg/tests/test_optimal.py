import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optonoise import (
    CavityParams,
    InvalidParameter,
    SqueezeParams,
    StrategyConfig,
    ToySingleParams,
    angle_vs_frequency,
    angle_vs_power,
    broadband_sweep,
    force_psd_position,
    g_opt_momentum,
    g_opt_position,
    log_grid,
    narrowband_sweep,
    noise_metric_single,
    optimal_zeta,
    optimal_zeta_single,
    optimal_zeta_two,
    run_strategy,
    theta_opt_momentum,
    theta_opt_position,
    theta_opt_toy_single,
    theta_opt_toy_two,
    zeta_sql,
)
from optonoise.optimal import numeric_argmin, numeric_g_opt, numeric_theta_opt

PRESET = CavityParams(m=1e-6, omega_m=100.0, kappa=1e6, gamma=1e-4)


class TestToyOptima:
    @given(st.floats(0.05, 20.0))
    def test_sql_floor(self, beta):
        opt = optimal_zeta_single(beta)
        assert opt.noise == pytest.approx(beta / 4, rel=1e-9)
        assert opt.zeta**2 == pytest.approx(1 / beta, rel=1e-9)

    @given(st.floats(0.05, 20.0), st.floats(0.0, 2.5))
    def test_squeezing_moves_optimum(self, beta, r):
        opt = optimal_zeta_single(beta, SqueezeParams(r, 0.0))
        assert opt.noise == pytest.approx(beta / 4, rel=1e-9)
        assert opt.zeta**2 == pytest.approx(math.exp(-2 * r) / beta, rel=1e-9)

    @given(st.floats(0.05, 20.0), st.floats(0.0, 2.5))
    def test_cross_correlator_benefit(self, beta, r):
        n = noise_metric_single(ToySingleParams(zeta_sql(beta), beta), SqueezeParams(r, math.pi / 4))
        assert n == pytest.approx(math.exp(-2 * r) * beta / 4, rel=1e-9)

    def test_two_mode_halves_power(self):
        single, two = optimal_zeta_single(1.0), optimal_zeta_two(1.0)
        assert two.noise == pytest.approx(single.noise, rel=1e-9)
        assert two.zeta**2 == pytest.approx(single.zeta**2 / 2, rel=1e-9)

    def test_asymmetry_raises_floor(self):
        sq = SqueezeParams(2.0, math.pi / 4)
        assert optimal_zeta_two(1.0, sq, asymmetry=0.9).noise > optimal_zeta_two(1.0, sq).noise

    def test_golden_section_agrees(self):
        f = lambda z: noise_metric_single(ToySingleParams(z, 1.0), SqueezeParams())
        z = numeric_argmin(f, 0.2, 3.0)
        assert z == pytest.approx(optimal_zeta_single(1.0).zeta, abs=1e-6)
        assert f(z) == pytest.approx(0.25, abs=1e-9)

    def test_no_interior_minimum(self):
        with pytest.raises(InvalidParameter):
            optimal_zeta(lambda z: 1.0 / z**2)

    def test_toy_angles(self):
        assert theta_opt_toy_single(1.0, 1.0) == pytest.approx(-math.pi / 4)
        assert theta_opt_toy_two(1.0, 0.5) == pytest.approx(-math.pi / 4)


class TestCavityAngles:
    def test_resonance_gives_phase_quadrature(self):
        assert theta_opt_position(PRESET, 1e21, 100.0) == 0.0
        assert theta_opt_momentum(PRESET, 1e27, 100.0) == 0.0

    def test_high_power_low_frequency_is_amplitude(self):
        assert abs(theta_opt_position(PRESET, 1e24, 1.0)) == pytest.approx(math.pi / 2, abs=1e-3)

    def test_free_mass_momentum_is_phase(self):
        free = CavityParams(1e-6, 0.0, 1e6, 1e-4)
        assert np.all(theta_opt_momentum(free, 1e27, log_grid(1, 1e7)) == 0)

    @pytest.mark.parametrize("nu", [1e3, 1e4, 1e5])
    def test_numeric_argmin_position(self, nu):
        assert numeric_theta_opt(PRESET, "position", 1e21, nu) == pytest.approx(
            float(theta_opt_position(PRESET, 1e21, nu)), abs=1e-6
        )

    def test_momentum_angles_small(self):
        a = angle_vs_frequency(PRESET, 1e21, log_grid(1e3, 1e7))
        assert np.all(np.abs(a.theta_momentum) < 1e-2 * np.abs(a.theta_position).min() + 1e-5)

    @settings(max_examples=15, deadline=None)
    @given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(1.0, 6.5), st.sampled_from(["position", "momentum"]))
    def test_closed_form_matches_numeric(self, dm, dw, dk, log_nu, kind):
        p = CavityParams(1e-6 * 10**dm, 100.0 * 10**dw, 1e6 * 10**dk, 1e-6 * 100.0 * 10**dw)
        nu = 10**log_nu
        if abs(nu - p.omega_m) < 0.05 * p.omega_m:
            nu *= 1.2
        g = float(g_opt_position(p, nu) if kind == "position" else g_opt_momentum(p, nu))
        closed = float(theta_opt_position(p, g, nu) if kind == "position" else theta_opt_momentum(p, g, nu))
        assert numeric_theta_opt(p, kind, g, nu) == pytest.approx(closed, abs=1e-6)
        assert numeric_g_opt(p, kind, nu) == pytest.approx(g, rel=1e-6)


class TestCouplings:
    nu = log_grid(1, 1e7, 50)

    def test_squeezing_scales_power(self):
        np.testing.assert_allclose(g_opt_position(PRESET, self.nu, 2.0), math.exp(-2) * g_opt_position(PRESET, self.nu), rtol=1e-14)
        np.testing.assert_allclose(g_opt_momentum(PRESET, self.nu, 2.0), math.exp(-2) * g_opt_momentum(PRESET, self.nu), rtol=1e-14)

    def test_momentum_ratio(self):
        np.testing.assert_allclose(g_opt_momentum(PRESET, self.nu), g_opt_position(PRESET, self.nu) / (1e-6 * 100.0), rtol=1e-14)

    def test_dc_value(self):
        expected = math.sqrt(1e-6 * 100.0**2) / (math.sqrt(1.0545718176461565e-34) * 2 / math.sqrt(1e6))
        assert float(g_opt_position(PRESET, 0.0)) == pytest.approx(expected, rel=1e-9)

    def test_free_mass_momentum_rejected(self):
        with pytest.raises(InvalidParameter):
            g_opt_momentum(CavityParams(1e-6, 0.0, 1e6, 1e-4), 1e3)

    @pytest.mark.parametrize("kind", ["position", "momentum"])
    @pytest.mark.parametrize("nu", [0.0 + 1e-3, 50.0, 1e4, 3e6])
    def test_numeric_argmin(self, kind, nu):
        closed = float(g_opt_position(PRESET, nu) if kind == "position" else g_opt_momentum(PRESET, nu))
        assert numeric_g_opt(PRESET, kind, nu) == pytest.approx(closed, rel=1e-6)


class TestStrategy:
    def test_config_validation(self):
        with pytest.raises(InvalidParameter):
            StrategyConfig("broadband", PRESET, log_grid(1e3, 1e7))
        with pytest.raises(InvalidParameter):
            StrategyConfig("broadband", PRESET, log_grid(1e3, 1e7), target_nu=1e8)
        with pytest.raises(InvalidParameter):
            StrategyConfig("narrowband", PRESET, np.array([3.0, 2.0, 5.0]))
        with pytest.raises(InvalidParameter):
            StrategyConfig("sideways", PRESET, log_grid(1, 10))

    def test_broadband_balance_at_target(self):
        res = broadband_sweep(StrategyConfig("broadband", PRESET, log_grid(1e3, 1e7), target_nu=1e6))
        assert len(res.nu) == 400
        g = res.curve("position", 0.0).coupling[0]
        sp = force_psd_position(PRESET, g, 1e6, 0.0, SqueezeParams())
        assert sp.shot == pytest.approx(sp.backaction, rel=1e-6)
        assert res.curve("momentum", 0.0).coupling[0] == pytest.approx(g / (PRESET.m * PRESET.kappa))

    def test_broadband_single_crossover(self):
        res = broadband_sweep(StrategyConfig("broadband", PRESET, log_grid(1e3, 1e7), target_nu=1e6))
        sp = res.curve("position", 0.0).spectrum
        dominated = sp.shot > sp.backaction
        assert not dominated[0] and dominated[-1]
        assert np.count_nonzero(np.diff(dominated.astype(int))) == 1

    @pytest.mark.parametrize("kind", ["position", "momentum"])
    def test_broadband_squeezing_gain_threshold(self, kind):
        # with phi = theta = 0 the squeezed total is e^-2r S + e^2r B
        res = broadband_sweep(StrategyConfig("broadband", PRESET, log_grid(1e3, 1e7), target_nu=1e6))
        base, sq = res.curve(kind, 0.0), res.curve(kind, 2.0)
        improved = sq.total < base.total
        np.testing.assert_array_equal(improved, base.spectrum.shot > math.exp(4) * base.spectrum.backaction)

    def test_narrowband_monotone_in_r(self):
        nu = log_grid(1, 1e7)
        nu = nu[np.abs(nu - 100.0) > 10 * PRESET.gamma]
        totals = []
        for r in (0.5, 1.0, 2.0):
            res = narrowband_sweep(StrategyConfig("narrowband", PRESET, nu, sq=SqueezeParams(r, 0.0)))
            totals.append([res.curve(k, r).total for k in ("position", "momentum")])
        base = narrowband_sweep(StrategyConfig("narrowband", PRESET, nu, sq=SqueezeParams(0.0)))
        prev = [base.curve(k, 0.0).total for k in ("position", "momentum")]
        for cur in totals:
            for a, b in zip(prev, cur):
                assert np.all(b <= a)
            prev = cur

    def test_narrowband_angles_used(self):
        res = run_strategy(StrategyConfig("narrowband", PRESET, log_grid(1e3, 1e5, 20)))
        c = res.curve("position", 0.0)
        np.testing.assert_allclose(c.theta, theta_opt_position(PRESET, c.coupling, res.nu), rtol=1e-14)

    def test_power_sweep_monotone(self):
        a = angle_vs_power(PRESET, 1e21, 1e4, np.logspace(-2, 2, 30))
        assert np.all(np.diff(np.abs(a.theta_position)) > 0)
        with pytest.raises(InvalidParameter):
            angle_vs_power(PRESET, 1e21, 1e4, [0.0, 1.0])
