import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.constants import hbar

from optonoise import (
    CavityParams,
    Coupling,
    DegenerateQuadrature,
    InvalidParameter,
    SingularSusceptibility,
    SqueezeParams,
    estimate_output_coefficients,
    force_psd,
    force_psd_momentum,
    force_psd_position,
    g_opt_momentum,
    g_opt_position,
    output_quadratures,
    output_quadratures_momentum,
    output_quadratures_position,
    single_mode_moments,
    spectrum_from_outputs,
    susceptibilities,
    theta_opt_momentum,
    theta_opt_position,
)

PRESET = CavityParams(m=1e-6, omega_m=100.0, kappa=1e6, gamma=1e-4)


def with_gamma(gamma, p=PRESET):
    return CavityParams(p.m, p.omega_m, p.kappa, gamma)


def rel(a, b):
    return np.max(np.abs(np.asarray(a) - np.asarray(b)) / np.maximum(np.abs(a), np.abs(b)))


class TestParams:
    def test_detuning_rejected(self):
        with pytest.raises(InvalidParameter):
            CavityParams(1.0, 1.0, 1.0, 0.0, delta=0.1)

    def test_strong_damping_warns(self):
        with pytest.warns(UserWarning):
            CavityParams(1.0, 100.0, 1e6, 10.0)

    def test_coupling_conversion(self):
        c = Coupling("position", 1e21).to_momentum(PRESET)
        assert c.kind == "momentum" and c.value == pytest.approx(1e21 / (1e-6 * 1e6))

    @pytest.mark.parametrize("value", [0.0, -1.0, math.inf])
    def test_coupling_positive(self, value):
        with pytest.raises(InvalidParameter):
            Coupling("position", value)


class TestSusceptibilities:
    def test_dc(self):
        s = susceptibilities(PRESET, 0.0)
        assert s.chi_c == pytest.approx(2 / math.sqrt(1e6))
        assert s.phase == pytest.approx(-1.0)
        assert s.chi_m == pytest.approx(1 / (1e-6 * 100.0**2))

    def test_half_linewidth(self):
        s = susceptibilities(PRESET, 5e5)
        assert abs(s.chi_c) ** 2 == pytest.approx(2 / 1e6, rel=1e-12)

    def test_high_frequency(self):
        s = susceptibilities(PRESET, 1e15)
        assert abs(s.chi_c) < 1e-11
        assert s.phase == pytest.approx(1.0, abs=1e-8)

    @given(st.floats(-1e8, 1e8))
    def test_symmetries(self, nu):
        a, b = susceptibilities(PRESET, nu), susceptibilities(PRESET, -nu)
        assert abs(a.phase) == pytest.approx(1.0, abs=1e-12)
        assert b.chi_c == pytest.approx(np.conj(a.chi_c), rel=1e-12)
        assert b.chi_m == pytest.approx(np.conj(a.chi_m), rel=1e-12)

    def test_undamped_resonance_singular(self):
        with pytest.raises(SingularSusceptibility):
            susceptibilities(with_gamma(0.0), 100.0)

    def test_broadcasts(self):
        s = susceptibilities(PRESET, np.ones((3, 2)))
        assert s.chi_m.shape == (3, 2)


class TestOutputs:
    def test_zero_coupling_is_rotation(self):
        out = output_quadratures_position(PRESET, 0.0, 1e3)
        s = susceptibilities(PRESET, 1e3)
        assert out["Y_out", "Y_in"] == s.phase and out["Y_out", "F_in"] == 0
        assert out["X_out", "X_in"] == s.phase and out["Y_out", "X_in"] == 0
        assert output_quadratures_momentum(PRESET, 0.0, 1e3)["Y_out", "F_in"] == 0

    def test_position_closed_form(self):
        g, nu = 3e20, 2e4
        s = susceptibilities(PRESET, nu)
        out = output_quadratures_position(PRESET, g, nu)
        assert out["Y_out", "F_in"] == pytest.approx(g * s.chi_c * s.chi_m, rel=1e-14)
        assert out["Y_out", "X_in"] == pytest.approx(-hbar * g**2 * s.chi_c**2 * s.chi_m, rel=1e-14)

    def test_momentum_free_mass_has_no_backaction(self):
        free = CavityParams(1e-6, 0.0, 1e6, 1e-4)
        out = output_quadratures_momentum(free, 1e27, np.logspace(1, 6, 5))
        assert np.all(out["Y_out", "X_in"] == 0)

    @settings(max_examples=60)
    @given(st.floats(0.0, 7.0), st.floats(17.0, 23.0), st.sampled_from(["position", "momentum"]))
    def test_match_linear_solver(self, log_nu, log_g, kind):
        c = Coupling("position", 10**log_g)
        if kind == "momentum":
            c = c.to_momentum(PRESET)
        nu = 10**log_nu
        closed = output_quadratures(PRESET, c, nu).matrix
        solved = estimate_output_coefficients(PRESET, c, nu).matrix
        mask = np.abs(closed) > 0
        assert np.all(solved[~mask] == 0) or np.max(np.abs(solved[~mask])) < 1e-12
        assert rel(closed[mask], solved[mask]) < 1e-10

    def test_solver_tiny_coupling_is_rotation(self):
        out = estimate_output_coefficients(PRESET, Coupling("position", 1e-30), 1e3)
        s = susceptibilities(PRESET, 1e3)
        assert out["Y_out", "Y_in"] == pytest.approx(s.phase, rel=1e-12)
        assert abs(out["Y_out", "F_in"]) < 1e-30

    def test_solver_momentum_backaction_scales_as_omega_squared(self):
        kappa = 1e6
        omegas = np.array([1e-6, 2e-6, 4e-6]) * kappa
        mags = []
        for w in omegas:
            p = CavityParams(1e-6, w, kappa, 1e-3 * w)
            out = estimate_output_coefficients(p, Coupling("momentum", 1e27), 1e3)
            mags.append(abs(out["Y_out", "X_in"]))
        slope = np.polyfit(np.log(omegas), np.log(mags), 1)[0]
        # chi_m itself shifts by O(omega_m^2 / nu^2)
        assert slope == pytest.approx(2.0, abs=1e-4)


class TestSpectra:
    nu = np.logspace(-1, 9, 200)

    def test_decomposition(self):
        for psd in (force_psd_position, force_psd_momentum):
            sp = psd(PRESET, 1e21, self.nu, 0.3, SqueezeParams(1.0, 0.4))
            assert np.all(np.isfinite(sp.total))
            assert np.all(sp.shot >= 0) and np.all(sp.backaction >= 0)
            np.testing.assert_allclose(sp.total, sp.shot + sp.backaction + sp.cross, rtol=1e-12)

    def test_vacuum_phase_quadrature_has_no_cross(self):
        sp = force_psd_position(PRESET, 1e21, self.nu, 0.0, SqueezeParams())
        assert np.all(sp.cross == 0)

    @pytest.mark.parametrize("kind", ["position", "momentum"])
    @pytest.mark.parametrize("theta", [0.0, 0.7, -1.2])
    def test_generic_route_matches_closed_form(self, kind, theta):
        # includes the sign of the momentum cross term
        c = Coupling("position", 4e20)
        if kind == "momentum":
            c = c.to_momentum(PRESET)
        nu = np.logspace(0, 7, 40)
        sq = SqueezeParams(1.3, 0.6)
        closed = force_psd(PRESET, c, nu, theta, sq)
        generic = spectrum_from_outputs(output_quadratures(PRESET, c, nu), theta, sq)
        solved = spectrum_from_outputs(estimate_output_coefficients(PRESET, c, nu), theta, sq)
        for a in (generic, solved):
            np.testing.assert_allclose(a.shot, closed.shot, rtol=1e-9)
            np.testing.assert_allclose(a.backaction, closed.backaction, rtol=1e-9)
            # closed forms drop the gamma-dependent imaginary part of the cross term
            np.testing.assert_allclose(a.cross, closed.cross, rtol=1e-6, atol=1e-9 * np.max(np.abs(closed.total)))

    def test_thermal_is_separate(self):
        sp = force_psd_position(PRESET, 1e21, 1e3, 0.0, SqueezeParams(), thermal=5.0)
        assert sp.total_with_thermal == pytest.approx(sp.total + 5.0)

    def test_momentum_rejects_dc(self):
        with pytest.raises(InvalidParameter):
            force_psd_momentum(PRESET, 1.0, np.array([0.0, 1.0]), 0.0, SqueezeParams())

    def test_degenerate_quadrature(self):
        with pytest.raises(DegenerateQuadrature):
            force_psd_position(PRESET, 1.0, 1e3, math.pi / 2, SqueezeParams())


class TestOptimalPoints:
    p = with_gamma(1e-4)
    nu = np.logspace(2.5, 7, 60)

    def test_sql_balance(self):
        for g_fn, psd in ((g_opt_position, force_psd_position), (g_opt_momentum, force_psd_momentum)):
            sp = psd(self.p, g_fn(self.p, self.nu, 0.0), self.nu, 0.0, SqueezeParams())
            np.testing.assert_allclose(sp.shot, sp.backaction, rtol=1e-9)

    def test_theta_opt_leaves_shot_noise(self):
        sq = SqueezeParams(2.0, 0.0)
        g = g_opt_position(self.p, self.nu)
        s = susceptibilities(self.p, self.nu)
        m = single_mode_moments(sq)
        sp = force_psd_position(self.p, g, self.nu, theta_opt_position(self.p, g, self.nu), sq)
        expected = (m.yy * 2) / (2 * g**2 * np.abs(s.chi_c) ** 2 * np.abs(s.chi_m) ** 2)
        bound = self.p.gamma * self.nu / np.abs(self.nu**2 - self.p.omega_m**2)
        assert np.all(np.abs(sp.total / expected - 1) <= bound)

    def test_approximate_shot_form(self):
        r = 2.0
        nu = self.nu
        g = g_opt_position(self.p, nu)
        sp = force_psd_position(self.p, g, nu, theta_opt_position(self.p, g, nu), SqueezeParams(r, 0.0))
        approx = math.exp(-2 * r) * self.p.m**2 * (self.p.kappa**2 / 4 + nu**2) * (nu**2 - 100.0**2) ** 2 / (2 * g**2 * self.p.kappa)
        bound = 10 * self.p.gamma * nu / np.abs(nu**2 - 100.0**2)
        assert np.all(np.abs(sp.total / approx - 1) <= bound)

    def test_free_mass_momentum_shot_form(self):
        free = CavityParams(1e-6, 1e-9, 1e6, 1e-15)
        sq = SqueezeParams(1.5, 0.2)
        gp = 1e27
        sp = force_psd_momentum(free, gp, self.nu, theta_opt_momentum(free, gp, self.nu), sq)
        s = susceptibilities(free, self.nu)
        yy = single_mode_moments(sq).yy
        expected = self.nu**2 * yy / (gp**2 * np.abs(s.chi_c) ** 2)
        np.testing.assert_allclose(sp.total, expected, rtol=1e-9)
        np.testing.assert_allclose(sp.backaction, 0.0, atol=1e-12 * sp.total.max())

    @pytest.mark.parametrize("kind", ["position", "momentum"])
    @pytest.mark.parametrize("phi", [-math.pi / 4, 0.0, 0.4])
    def test_squeezing_angle_closed_forms(self, kind, phi):
        p = with_gamma(1e-4)
        nu = np.logspace(3, 7, 50)
        r = 1.5
        sq = SqueezeParams(r, phi)
        if kind == "position":
            sp = force_psd_position(p, g_opt_position(p, nu), nu, 0.0, sq)
            scale = hbar * p.m * (nu**2 - p.omega_m**2)
        else:
            sp = force_psd_momentum(p, g_opt_momentum(p, nu), nu, 0.0, sq)
            scale = hbar * p.m * (p.omega_m**2 / nu**2) * (nu**2 - p.omega_m**2)
        expected = scale * (math.cosh(2 * r) + math.sinh(2 * r) * math.sin(2 * phi))
        np.testing.assert_allclose(sp.total, expected, rtol=1e-6)
