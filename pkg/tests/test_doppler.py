import numpy as np
import pytest

from lambda4wm import (DopplerConfig, averaged_susceptibilities, kinematics,
                       residual_two_photon_shift, sigma_v, susceptibilities,
                       velocity_shifts)


@pytest.fixture
def kin_03(fig2_params):
    return kinematics(fig2_params, 0.0, np.deg2rad(0.3))


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            DopplerConfig(nodes=4)
        with pytest.raises(ValueError):
            DopplerConfig(vmax_sigmas=2)
        with pytest.raises(ValueError):
            DopplerConfig(method="simpson")


class TestVelocityShifts:
    def test_at_rest(self, fig2_params, kin_03):
        d1, d2, dd = velocity_shifts(0.0, kin_03, fig2_params.gamma)
        assert d1 == d2 == dd == 0.0

    def test_collinear_two_photon_suppression(self, fig2_params):
        kin = kinematics(fig2_params, 0.0, 0.0)
        d1, _, dd = velocity_shifts(100.0, kin, fig2_params.gamma)
        assert abs(dd) / abs(d1) == pytest.approx(8.05e-6, rel=1e-2)

    def test_one_photon_scale(self, fig2_params, kin_03):
        # k0 v / gamma ~ 0.21 gamma per m/s at 795 nm
        d1, _, _ = velocity_shifts(1.0, kin_03, fig2_params.gamma)
        assert d1 == pytest.approx(-0.2096, abs=2e-4)

    def test_pair_residual_at_degree_angle(self, fig2_params):
        kin = kinematics(fig2_params, 0.0, np.deg2rad(1.0))
        shift = residual_two_photon_shift(kin, 240.0, fig2_params.gamma)
        assert shift == pytest.approx(1.756, abs=0.01)
        assert 1.0 < shift < 4.0  # reaches the gain-peak width scale


class TestAveraging:
    def test_cold_limit_reduces_to_bare(self, fig2_params, kin_03):
        # residual deviation scales with T (second order in the velocity
        # spread); 1 mK collapses everywhere but within ~1 gamma of the sharp
        # absorption peak, where its curvature leaves a few-1e-5 remnant and
        # another factor ~1e3 in T is needed
        mk = fig2_params.with_updates(temperature=1e-3)
        bare = susceptibilities(mk, 0.0).as_array()
        avg = averaged_susceptibilities(mk, 0.0, kin_03).as_array()
        assert np.max(np.abs(avg - bare) / np.abs(bare)) < 1e-6

        uk = fig2_params.with_updates(temperature=1e-6)
        band = np.array([-10.0, -5.0, -3.0])
        bare = susceptibilities(uk, band).as_array()
        avg = averaged_susceptibilities(uk, band, kin_03).as_array()
        assert np.max(np.abs(avg - bare) / np.abs(bare)) < 1e-6

    def test_disabled_returns_bare(self, fig2_params, kin_03):
        cfg = DopplerConfig(enabled=False)
        bare = susceptibilities(fig2_params, -5.0).as_array()
        avg = averaged_susceptibilities(fig2_params, -5.0, kin_03, cfg).as_array()
        np.testing.assert_array_equal(avg, bare)

    def test_node_doubling_converged(self, fig2_params, kin_03):
        delta = np.array([-5.0, -3.0])
        a32 = averaged_susceptibilities(fig2_params, delta, kin_03,
                                        DopplerConfig(nodes=32)).as_array()
        a64 = averaged_susceptibilities(fig2_params, delta, kin_03,
                                        DopplerConfig(nodes=64)).as_array()
        assert np.max(np.abs(a64 - a32) / np.abs(a64)) < 1e-6

    def test_hermite_rule_in_benign_regime(self, fig2_params, kin_03):
        # at the bare two-photon resonance the resonant velocity class lies
        # far out in the thermal tail and the fixed rule is adequate; near
        # the gain band it under-resolves the class sweep (why the adaptive
        # rule is the default)
        gh = averaged_susceptibilities(fig2_params, 0.0, kin_03,
                                       DopplerConfig(method="hermite", nodes=64))
        ad = averaged_susceptibilities(fig2_params, 0.0, kin_03, DopplerConfig())
        assert np.max(np.abs(gh.as_array() - ad.as_array())
                      / np.abs(ad.as_array())) < 1e-6

    def test_averaging_linear_in_density(self, fig2_params, kin_03):
        # the response is proportional to N point by point in velocity, so
        # averaging commutes with the density scale
        one = averaged_susceptibilities(fig2_params.with_updates(density=1e18),
                                        -5.0, kin_03).as_array()
        two = averaged_susceptibilities(fig2_params.with_updates(density=2e18),
                                        -5.0, kin_03).as_array()
        np.testing.assert_allclose(two, 2.0 * one, rtol=1e-9)

    def test_absorption_stays_nonnegative(self, fig2_params, kin_03):
        # convex combination of nonnegative per-class absorption
        delta = np.linspace(-15, 5, 11)
        avg = averaged_susceptibilities(fig2_params, delta, kin_03)
        assert np.all(np.imag(avg.chi_pp) > -1e-15)

    def test_broadened_one_photon_dip_scale(self, fig2_params):
        # Doppler averaging carves a gain suppression dip around the broadened
        # one-photon line whose width is set by k0 sigma_v (~40 gamma here),
        # i.e. an order of magnitude wider than the bare Raman feature
        sv = sigma_v(fig2_params)
        width = 7903377.745 * sv / fig2_params.gamma
        assert 30 < width < 60
