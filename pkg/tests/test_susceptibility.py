import numpy as np
import pytest

from lambda4wm import (complex_decay_rates, cross_coupling_asymmetry,
                       population_differences, pump_index, susceptibilities)


def local_minima(x, y):
    idx = np.nonzero((y[1:-1] < y[:-2]) & (y[1:-1] < y[2:]))[0] + 1
    return x[idx]


class TestComplexDecayRates:
    def test_equal_detunings_give_pure_decay(self):
        xi = complex_decay_rates(0.0, 140.0, 140.0, 0.2)
        assert xi.xi43 == -1.0

    def test_ground_coherence_on_resonance(self):
        xi = complex_decay_rates(0.0, 140.0, 646.0, 0.2)
        assert xi.xi21 == -0.2

    def test_frozen_reference_point(self):
        # independent re-evaluation of the defining formulas
        xi = complex_decay_rates(-5.0, 140.0, 646.0, 0.2)
        assert xi.xi43 == -1.0 + 506.0j
        assert xi.xi42 == -0.5 + 651.0j
        assert xi.xi41 == -0.5 + 646.0j
        assert xi.xi32 == -0.5 + 145.0j
        assert xi.xi31 == -0.5 + 140.0j
        assert xi.xi21 == -0.2 - 5.0j


class TestPopulationDifferences:
    def test_saturation_limit(self):
        xi = complex_decay_rates(0.0, 10.0, 20.0, 0.2)
        pop = population_differences(1e6, xi)
        for value in (pop.s11_33, pop.s11_44, pop.s22_33, pop.s22_44):
            assert value < 1e-9

    def test_pump_free_limit(self):
        xi = complex_decay_rates(3.0, 140.0, 646.0, 0.2)
        pop = population_differences(0.0, xi)
        expected = abs(xi.xi31) ** 2 / (abs(xi.xi31) ** 2 + abs(xi.xi42) ** 2)
        assert pop.s11_33 == pytest.approx(expected, rel=1e-14)

    def test_symmetric_dressing(self):
        # |xi31| == |xi42| when delta2 - delta = delta1
        xi = complex_decay_rates(10.0, 140.0, 150.0, 0.2)
        pop = population_differences(60.0, xi)
        assert pop.s11_33 == pytest.approx(pop.s22_44, rel=1e-14)

    def test_pairwise_identities(self):
        xi = complex_decay_rates(-5.0, 140.0, 646.0, 0.2)
        pop = population_differences(60.0, xi)
        assert pop.s11_33 == pop.s11_44
        assert pop.s22_33 == pop.s22_44
        assert pop.s11_33 + pop.s22_33 <= 1.0


class TestSusceptibilities:
    def test_zero_pump_rejected(self, fig2_params):
        with pytest.raises(ValueError, match="omega_rabi"):
            susceptibilities(fig2_params.with_updates(omega_rabi=0.0), 0.0)

    def test_mixing_vanishes_without_pump(self, fig2_params):
        strong = susceptibilities(fig2_params, -5.0)
        weak = susceptibilities(fig2_params.with_updates(omega_rabi=1e-3), -5.0)
        assert abs(weak.chi_pc) < 1e-6 * abs(strong.chi_pc)

    def test_light_shifted_resonance_location(self, fig2_params):
        delta = np.linspace(-20, 20, 8001)
        chi = susceptibilities(fig2_params, delta)
        peak = delta[np.argmax(np.imag(chi.chi_pp))]
        assert -7.0 <= peak <= -3.0

    def test_secondary_extremum_near_one_photon_resonance(self, fig2_params):
        delta = np.linspace(100, 200, 4001)
        im = np.imag(susceptibilities(fig2_params, delta).chi_pp)
        interior = np.nonzero((im[1:-1] > im[:-2]) & (im[1:-1] > im[2:]))[0] + 1
        assert interior.size >= 1
        assert np.min(np.abs(delta[interior] - fig2_params.delta1)) <= 15.0

    def test_probe_absorptive_across_band(self, fig2_params):
        delta = np.linspace(-50, 50, 20001)
        assert np.all(np.imag(susceptibilities(fig2_params, delta).chi_pp) > 0)

    def test_conjugate_response_small_at_peak(self, fig2_params):
        delta = np.linspace(-20, 20, 8001)
        chi = susceptibilities(fig2_params, delta)
        ipk = np.argmax(np.imag(chi.chi_pp))
        assert abs(chi.chi_cc[ipk]) < 0.1 * abs(chi.chi_pp[ipk])

    def test_all_outputs_finite(self, fig2_params, rng):
        for _ in range(200):
            p = fig2_params.with_updates(
                omega_rabi=float(rng.uniform(0.1, 200)),
                delta1=float(rng.uniform(-400, 400)),
                delta2=float(rng.uniform(-900, 900)),
                gamma_c=float(rng.uniform(1e-3, 2.0)),
            )
            chi = susceptibilities(p, float(rng.uniform(-100, 100)))
            assert np.all(np.isfinite(chi.as_array()))

    def test_density_scaling_is_exact(self, fig2_params):
        delta = np.linspace(-10, 10, 21)
        base = susceptibilities(fig2_params, delta).as_array()
        scaled = susceptibilities(fig2_params.with_updates(density=3 * 2.8e18),
                                  delta).as_array()
        np.testing.assert_allclose(scaled, 3 * base, rtol=1e-14)

    def test_transparency_valley_moves_towards_raman_line(self, fig2_params):
        # the absorption minimum on the blue flank approaches delta = 0 as the
        # ground-state decoherence shrinks: +42 gamma at gamma_c = 1 down to
        # +6 gamma at gamma_c = 0.02 (it never reaches the bare resonance)
        delta = np.linspace(-30, 60, 180001)
        locations = []
        for gc in (0.02, 0.2, 1.0):
            im = np.imag(susceptibilities(
                fig2_params.with_updates(gamma_c=gc), delta).chi_pp)
            mins = local_minima(delta, im)
            assert mins.size == 1
            locations.append(mins[0])
        assert locations[0] < 15.0 < locations[2]
        assert locations[0] < locations[1] < locations[2]
        assert locations[0] == pytest.approx(6.2, abs=0.5)

    def test_scalar_and_array_agree(self, fig2_params):
        chi_s = susceptibilities(fig2_params, -5.0)
        chi_a = susceptibilities(fig2_params, np.asarray([-5.0]))
        np.testing.assert_allclose(chi_a.as_array()[:, 0], chi_s.as_array())

    def test_cross_terms_approximately_conjugate(self, fig2_params):
        # the two mixing terms are close to conjugates near the resonance but
        # not identical; exposed as a diagnostic, never forced
        asym = cross_coupling_asymmetry(susceptibilities(fig2_params, -5.0))
        assert 0.0 < asym < 0.05


class TestPumpIndex:
    def test_empty_medium(self, fig2_params):
        assert pump_index([0.0, 0.0], [140.0, 646.0], fig2_params) == 1.0

    def test_far_detuned_limit(self, fig2_params):
        n0 = pump_index([0.5, 0.5], [1e10, 1e10], fig2_params)
        assert abs(n0 - 1.0) < 1e-12

    def test_operating_point_magnitude(self, fig2_params):
        p = fig2_params.with_updates(density=4.0e18)
        n0 = pump_index([0.06, 0.94], [140.0, 646.0], p)
        assert 0.8e-5 < 1.0 - n0 < 3.2e-5  # within a factor 2 of 1.6e-5

    def test_validation(self, fig2_params):
        with pytest.raises(ValueError):
            pump_index([0.7, 0.7], [140.0, 646.0], fig2_params)
        with pytest.raises(ValueError):
            pump_index([0.5, -0.1], [140.0, 646.0], fig2_params)
