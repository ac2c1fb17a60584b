import numpy as np
import pytest

from lambda4wm import (ConvergenceError, SeedNonlinearityError,
                       complex_decay_rates, evolve_to_steady_state,
                       extract_susceptibilities, population_differences,
                       steady_state_nullspace, susceptibilities)
from lambda4wm.steadystate import (DensityMatrixState, _initial_state,
                                   _reduced_system, _to_matrix, _to_vector,
                                   equations_of_motion, liouvillian)
from scipy.linalg import expm


def random_hermitian(rng):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    return a + a.conj().T


class TestEquationsOfMotion:
    def test_trace_conserved_by_generator(self, fig2_params, rng):
        for _ in range(20):
            ds = equations_of_motion(random_hermitian(rng), fig2_params, -5.0,
                                     rabi_p=0.3, rabi_c=0.1)
            assert abs(np.trace(ds)) < 1e-12

    def test_hermiticity_consistent(self, fig2_params, rng):
        for _ in range(20):
            ds = equations_of_motion(random_hermitian(rng), fig2_params, 2.0,
                                     rabi_p=0.2, rabi_c=0.4)
            assert np.max(np.abs(ds - ds.conj().T)) < 1e-12

    def test_trace_and_hermiticity_along_trajectory(self, fig2_params):
        # march the trace-reduced propagator (the one the solver uses) over a
        # ladder of steps and check the reconstructed matrix at every time
        L = liouvillian(fig2_params, -5.0, 1e-4, 0.0)
        A, b = _reduced_system(L)
        x = _to_vector(_initial_state("ground1"))[1:]
        dt = 1e-3
        for _ in range(25):
            P = expm(A * dt)
            x = P @ x + np.linalg.solve(A, (P - np.eye(15)) @ b)
            sigma = _to_matrix(np.concatenate([[1.0 - x[0] - x[1] - x[2]], x]))
            assert np.max(np.abs(sigma - sigma.conj().T)) == 0.0
            assert abs(np.trace(sigma).real - 1.0) < 1e-10
            dt *= 2.0


class TestSteadyState:
    def test_pump_only_populations_match_closed_forms(self, fig2_params):
        st = evolve_to_steady_state(fig2_params, -5.0)
        xi = complex_decay_rates(-5.0, fig2_params.delta1, fig2_params.delta2,
                                 fig2_params.gamma_c)
        pop = population_differences(fig2_params.omega_rabi, xi)
        diag = np.diag(st.sigma).real
        assert diag[0] - diag[2] == pytest.approx(pop.s11_33, abs=1e-8)
        assert diag[1] - diag[2] == pytest.approx(pop.s22_33, abs=1e-8)
        assert diag[2] == pytest.approx(diag[3], abs=1e-10)  # equal excited pops

    def test_residual_target_met(self, fig2_params):
        st = evolve_to_steady_state(fig2_params, -5.0, rabi_p=1e-4)
        assert st.residual < 1e-12
        assert abs(np.trace(st.sigma).real - 1.0) < 1e-12

    def test_positive_semidefinite(self, fig2_params):
        st = evolve_to_steady_state(fig2_params, -5.0, rabi_p=1e-4, rabi_c=5e-5)
        assert np.min(np.linalg.eigvalsh(st.sigma)) > -1e-9

    def test_initial_condition_independent(self, fig2_params):
        a = evolve_to_steady_state(fig2_params, 1.0, rabi_p=1e-4, init="ground1")
        b = evolve_to_steady_state(fig2_params, 1.0, rabi_p=1e-4, init="mixed")
        assert np.max(np.abs(a.sigma - b.sigma)) < 1e-9

    def test_nullspace_cross_check(self, fig2_params):
        a = evolve_to_steady_state(fig2_params, -5.0, rabi_p=1e-4)
        b = steady_state_nullspace(fig2_params, -5.0, rabi_p=1e-4)
        assert np.max(np.abs(a.sigma - b.sigma)) < 1e-10

    def test_nonconvergence_reports_residual(self, fig2_params):
        with pytest.raises(ConvergenceError, match="residual"):
            evolve_to_steady_state(fig2_params, -5.0, max_doublings=2)

    def test_state_validation_rejects_bad_matrices(self):
        good = np.diag([0.5, 0.5, 0.0, 0.0]).astype(complex)
        DensityMatrixState(good).validate()
        bad = good.copy()
        bad[0, 1] = 0.3          # not hermitian
        with pytest.raises(ValueError, match="hermitian"):
            DensityMatrixState(bad).validate()
        with pytest.raises(ValueError, match="trace"):
            DensityMatrixState(1.5 * good).validate()
        neg = np.diag([1.2, -0.2, 0.0, 0.0]).astype(complex)
        with pytest.raises(ValueError):
            DensityMatrixState(neg).validate()


class TestLinearResponse:
    def test_matches_closed_forms_at_reference_point(self, fig2_params):
        got = extract_susceptibilities(fig2_params, -5.0).as_array()
        want = susceptibilities(fig2_params, -5.0).as_array()
        assert np.max(np.abs(got - want) / np.abs(want)) < 1e-6

    def test_seed_halving_linearity(self, fig2_params):
        a = extract_susceptibilities(fig2_params, -5.0, seed_scale=2e-6).as_array()
        b = extract_susceptibilities(fig2_params, -5.0, seed_scale=1e-6).as_array()
        assert np.max(np.abs(a - b) / np.abs(a)) < 1e-6

    def test_linearity_check_passes_at_default_seed(self, fig2_params):
        extract_susceptibilities(fig2_params, -5.0, check_linearity=True)

    def test_oversized_seed_rejected(self, fig2_params):
        with pytest.raises(ValueError, match="seed_scale"):
            extract_susceptibilities(fig2_params, -5.0, seed_scale=0.1)

    def test_nonlinearity_detection(self, fig2_params):
        # just inside the allowed seed range the quadratic bias is measurable
        with pytest.raises(SeedNonlinearityError):
            extract_susceptibilities(fig2_params, -5.0, seed_scale=1e-3,
                                     check_linearity=True, linearity_tol=1e-8)

    def test_no_mixing_without_pump(self, fig2_params):
        weak_pump = fig2_params.with_updates(omega_rabi=1e-3)
        chi = extract_susceptibilities(weak_pump, -5.0, seed_scale=1e-3)
        assert abs(chi.chi_pc) < 1e-9
        assert abs(chi.chi_cp) < 1e-9
