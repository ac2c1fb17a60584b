"""Brute-force verification engine: density-matrix steady state by integration.

Evolves the ten independent components of the 4x4 rotating-frame density
matrix of the double-lambda atom (pump on 1-3 and 2-4, probe on 2-3,
conjugate on 1-4, evaluated at r = 0 so all spatial phase factors are unity)
to its fixed point, and extracts the four susceptibilities by linear
response with weak probe/conjugate seeds. Entirely independent of the
closed forms in :mod:`lambda4wm.susceptibility`, which it exists to check.

Rates: both excited states decay at gamma with equal branching to the two
ground states; optical coherences damp at gamma/2, the excited-excited
coherence at gamma, the ground coherence at gamma_c. (The 4-1 coherence
damps at gamma/2 like the other optical coherences, matching xi41; a decay
of gamma would be inconsistent with the closed forms.)

Not a performance path: never used inside gain maps or fits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .params import ModelParams
from .susceptibility import SusceptibilitySet

GAMMA = 1.0

# state layout: 4 populations then Re/Im pairs of the six upper coherences
_OFF = ((1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (3, 2))


class ConvergenceError(RuntimeError):
    """Steady-state iteration did not reach the residual target."""

    def __init__(self, residual: float, tol: float):
        super().__init__(
            f"steady state not reached: residual {residual:.3e} > tolerance {tol:.3e}"
        )
        self.residual = residual


class SeedNonlinearityError(RuntimeError):
    """Linear-response seed is large enough to bias the extracted response."""


@dataclass(frozen=True)
class DensityMatrixState:
    """Rotating-frame density matrix at (approximate) steady state."""

    sigma: np.ndarray
    residual: float = 0.0

    def validate(self, psd_tol: float = 1e-9) -> "DensityMatrixState":
        sig = self.sigma
        if sig.shape != (4, 4):
            raise ValueError("sigma must be 4x4")
        if np.max(np.abs(sig - sig.conj().T)) > 1e-10:
            raise ValueError("sigma is not hermitian")
        if abs(np.trace(sig).real - 1.0) > 1e-10:
            raise ValueError("trace(sigma) != 1")
        diag = np.diag(sig).real
        if np.any(diag < -psd_tol) or np.any(diag > 1 + psd_tol):
            raise ValueError("populations outside [0, 1]")
        if np.min(np.linalg.eigvalsh(sig)) < -psd_tol:
            raise ValueError("sigma not positive semidefinite within tolerance")
        return self


def hamiltonian(params: ModelParams, delta, rabi_p, rabi_c) -> np.ndarray:
    """Rotating-frame Hamiltonian (gamma = 1 units), basis |1>, |2>, |3>, |4>."""
    om = params.omega_rabi
    H = np.zeros((4, 4), dtype=complex)
    H[1, 1] = -delta
    H[2, 2] = -params.delta1
    H[3, 3] = -params.delta2
    H[2, 0] = -om / 2.0          # pump, 1-3
    H[3, 1] = -om / 2.0          # pump, 2-4
    H[2, 1] = -rabi_p / 2.0      # probe, 2-3
    H[3, 0] = -rabi_c / 2.0      # conjugate, 1-4
    return H + H.conj().T - np.diag(np.diag(H))


def equations_of_motion(sigma: np.ndarray, params: ModelParams, delta,
                        rabi_p=0.0, rabi_c=0.0) -> np.ndarray:
    """d(sigma)/dt: coherent part -i[H, sigma] plus decay and dephasing."""
    H = hamiltonian(params, delta, rabi_p, rabi_c)
    ds = -1j * (H @ sigma - sigma @ H)
    feed = 0.5 * GAMMA * (sigma[2, 2] + sigma[3, 3]).real
    ds[0, 0] += feed
    ds[1, 1] += feed
    ds[2, 2] -= GAMMA * sigma[2, 2]
    ds[3, 3] -= GAMMA * sigma[3, 3]
    damping = {(2, 0): GAMMA / 2, (2, 1): GAMMA / 2, (3, 0): GAMMA / 2,
               (3, 1): GAMMA / 2, (3, 2): GAMMA, (1, 0): params.gamma_c}
    for (m, n), g in damping.items():
        ds[m, n] -= g * sigma[m, n]
        ds[n, m] -= g * sigma[n, m]
    return ds


def _to_vector(sigma: np.ndarray) -> np.ndarray:
    v = np.empty(16)
    v[:4] = np.diag(sigma).real
    for k, (m, n) in enumerate(_OFF):
        v[4 + 2 * k] = sigma[m, n].real
        v[5 + 2 * k] = sigma[m, n].imag
    return v

def _to_matrix(v: np.ndarray) -> np.ndarray:
    sigma = np.zeros((4, 4), dtype=complex)
    sigma[np.arange(4), np.arange(4)] = v[:4]
    for k, (m, n) in enumerate(_OFF):
        sigma[m, n] = v[4 + 2 * k] + 1j * v[5 + 2 * k]
        sigma[n, m] = sigma[m, n].conjugate()
    return sigma


def liouvillian(params: ModelParams, delta, rabi_p=0.0, rabi_c=0.0) -> np.ndarray:
    """Generator of the motion as a real 16x16 matrix over the hermitian dof."""
    L = np.empty((16, 16))
    for j in range(16):
        e = np.zeros(16)
        e[j] = 1.0
        L[:, j] = _to_vector(
            equations_of_motion(_to_matrix(e), params, delta, rabi_p, rabi_c)
        )
    return L


def _initial_state(init) -> np.ndarray:
    if isinstance(init, np.ndarray):
        return init.astype(complex)
    sigma = np.zeros((4, 4), dtype=complex)
    if init == "ground1":
        sigma[0, 0] = 1.0
    elif init == "mixed":
        sigma[np.arange(4), np.arange(4)] = 0.25
    else:
        raise ValueError(f"unknown initial state {init!r}")
    return sigma


def _reduced_system(L: np.ndarray):
    """Eliminate sigma_11 through the exact trace constraint.

    The full motion y' = L y conserves the trace, so the generator has a
    neutral mode on which any numerical propagator slowly leaks roundoff.
    Substituting sigma_11 = 1 - sigma_22 - sigma_33 - sigma_44 removes that
    mode exactly: the remaining 15 components obey x' = A x + b with A
    strictly stable, and the reconstructed matrix has unit trace by
    construction at every step.
    """
    b = L[1:, 0].copy()
    ones = np.zeros(15)
    ones[:3] = 1.0
    A = L[1:, 1:] - np.outer(b, ones)
    return A, b


def evolve_to_steady_state(params: ModelParams, delta, rabi_p=0.0, rabi_c=0.0,
                           *, residual_tol: float = 1e-12, init="ground1",
                           max_doublings: int = 60) -> DensityMatrixState:
    """Evolve the equations of motion until max |d(sigma)/dt| < ``residual_tol``.

    The motion is linear with a constant generator, so every time step is
    taken with the exact propagator of the trace-reduced system
    (x -> exp(A dt) x + A^-1 (exp(A dt) - 1) b); the step is doubled, up to
    a cap of a few multiples of the slowest relaxation time, until the
    residual meets the target. The doubling ladder covers the full
    stiffness range, from coherences oscillating at the largest detuning
    down to optical-pumping rates far below gamma_c, in a few dozen steps.
    A conventional error-controlled stepper is deliberately not used:
    certifying the residual target needs the state to near machine
    precision, which per-step error control cannot deliver at useful cost.

    Raises ``ConvergenceError`` with the residual norm if the target is not
    met after ``max_doublings`` steps. Trace and hermiticity hold exactly
    at every step by the parametrization; the returned state is validated.
    """
    L = liouvillian(params, delta, rabi_p, rabi_c)
    A, b = _reduced_system(L)
    decay = -np.real(np.linalg.eigvals(A))
    dt_cap = 50.0 / np.min(decay)
    y = _to_vector(_initial_state(init))
    x = y[1:]
    residual = np.max(np.abs(L @ y))
    dt = 0.1 / max(1.0, abs(params.delta1), abs(params.delta2), params.omega_rabi)
    for _ in range(max_doublings):
        if residual < residual_tol:
            break
        P = expm(A * min(dt, dt_cap))
        x = P @ x + np.linalg.solve(A, (P - np.eye(15)) @ b)
        y = np.concatenate([[1.0 - x[0] - x[1] - x[2]], x])
        residual = np.max(np.abs(L @ y))
        dt *= 2.0
    else:
        raise ConvergenceError(residual, residual_tol)
    return DensityMatrixState(sigma=_to_matrix(y), residual=float(residual)).validate()


def steady_state_nullspace(params: ModelParams, delta, rabi_p=0.0, rabi_c=0.0
                           ) -> DensityMatrixState:
    """Direct fixed point: solve L v = 0 with unit trace (cross-check only)."""
    L = liouvillian(params, delta, rabi_p, rabi_c)
    trace_row = np.zeros(16)
    trace_row[:4] = 1.0
    A = np.vstack([L, trace_row])
    b = np.zeros(17)
    b[16] = 1.0
    v, *_ = np.linalg.lstsq(A, b, rcond=None)
    return DensityMatrixState(sigma=_to_matrix(v),
                              residual=float(np.max(np.abs(L @ v)))).validate()


def extract_susceptibilities(params: ModelParams, delta, *,
                             seed_scale: float = 2e-6,
                             check_linearity: bool = False,
                             linearity_tol: float = 1e-4,
                             **solver_kw) -> SusceptibilitySet:
    """Susceptibilities from two linear-response experiments on the fixed point.

    A weak real seed (``seed_scale`` times the pump Rabi frequency, well
    inside the linear regime) is applied on the probe leg and then on the
    conjugate leg; the probe-frequency and conjugate-frequency coherences
    sigma_32 and sigma_41 of the two steady states give the four
    susceptibilities through chi = 2 (N d^2/eps0 hbar gamma) sigma / seed.

    With ``check_linearity`` the extraction is repeated at half seed and a
    relative shift above ``linearity_tol`` raises ``SeedNonlinearityError``.
    """
    if not 0 < seed_scale <= 1e-3:
        raise ValueError("seed_scale must lie in (0, 1e-3] for linear response")
    chi = _extract_once(params, delta, seed_scale * params.omega_rabi, **solver_kw)
    if check_linearity:
        chi_half = _extract_once(params, delta,
                                 0.5 * seed_scale * params.omega_rabi, **solver_kw)
        shift = np.max(np.abs(chi.as_array() - chi_half.as_array())
                       / np.abs(chi.as_array()))
        if shift > linearity_tol:
            raise SeedNonlinearityError(
                f"halving the seed moved the extracted response by {shift:.2e} "
                f"(> {linearity_tol:.1e}); reduce seed_scale"
            )
    return chi


def _extract_once(params, delta, seed, **solver_kw) -> SusceptibilitySet:
    pref = 2.0 * params.chi_prefactor / seed
    probe_run = evolve_to_steady_state(params, delta, rabi_p=seed, **solver_kw).sigma
    conj_run = evolve_to_steady_state(params, delta, rabi_c=seed, **solver_kw).sigma
    return SusceptibilitySet(
        chi_pp=pref * probe_run[2, 1],
        chi_cp=pref * probe_run[3, 0],
        chi_pc=pref * conj_run[2, 1],
        chi_cc=pref * conj_run[3, 0],
    )
