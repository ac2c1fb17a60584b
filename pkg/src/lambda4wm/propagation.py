"""Coupled-mode propagation of the twin probe/conjugate envelopes.

The slowly varying envelopes obey, with E_c^* the conjugated conjugate
envelope and Dk_z the axial phase mismatch,

    dE_p /dz = a_pp E_p  + a_pc exp(+i Dk_z z) E_c^*
    dE_c^*/dz = -a_cc E_c^* - a_cp exp(-i Dk_z z) E_p

where a_pj = i k_p chi_pj / 2 and a_cj = i k_c chi_cj^* / 2 (j = p, c); the
minus signs arise because conjugating the conjugate-field equation negates
its coefficients. With an input probe seed of 1 and no input conjugate the
closed-form solution is

    E_p   = exp(da L) [cosh(xi L) + (a/xi) sinh(xi L)]
    E_c^* = exp(da L) (a_cp/xi) sinh(xi L)

with da = (a_pp - a_cc + i Dk_z)/2, a = (a_pp + a_cc - i Dk_z)/2 and
xi = sqrt(a^2 - a_pc a_cp), the conjugate envelope being quoted in the
mismatch-free frame (a pure phase; intensity gains are unaffected).
``integrate_ode`` solves the same pair with a fixed-step RK4 scheme and is
the independent oracle for ``solve_closed_form``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import BeamKinematics
from .susceptibility import SusceptibilitySet

#: switch to the series limit of cosh/sinh(xi L)/xi below this |xi L|
SERIES_THRESHOLD = 1e-4

#: above this growth exponent only the log-gains are materialized
OVERFLOW_EXPONENT = 300.0


class NonFiniteFieldError(ArithmeticError):
    """Envelope became non-finite during integration; carries the z position."""

    def __init__(self, z: float):
        super().__init__(f"non-finite field envelope at z = {z:.6e} m")
        self.z = z


@dataclass(frozen=True)
class CouplingSet:
    """Coupled-mode coefficients [1/m] plus the phase mismatch [rad/m].

    ``delta_a``, ``a_mean`` and ``xi_prop`` are derived on access, so their
    defining relations hold by construction.
    """

    a_pp: complex
    a_pc: complex
    a_cp: complex
    a_cc: complex
    dkz: float

    @property
    def delta_a(self) -> complex:
        return (self.a_pp - self.a_cc + 1j * self.dkz) / 2.0

    @property
    def a_mean(self) -> complex:
        return (self.a_pp + self.a_cc - 1j * self.dkz) / 2.0

    @property
    def xi_prop(self) -> complex:
        return np.sqrt(self.a_mean**2 - self.a_pc * self.a_cp)


@dataclass(frozen=True)
class FieldPair:
    """Output envelopes relative to a unit probe seed, plus intensity gains.

    ``log_gp`` / ``log_gc`` are always finite-safe; the complex envelopes are
    materialized only while exp() stays inside double range (otherwise inf).
    """

    e_p: complex
    e_c_conj: complex
    log_gp: float
    log_gc: float

    @property
    def g_p(self):
        with np.errstate(over="ignore"):
            return np.exp(self.log_gp)

    @property
    def g_c(self):
        with np.errstate(over="ignore"):
            return np.exp(self.log_gc)


def phase_mismatch(kin: BeamKinematics, n0: float = 1.0) -> float:
    """Axial phase mismatch Dk_z = 2 n0 k0 - (kp + kc) cos(theta)."""
    return 2.0 * n0 * kin.k0 - (kin.kp + kin.kc) * np.cos(kin.theta)


def coupling(chi: SusceptibilitySet, kin: BeamKinematics, n0: float = 1.0) -> CouplingSet:
    """Coupled-mode coefficients from the susceptibilities and the geometry.

    The conjugate row takes the conjugated susceptibilities,
    a_cj = i k_c chi_cj^* / 2.
    """
    return CouplingSet(
        a_pp=1j * kin.kp * chi.chi_pp / 2.0,
        a_pc=1j * kin.kp * chi.chi_pc / 2.0,
        a_cp=1j * kin.kc * np.conj(chi.chi_cp) / 2.0,
        a_cc=1j * kin.kc * np.conj(chi.chi_cc) / 2.0,
        dkz=phase_mismatch(kin, n0),
    )


def closed_form_fields(a_pp, a_pc, a_cp, a_cc, dkz, length):
    """Vectorized closed-form solution; returns (e_p, e_c_conj, log_gp, log_gc).

    All coefficient arguments broadcast. The hyperbolic functions are
    evaluated through exp(-2 xi L) with Re(xi L) >= 0 so that arbitrarily
    large gain exponents reduce to one well-scaled exponential; xi -> 0 is
    handled by a short Taylor series (both branches are even in xi).
    """
    a_pp, a_pc, a_cp, a_cc, dkz, length = np.broadcast_arrays(
        *(np.asarray(x, dtype=complex) for x in (a_pp, a_pc, a_cp, a_cc, dkz)),
        np.asarray(length, dtype=float),
    )
    L = length.real
    da = (a_pp - a_cc + 1j * dkz) / 2.0
    am = (a_pp + a_cc - 1j * dkz) / 2.0
    xi = np.sqrt(am**2 - a_pc * a_cp)
    xi = np.where(np.real(xi * L) < 0, -xi, xi)
    u = xi * L
    s = da * L

    small = np.abs(u) < SERIES_THRESHOLD
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        # growing-exponential factorization, |exp(-2u)| <= 1
        ratio = np.where(small, 0.0, am / np.where(small, 1.0, xi))
        damp = np.exp(-2.0 * u)
        bracket_p = (1.0 + ratio) / 2.0 + (1.0 - ratio) / 2.0 * damp
        bracket_c = a_cp / np.where(small, 1.0, xi) * (1.0 - damp) / 2.0
        expo = s + u

        # series branch: cosh -> 1 + u^2/2 + u^4/24, sinh(u)/u -> 1 + u^2/6 + u^4/120
        u2 = u * u
        sinc = 1.0 + u2 / 6.0 + u2 * u2 / 120.0
        bracket_p_s = 1.0 + u2 / 2.0 + u2 * u2 / 24.0 + am * L * sinc
        bracket_c_s = a_cp * L * sinc
        expo = np.where(small, s, expo)
        bracket_p = np.where(small, bracket_p_s, bracket_p)
        bracket_c = np.where(small, bracket_c_s, bracket_c)

        log_gp = 2.0 * (np.real(expo) + _log_abs(bracket_p))
        log_gc = 2.0 * (np.real(expo) + _log_abs(bracket_c))
        safe = np.real(expo) <= OVERFLOW_EXPONENT
        grow = np.exp(np.where(safe, expo, 0.0))
        e_p = np.where(safe, grow * bracket_p, np.inf + 0j)
        e_c = np.where(safe, grow * bracket_c, np.inf + 0j)
    return e_p, e_c, log_gp, log_gc


def _log_abs(z):
    with np.errstate(divide="ignore"):
        return np.log(np.abs(z))


def solve_closed_form(coupling: CouplingSet, length: float) -> FieldPair:
    """Closed-form output fields after propagation over ``length`` >= 0."""
    if length < 0:
        raise ValueError("length must be non-negative")
    e_p, e_c, log_gp, log_gc = closed_form_fields(
        coupling.a_pp, coupling.a_pc, coupling.a_cp, coupling.a_cc,
        coupling.dkz, length,
    )
    return FieldPair(complex(e_p), complex(e_c), float(log_gp), float(log_gc))


def integrate_ode(coupling: CouplingSet, length: float, steps: int = 4000) -> FieldPair:
    """Propagate (E_p, E_c^*) = (1, 0) by fixed-step RK4; oracle for the closed form.

    Integrates the explicitly z-dependent pair with the conjugate-row signs
    negated (see module docstring); the output conjugate envelope is rephased
    by -exp(+i Dk_z L) into the mismatch-free frame of the closed form so the
    two solvers return identical complex pairs.
    """
    if steps < 2:
        raise ValueError("steps must be >= 2")
    if length < 0:
        raise ValueError("length must be non-negative")
    a_pp, a_pc = coupling.a_pp, coupling.a_pc
    a_cp, a_cc = coupling.a_cp, coupling.a_cc
    dkz = coupling.dkz
    h = length / steps

    def deriv(z, ep, ec):
        ph = np.exp(1j * dkz * z)
        return (a_pp * ep + a_pc * ph * ec,
                -a_cc * ec - a_cp * ep / ph)

    ep, ec = 1.0 + 0j, 0.0 + 0j
    with np.errstate(over="ignore", invalid="ignore"):  # blow-up raises below
        for n in range(steps):
            z = n * h
            k1p, k1c = deriv(z, ep, ec)
            k2p, k2c = deriv(z + h / 2, ep + h / 2 * k1p, ec + h / 2 * k1c)
            k3p, k3c = deriv(z + h / 2, ep + h / 2 * k2p, ec + h / 2 * k2c)
            k4p, k4c = deriv(z + h, ep + h * k3p, ec + h * k3c)
            ep = ep + h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
            ec = ec + h / 6 * (k1c + 2 * k2c + 2 * k3c + k4c)
            if not (np.isfinite(ep) and np.isfinite(ec)):
                raise NonFiniteFieldError((n + 1) * h)

    ec_out = -np.exp(1j * dkz * length) * ec
    with np.errstate(divide="ignore"):
        return FieldPair(
            e_p=complex(ep),
            e_c_conj=complex(ec_out),
            log_gp=float(2.0 * np.log(abs(ep))) if ep != 0 else -np.inf,
            log_gc=float(2.0 * np.log(abs(ec_out))) if ec_out != 0 else -np.inf,
        )
