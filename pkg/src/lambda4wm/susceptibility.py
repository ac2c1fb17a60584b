"""Double-lambda susceptibilities, to all orders in the pump field.

Closed forms for the steady-state linear response of the four-level
double-lambda system: two direct susceptibilities chi_pp, chi_cc and two
cross (mixing) susceptibilities chi_pc, chi_cp, plus the pump index of
refraction produced by the ground-state populations.

Level labels: |1>, |2> ground (|2> above |1> by the hyperfine splitting),
|3>, |4> excited. The pump drives 1-3 (detuning delta1) and 2-4 (delta2),
the probe drives 2-3, the conjugate drives 1-4. All rates in gamma = 1
units; ``delta`` may be a scalar or an ndarray (results broadcast).

The common prefactor N d^2/(eps0 hbar gamma) is applied identically to all
four susceptibilities (equal dipoles on both legs). Note chi_cp is *not*
forced to equal chi_pc*: both are evaluated from their own closed forms and
``cross_coupling_asymmetry`` reports the actual deviation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import ModelParams

GAMMA = 1.0  # excited-state decay rate in internal units


@dataclass(frozen=True)
class XiSet:
    """Complex decay rates of the six coherences (gamma = 1 units)."""

    xi43: complex
    xi42: complex
    xi41: complex
    xi32: complex
    xi31: complex
    xi21: complex


@dataclass(frozen=True)
class PopulationDifferences:
    """Steady-state population differences of the pump-dressed atom."""

    s11_33: float
    s11_44: float
    s22_33: float
    s22_44: float


@dataclass(frozen=True)
class SusceptibilitySet:
    """The four complex susceptibilities at one (delta, velocity) point."""

    chi_pp: complex
    chi_cc: complex
    chi_pc: complex
    chi_cp: complex

    def as_array(self) -> np.ndarray:
        return np.asarray([self.chi_pp, self.chi_cc, self.chi_pc, self.chi_cp])


def complex_decay_rates(delta, delta1, delta2, gamma_c) -> XiSet:
    """Complex decay rates xi_nm = i * detuning - damping, gamma = 1 units."""
    return XiSet(
        xi43=1j * (delta2 - delta1) - GAMMA,
        xi42=1j * (delta2 - delta) - GAMMA / 2,
        xi41=1j * delta2 - GAMMA / 2,
        xi32=1j * (delta1 - delta) - GAMMA / 2,
        xi31=1j * delta1 - GAMMA / 2,
        xi21=1j * delta - gamma_c,
    )


def population_differences(omega_rabi, xi: XiSet) -> PopulationDifferences:
    """Pump-only steady-state population differences.

    s11_33 = |xi31|^2 / (|Omega|^2 + |xi31|^2 + |xi42|^2) and companions;
    the two excited-state populations are equal in steady state, hence
    s11_33 == s11_44 and s22_33 == s22_44.
    """
    if np.any(np.asarray(omega_rabi) < 0):
        raise ValueError("omega_rabi must be non-negative")
    den = np.abs(omega_rabi) ** 2 + np.abs(xi.xi31) ** 2 + np.abs(xi.xi42) ** 2
    s1 = np.abs(xi.xi31) ** 2 / den
    s2 = np.abs(xi.xi42) ** 2 / den
    return PopulationDifferences(s11_33=s1, s11_44=s1, s22_33=s2, s22_44=s2)


def mixing_denominator(omega_rabi, xi: XiSet):
    """Shared resonance denominator D; its near-zeros locate the mixing resonance."""
    q = np.abs(omega_rabi) ** 2 / 4.0
    return (xi.xi43 + xi.xi21) * (np.conj(xi.xi32) + xi.xi41) \
        + np.conj(xi.xi32) * xi.xi41 * xi.xi43 * xi.xi21 / q


def susceptibilities(params: ModelParams, delta) -> SusceptibilitySet:
    """Evaluate all four susceptibilities at two-photon detuning ``delta``.

    Parameters
    ----------
    params : ModelParams
        Requires ``omega_rabi > 0``: the cross terms and the shared
        denominator carry |Omega|^2 in denominators, so the pump-free limit
        must be taken as Omega -> 0, not Omega = 0.
    delta : float or ndarray
        Two-photon detuning(s) in gamma units.
    """
    om = params.omega_rabi
    if om <= 0:
        raise ValueError(
            "susceptibilities requires omega_rabi > 0; for the pump-free limit "
            "evaluate at a small finite Rabi frequency (e.g. 1e-3) instead"
        )
    delta = np.asarray(delta, dtype=float)
    xi = complex_decay_rates(delta, params.delta1, params.delta2, params.gamma_c)
    pop = population_differences(om, xi)
    pref = params.chi_prefactor
    q = abs(om) ** 2 / 4.0
    x43, x42, x41 = xi.xi43, xi.xi42, xi.xi41
    x32, x31, x21 = xi.xi32, xi.xi31, xi.xi21
    c = np.conj
    D = mixing_denominator(om, xi)

    chi_pp = 1j * pref * c(x41) / c(D) * (
        c(x21) / c(x42) * pop.s22_44
        + c(x43) / c(x31) * pop.s11_33
        - ((c(x21) + c(x43)) / c(x41) + c(x21) * c(x43) / q) * pop.s22_33
    )
    chi_cc = 1j * pref * c(x32) / D * (
        x43 / c(x42) * pop.s22_44
        + x21 / c(x31) * pop.s11_33
        - ((x21 + x43) / c(x32) + x21 * x43 / q) * pop.s11_44
    )
    # om is real here, so om^2/|om|^2 = 1; kept for a complex pump amplitude.
    phase = om**2 / abs(om) ** 2
    chi_pc = 1j * pref * c(x41) * phase / c(D) * (
        c(x21) / x31 * pop.s11_33
        + c(x43) / x42 * pop.s22_44
        + (c(x21) + c(x43)) / c(x41) * pop.s11_44
    )
    chi_cp = 1j * pref * c(x32) * phase / D * (
        x43 / x31 * pop.s11_33
        + x21 / x42 * pop.s22_44
        + (x21 + x43) / c(x32) * pop.s22_33
    )
    if delta.ndim == 0:
        return SusceptibilitySet(complex(chi_pp), complex(chi_cc),
                                 complex(chi_pc), complex(chi_cp))
    return SusceptibilitySet(chi_pp, chi_cc, chi_pc, chi_cp)


def pump_index(populations, detunings, params: ModelParams) -> float:
    """Pump index of refraction from the ground-state populations.

    chi = sum_i -(N_i d^2/eps0 hbar) Delta_i / (Delta_i^2 + gamma^2/4) and
    n0 = 1 + chi/2. ``populations`` are the ground-state fractions (each in
    [0, 1], sum <= 1), ``detunings`` the corresponding pump detunings in
    gamma units.
    """
    populations = np.asarray(populations, dtype=float)
    detunings = np.asarray(detunings, dtype=float)
    if populations.shape != detunings.shape:
        raise ValueError("populations and detunings must have matching shapes")
    if np.any(populations < 0) or np.any(populations > 1) or populations.sum() > 1 + 1e-12:
        raise ValueError("populations must be fractions in [0, 1] with sum <= 1")
    chi = -params.chi_prefactor * np.sum(
        populations * detunings / (detunings**2 + GAMMA**2 / 4.0)
    )
    return 1.0 + chi / 2.0


def cross_coupling_asymmetry(chi: SusceptibilitySet):
    """Relative deviation |chi_cp - chi_pc*| / |chi_pc|.

    The two cross susceptibilities are complex conjugates only approximately;
    this diagnostic quantifies how far from conjugate they actually are.
    """
    return np.abs(chi.chi_cp - np.conj(chi.chi_pc)) / np.abs(chi.chi_pc)
