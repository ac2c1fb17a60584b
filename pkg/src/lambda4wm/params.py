"""Physical parameters and beam kinematics for the double-lambda mixing model.

Unit conventions, used everywhere in this package:

* rates, detunings and Rabi frequencies are dimensionless, in units of the
  excited-state decay rate ``gamma`` (which itself is stored in rad/s and
  sets the absolute scale);
* lengths are in meters, densities in m^-3, temperatures in K;
* the two-photon detuning ``delta = omega_0 - omega_p - omega_HF`` is positive
  when the probe is tuned *below* the Raman resonance.

``ModelParams`` and ``BeamKinematics`` are immutable; every other module
accepts only these validated containers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping

from scipy import constants as sc

TWO_PI = 2.0 * math.pi

# Rb-85 D1 defaults; overridable through the config document.
DEFAULT_GAMMA_HZ = 6.0e6                 # natural linewidth, ordinary frequency
DEFAULT_HF_SPLIT_HZ = 3.0357e9           # ground hyperfine splitting
DEFAULT_WAVELENGTH_M = 795e-9
DEFAULT_DIPOLE_CM = 1.47e-29             # mean electric dipole, C*m
DEFAULT_TEMPERATURE_K = 383.15           # 110 C cell
DEFAULT_ATOMIC_MASS_KG = 84.9117897 * sc.atomic_mass

#: config keys accepted with either a ``_gamma`` or ``_hz`` suffix
FREQUENCY_FIELDS = ("omega_rabi", "delta1", "delta2", "gamma_c", "hf_split")

#: plain (non-frequency) config keys and their ModelParams attributes
PLAIN_FIELDS = {
    "density_m3": "density",
    "length_m": "length",
    "wavelength_m": "wavelength",
    "dipole_cm": "dipole",
    "epsilon_pump": "epsilon_pump",
    "temperature_k": "temperature",
    "atomic_mass_kg": "atomic_mass",
}

REQUIRED_KEYS = ("omega_rabi", "delta1", "gamma_c", "density_m3", "length_m")


class ParameterError(ValueError):
    """Invalid or inconsistent physical parameter; carries the field name."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class ModelParams:
    """All physical inputs of the model, rates in units of ``gamma``.

    Attributes
    ----------
    omega_rabi : float
        Resonant pump Rabi frequency (both legs equal), >= 0.
    delta1, delta2 : float
        One-photon detunings of the two lambda legs.
    gamma : float
        Excited-state decay rate in rad/s; the unit of all other rates.
    gamma_c : float
        Ground-state decoherence rate.
    density : float
        Atom number density, m^-3.
    length : float
        Medium length, m.
    hf_split : float
        Ground hyperfine splitting.
    wavelength : float
        Pump vacuum wavelength, m.
    dipole : float
        Reduced dipole matrix element, C*m.
    epsilon_pump : float
        Pump index deviation, n0 = 1 - epsilon_pump.
    temperature : float
        Vapor temperature, K.
    atomic_mass : float
        Atomic mass, kg.
    """

    omega_rabi: float
    delta1: float
    gamma_c: float
    density: float
    length: float
    delta2: float = None  # type: ignore[assignment]  # defaulted in __post_init__
    gamma: float = TWO_PI * DEFAULT_GAMMA_HZ
    hf_split: float = None  # type: ignore[assignment]
    wavelength: float = DEFAULT_WAVELENGTH_M
    dipole: float = DEFAULT_DIPOLE_CM
    epsilon_pump: float = 0.0
    temperature: float = DEFAULT_TEMPERATURE_K
    atomic_mass: float = DEFAULT_ATOMIC_MASS_KG

    def __post_init__(self):
        if self.hf_split is None:
            object.__setattr__(
                self, "hf_split", TWO_PI * DEFAULT_HF_SPLIT_HZ / self.gamma
            )
        if self.delta2 is None:
            object.__setattr__(self, "delta2", self.delta1 + self.hf_split)
        self._validate()

    def _validate(self):
        positive = ("gamma", "hf_split", "wavelength", "temperature",
                    "atomic_mass", "dipole")
        nonnegative = ("omega_rabi", "density", "length", "gamma_c")
        for name in positive:
            v = getattr(self, name)
            if not _finite(v) or v <= 0:
                raise ParameterError(name, f"must be a positive number, got {v!r}")
        for name in nonnegative:
            v = getattr(self, name)
            if not _finite(v) or v < 0:
                raise ParameterError(name, f"must be a non-negative number, got {v!r}")
        for name in ("delta1", "delta2", "epsilon_pump"):
            if not _finite(getattr(self, name)):
                raise ParameterError(name, f"must be finite, got {getattr(self, name)!r}")
        if abs(self.epsilon_pump) >= 1.0:
            raise ParameterError("epsilon_pump", "pump index deviation must satisfy |eps| < 1")

    @property
    def chi_prefactor(self) -> float:
        """Common susceptibility scale N d^2 / (eps0 hbar gamma), dimensionless."""
        return self.density * self.dipole**2 / (sc.epsilon_0 * sc.hbar * self.gamma)

    @property
    def pump_index(self) -> float:
        """n0 = 1 - epsilon_pump."""
        return 1.0 - self.epsilon_pump

    def with_updates(self, **changes) -> "ModelParams":
        """Return a validated copy with the given fields replaced."""
        return replace(self, **changes)


@dataclass(frozen=True)
class BeamKinematics:
    """Vacuum wavenumbers/frequencies of pump, probe and conjugate plus geometry.

    ``omegap + omegac == 2 * omega0`` holds exactly: the conjugate frequency is
    always computed from energy conservation, never set independently.
    """

    k0: float
    kp: float
    kc: float
    omega0: float
    omegap: float
    omegac: float
    theta: float

    def __post_init__(self):
        if not (0.0 <= self.theta < math.pi / 2):
            raise ParameterError("theta", f"angle must lie in [0, pi/2), got {self.theta!r}")
        for name in ("k0", "kp", "kc"):
            if getattr(self, name) <= 0:
                raise ParameterError(name, "wavenumber must be positive")


def _finite(x) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x)


def kinematics(params: ModelParams, delta: float, theta: float = 0.0) -> BeamKinematics:
    """Beam frequencies and vacuum wavenumbers at two-photon detuning ``delta``.

    omega_p = omega_0 - (omega_HF + delta), omega_c = 2 omega_0 - omega_p;
    ``theta`` is the pump-probe angle in radians.
    """
    omega0 = TWO_PI * sc.c / params.wavelength
    omegap = omega0 - (params.hf_split + delta) * params.gamma
    omegac = 2.0 * omega0 - omegap
    if omegap <= 0:
        raise ParameterError("delta", "probe frequency driven non-positive")
    return BeamKinematics(
        k0=omega0 / sc.c,
        kp=omegap / sc.c,
        kc=omegac / sc.c,
        omega0=omega0,
        omegap=omegap,
        omegac=omegac,
        theta=float(theta),
    )


# ---------------------------------------------------------------------------
# config document handling
# ---------------------------------------------------------------------------

def _frequency_value(doc: Mapping, base: str, gamma_rad: float):
    """Read ``base`` from the document, accepting _gamma or _hz (not both)."""
    key_g, key_hz = f"{base}_gamma", f"{base}_hz"
    has_g, has_hz = key_g in doc, key_hz in doc
    if has_g and has_hz:
        raise ParameterError(base, f"both {key_g} and {key_hz} given; supply exactly one")
    if has_g:
        return _as_number(doc[key_g], key_g)
    if has_hz:
        return _as_number(doc[key_hz], key_hz) * TWO_PI / gamma_rad
    return None


def _as_number(value, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParameterError(key, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ParameterError(key, f"expected a finite number, got {value!r}")
    return float(value)


def build_params(doc: Mapping) -> ModelParams:
    """Validate a flat key-value document and return normalized ``ModelParams``.

    Frequencies are accepted in units of gamma (suffix ``_gamma``) or as
    ordinary frequencies in Hz (suffix ``_hz``); supplying both for one field
    is an error. ``gamma`` itself is set through ``gamma_hz``. ``delta2``
    defaults to ``delta1 + hf_split``.
    """
    known = {f"{b}{s}" for b in FREQUENCY_FIELDS for s in ("_gamma", "_hz")}
    known |= set(PLAIN_FIELDS) | {"gamma_hz"}
    unknown = set(doc) - known
    if unknown:
        raise ParameterError(sorted(unknown)[0], "unknown parameter key")

    gamma_rad = TWO_PI * _as_number(doc.get("gamma_hz", DEFAULT_GAMMA_HZ), "gamma_hz")
    fields = {"gamma": gamma_rad}
    for base in FREQUENCY_FIELDS:
        value = _frequency_value(doc, base, gamma_rad)
        if value is not None:
            fields[base] = value
    for key, attr in PLAIN_FIELDS.items():
        if key in doc:
            fields[attr] = _as_number(doc[key], key)

    for base in REQUIRED_KEYS:
        attr = PLAIN_FIELDS.get(base, base)
        if attr not in fields:
            raise ParameterError(base, "required field missing")
    return ModelParams(**fields)


def serialize_params(params: ModelParams) -> dict:
    """Flat document representation; ``build_params`` round-trips it exactly."""
    doc = {
        "omega_rabi_gamma": params.omega_rabi,
        "delta1_gamma": params.delta1,
        "delta2_gamma": params.delta2,
        "gamma_c_gamma": params.gamma_c,
        "hf_split_gamma": params.hf_split,
        "gamma_hz": params.gamma / TWO_PI,
        "density_m3": params.density,
        "length_m": params.length,
        "wavelength_m": params.wavelength,
        "dipole_cm": params.dipole,
        "epsilon_pump": params.epsilon_pump,
        "temperature_k": params.temperature,
        "atomic_mass_kg": params.atomic_mass,
    }
    return doc
