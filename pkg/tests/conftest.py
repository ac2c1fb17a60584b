import numpy as np
import pytest

from lambda4wm import build_params


@pytest.fixture
def fig2_params():
    """Pump-dressed susceptibility benchmark point (strong pump, cold model)."""
    return build_params({
        "omega_rabi_gamma": 60.0,
        "delta1_gamma": 140.0,
        "gamma_c_gamma": 0.2,
        "density_m3": 2.8e18,
        "length_m": 12e-3,
    })


@pytest.fixture
def fig4_params():
    """Gain-map benchmark point: gamma_c = 0.5, N = 3e12 cm^-3, L = 12.5 mm."""
    return build_params({
        "omega_rabi_gamma": 60.0,
        "delta1_gamma": 140.0,
        "gamma_c_gamma": 0.5,
        "density_m3": 3.0e18,
        "length_m": 12.5e-3,
    })


@pytest.fixture
def fitted_params():
    """The extracted experimental operating point (includes the pump index)."""
    return build_params({
        "omega_rabi_gamma": 60.0,
        "delta1_gamma": 140.0,
        "gamma_c_gamma": 0.2,
        "density_m3": 2.8e18,
        "length_m": 12e-3,
        "epsilon_pump": 6.5e-6,
    })


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
