"""Twin-beam four-wave mixing in a hot double-lambda vapor.

Susceptibilities of the pump-dressed four-level atom, coupled-mode
propagation of the probe/conjugate pair, phase-mismatch and Doppler
physics, gain maps and parameter extraction from measured gains.
"""

__version__ = "0.1.0"

from .doppler import (DopplerConfig, averaged_susceptibilities,
                      residual_two_photon_shift, sigma_v, velocity_shifts)
from .params import (BeamKinematics, ModelParams, ParameterError, build_params,
                     kinematics, serialize_params)
from .propagation import (CouplingSet, FieldPair, NonFiniteFieldError, coupling,
                          integrate_ode, phase_mismatch, solve_closed_form)
from .steadystate import (ConvergenceError, DensityMatrixState,
                          SeedNonlinearityError, evolve_to_steady_state,
                          extract_susceptibilities, steady_state_nullspace)
from .susceptibility import (PopulationDifferences, SusceptibilitySet, XiSet,
                             complex_decay_rates, cross_coupling_asymmetry,
                             mixing_denominator, population_differences,
                             pump_index, susceptibilities)
from .sweepfit import (DataFormatError, FitResult, GainDataset, GainMap,
                       dataset_from_gain_map, fit_model, gain_map,
                       load_gain_data, solve_twin_beam, write_gain_data)

__all__ = [
    "BeamKinematics", "ModelParams", "ParameterError", "build_params",
    "kinematics", "serialize_params",
    "XiSet", "PopulationDifferences", "SusceptibilitySet",
    "complex_decay_rates", "population_differences", "susceptibilities",
    "pump_index", "mixing_denominator", "cross_coupling_asymmetry",
    "CouplingSet", "FieldPair", "NonFiniteFieldError", "phase_mismatch",
    "coupling", "solve_closed_form", "integrate_ode",
    "DensityMatrixState", "ConvergenceError", "SeedNonlinearityError",
    "evolve_to_steady_state", "extract_susceptibilities",
    "steady_state_nullspace",
    "DopplerConfig", "sigma_v", "velocity_shifts",
    "residual_two_photon_shift", "averaged_susceptibilities",
    "GainMap", "GainDataset", "FitResult", "DataFormatError", "gain_map",
    "solve_twin_beam", "load_gain_data", "write_gain_data",
    "dataset_from_gain_map", "fit_model",
    "__version__",
]
