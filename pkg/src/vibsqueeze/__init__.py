"""Steady-state squeezing of a driven two-level emitter dressed by acoustic phonons.

The package combines a variational polaron treatment of the phonon bath with
a Born-Markov master equation for the emitter and derives the optical
observables (powers, quadrature squeezing, Wigner function) and the
phase-estimation figure of merit of the emitted light.
"""
__version__ = "0.1.0"

from .atomic import atomic_steady, generic_bloch_minimum, thermal_bloch  # noqa: E402
from .core import (BlochVector, DensityOperator2, PhononParams, SystemParams, bloch_from_density,  # noqa: E402
                   density_from_bloch, energy_to_angular_frequency, angular_frequency_to_energy, rabi_from_s)
from .correlations import CorrelationContext  # noqa: E402
from .errors import (ConfigError, ConvergenceError, DegenerateLiouvillianError, InvalidStateError,  # noqa: E402
                     PositivityError, QuadratureError, StepBudgetError, VibSqueezeError)
from .master import assemble_liouvillian, propagate_to_steady_state, steady_state  # noqa: E402
from .metrology import InterferometerInput, figure_of_merit, sv_optimal  # noqa: E402
from .observables import ObservableSet, observables, thermal_prediction, wigner  # noqa: E402
from .spectral import QuadratureSettings, half_fourier, integrate_frequency  # noqa: E402
from .sweep import SweepConfig, parse_config, parse_config_dict, run_point, run_sweep  # noqa: E402
from .variational import VariationalSolution, solve_variational  # noqa: E402

__all__ = [
    "__version__",
    "atomic_steady", "generic_bloch_minimum", "thermal_bloch",
    "BlochVector", "DensityOperator2", "PhononParams", "SystemParams", "bloch_from_density",
    "density_from_bloch", "energy_to_angular_frequency", "angular_frequency_to_energy", "rabi_from_s",
    "CorrelationContext",
    "ConfigError", "ConvergenceError", "DegenerateLiouvillianError", "InvalidStateError", "PositivityError",
    "QuadratureError", "StepBudgetError", "VibSqueezeError",
    "assemble_liouvillian", "propagate_to_steady_state", "steady_state",
    "InterferometerInput", "figure_of_merit", "sv_optimal",
    "ObservableSet", "observables", "thermal_prediction", "wigner",
    "QuadratureSettings", "half_fourier", "integrate_frequency",
    "SweepConfig", "parse_config", "parse_config_dict", "run_point", "run_sweep",
    "VariationalSolution", "solve_variational",
]
