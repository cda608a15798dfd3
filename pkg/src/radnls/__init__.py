"""Numerical toolkit for the focusing radial NLS with an attractive
inverse-power potential: spectra, ground states, dichotomy thresholds,
time-dependent diagnostics and mass-critical asymptotics."""

__version__ = "0.1.0"

from .critical import (
    CriticalSweepRecord,
    gn_sharpness_check,
    gradient_divergence_check,
    lambda0,
    rescaled_convergence,
    run_critical_sweep,
    scaling_bounds_check,
    trial_energy,
)
from .dynamics import (
    EvolutionTrace,
    detect_blowup,
    evolve,
    stability_experiment,
    virial_check,
)
from .elliptic import (
    ConstrainedMinResult,
    GroundStateResult,
    find_ground_state_shooting,
    minimize_action,
    minimize_energy_constrained,
    nehari_project,
    pohozaev_residuals,
    shoot_radial_ode,
    solve_free_soliton,
)
from .field import RadialField, h1_distance, radial_decreasing_bound_check, rescale
from .functionals import FunctionalReport, functionals
from .grid import RadialGrid, build_grid
from .kernels import backend_name
from .params import ModelParams
from .spectral import EigenPair, eigenvalue_bound_check, ground_eigenpair
from .thresholds import (
    SetMembership,
    classify,
    find_omega0,
    key_estimate_check,
    monotone_lemma_check,
    second_variation,
)
from .uniqueness import SWCoefficients, check_conditions, sw_G, sw_coefficients

__all__ = [
    "ModelParams",
    "RadialGrid",
    "RadialField",
    "FunctionalReport",
    "EigenPair",
    "GroundStateResult",
    "ConstrainedMinResult",
    "EvolutionTrace",
    "CriticalSweepRecord",
    "SetMembership",
    "SWCoefficients",
    "build_grid",
    "functionals",
    "rescale",
    "h1_distance",
    "radial_decreasing_bound_check",
    "ground_eigenpair",
    "eigenvalue_bound_check",
    "shoot_radial_ode",
    "find_ground_state_shooting",
    "nehari_project",
    "minimize_action",
    "minimize_energy_constrained",
    "solve_free_soliton",
    "pohozaev_residuals",
    "classify",
    "second_variation",
    "find_omega0",
    "key_estimate_check",
    "monotone_lemma_check",
    "evolve",
    "virial_check",
    "detect_blowup",
    "stability_experiment",
    "lambda0",
    "gn_sharpness_check",
    "trial_energy",
    "run_critical_sweep",
    "scaling_bounds_check",
    "rescaled_convergence",
    "gradient_divergence_check",
    "check_conditions",
    "sw_coefficients",
    "sw_G",
    "backend_name",
]
