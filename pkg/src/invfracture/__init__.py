"""Bifurcation and fracture of a one-dimensional gradient bar in inverse variables.

The bar is described by its inverse stretch ``H = 1/F`` on the deformed
configuration. ``constitutive`` builds energies and their Shield
inverses, ``linearization`` finds bifurcation points of the homogeneous
state, ``branch`` computes the first bifurcating branch, the fracture
point and broken profiles by quadrature, and ``discrete`` is an
independent finite-difference minimiser used as an oracle.
"""

from .branch import (BranchPoint, BranchSweep, Chord, Profile, branch_point, broken_profile,
                     chord, fracture_point, g_integrals, lambda_sigma, phase_critical_points,
                     profile_from_quadrature, solve_H2, surface_energy, sweep_branch,
                     tilted_potential, trivial_branch)
from .config import RunConfig, load_config
from .constitutive import (ConstitutiveModel, ValidationReport, build_model, find_kappa, find_M,
                           shield_invert, validate_hypotheses)
from .discrete import (GridField, MinimizeResult, StabilityReport, el_residual, energy, gradient,
                       higher_mode_instability_direction, minimize, minimize_multistart,
                       minimize_sequenced, project, second_variation_spectrum, second_variation_value,
                       stress_estimate, vi_residual)
from .estimators import BranchSolver, DirectMinimizer, ProfileTransformer
from .exceptions import (ConfigError, DegenerateChordError, DomainError, HypothesisViolationError,
                         InadmissibleChordError, ModelDefinitionError, NoBranchPointError,
                         NoCriticalPointsError, NumericalFailureError, RootNotFoundError,
                         SolverError)
from .figures import reproduce_figure
from .linearization import (BifurcationPoint, bifurcation_points, characteristic_residual,
                            eigenfunction, first_bifurcation, trivial_stability)

__version__ = "0.1.0"

__all__ = [
    "BifurcationPoint", "BranchPoint", "BranchSolver", "BranchSweep", "Chord", "ConfigError",
    "ConstitutiveModel", "DegenerateChordError", "DirectMinimizer", "DomainError", "GridField",
    "HypothesisViolationError", "InadmissibleChordError", "MinimizeResult",
    "ModelDefinitionError", "NoBranchPointError", "NoCriticalPointsError",
    "NumericalFailureError", "Profile", "ProfileTransformer", "RootNotFoundError", "RunConfig",
    "SolverError", "StabilityReport", "ValidationReport", "bifurcation_points", "branch_point",
    "broken_profile", "build_model", "characteristic_residual", "chord", "eigenfunction",
    "el_residual", "energy", "find_M", "find_kappa", "first_bifurcation", "fracture_point",
    "g_integrals", "gradient", "higher_mode_instability_direction", "lambda_sigma",
    "load_config", "minimize", "minimize_multistart", "minimize_sequenced",
    "phase_critical_points", "profile_from_quadrature", "project", "reproduce_figure",
    "second_variation_spectrum", "second_variation_value", "shield_invert", "solve_H2",
    "stress_estimate", "surface_energy", "sweep_branch", "tilted_potential", "trivial_branch",
    "trivial_stability", "validate_hypotheses", "vi_residual",
]
