"""
Solvers

Classical soft-margin SVM, its frozen-sigma weighted form and the
variance-adjusted SVM built on both.
"""

from .classical import (
    NonConvergenceError,
    classical_slack,
    dual_objective,
    kkt_residual,
    primal_objective,
    solve_classical,
    solve_fixed_sigma,
)
from .config import ConfigError, SolverConfig
from .models import (
    LagrangianGradient,
    RefineResult,
    StationarityResiduals,
    TrainedModel,
    VarianceIterate,
    Variant,
)
from .refine import gradient_descent_refine
from .variance import (
    explore_fixed_points,
    finite_difference_check,
    lagrangian_gradient,
    lagrangian_value,
    solve_variance,
    stationarity_residuals,
    variance_primal_objective,
    variance_slack,
)

__all__ = [
    "ConfigError",
    "LagrangianGradient",
    "NonConvergenceError",
    "RefineResult",
    "SolverConfig",
    "StationarityResiduals",
    "TrainedModel",
    "VarianceIterate",
    "Variant",
    "classical_slack",
    "dual_objective",
    "explore_fixed_points",
    "finite_difference_check",
    "gradient_descent_refine",
    "kkt_residual",
    "lagrangian_gradient",
    "lagrangian_value",
    "primal_objective",
    "solve_classical",
    "solve_fixed_sigma",
    "solve_variance",
    "stationarity_residuals",
    "variance_primal_objective",
    "variance_slack",
]
