"""
Solver Records

Immutable results produced by the classical and variance solvers.

Fields follow the primal/dual vocabulary of soft-margin SVMs:
alphas are the margin-constraint multipliers, mus the slack-sign
multipliers and slacks the hinge amounts at the returned hyperplane.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from varsvm.core.models import GradientMode, Hyperplane, SigmaMode


class Variant(str, Enum):
    CLASSICAL = "classical"
    VARIANCE = "variance"


@dataclass(frozen=True)
class TrainedModel:
    """
    A trained hyperplane and the multipliers certifying it.

    Fields:
    - hyperplane: (beta, beta0)
    - alphas: (N,) multipliers in [0, cost]
    - slacks: (N,) hinge amounts (classical or sigma-scaled)
    - mus: (N,) cost - alphas
    - objective: primal objective at hyperplane
    - kkt_residual: largest KKT / stationarity violation
    - iterations: pair updates (classical) or outer iterations (variance)
    - variant: classical or variance
    - converged: False when a budget ran out first
    - sigmas: (sigma_neg, sigma_pos) used in the constraints; None for classical
    - cost: C the model was trained with
    - sigma_mode: sigma normalization the model was trained with
    """

    hyperplane: Hyperplane
    alphas: np.ndarray
    slacks: np.ndarray
    mus: np.ndarray
    objective: float
    kkt_residual: float
    iterations: int
    variant: Variant
    converged: bool = True
    sigmas: Optional[Tuple[float, float]] = None
    cost: float = 1.0
    sigma_mode: SigmaMode = SigmaMode.NORMALIZED

    def point_sigmas(self, labels: np.ndarray) -> np.ndarray:
        """sigma_{y_i} per point; ones for the classical variant."""
        if self.sigmas is None:
            return np.ones(len(labels))
        sigma_neg, sigma_pos = self.sigmas
        return np.where(np.asarray(labels) > 0, sigma_pos, sigma_neg).astype(float)


@dataclass(frozen=True)
class VarianceIterate:
    """
    One step of the alternating scheme.

    Fields:
    - hyperplane: solution of the frozen-sigma subproblem
    - sigma_neg, sigma_pos: sigmas frozen for that subproblem
    - inner_model: the frozen-sigma TrainedModel
    - direction_change: 1 - |cos| between this and the previous normal
    - objective: variance primal objective at hyperplane (sigmas recomputed)
    """

    hyperplane: Hyperplane
    sigma_neg: float
    sigma_pos: float
    inner_model: TrainedModel
    direction_change: float
    objective: float


@dataclass(frozen=True)
class StationarityResiduals:
    """
    Residuals of the variance-adjusted stationarity conditions.

    Fields:
    - equality: |sum_i alpha_i y_i / sigma_{y_i}|
    - box: max_i |alpha_i + mu_i - C|
    - gradient: ||d L_P / d beta|| (exact gradient)
    """

    equality: float
    box: float
    gradient: float

    @property
    def worst(self) -> float:
        return max(self.equality, self.box, self.gradient)


@dataclass(frozen=True)
class LagrangianGradient:
    """
    Fields:
    - vector: gradient of the Lagrangian with respect to beta
    - mode: which sigma-gradient expression was used
    - at_sigma_floor: True when a class sigma sat on the floor, where the
      statistic is not differentiable and its gradient is taken as zero
    """

    vector: np.ndarray
    mode: GradientMode
    at_sigma_floor: bool = False


@dataclass(frozen=True)
class RefineResult:
    """
    Outcome of smoothed primal descent.

    Fields:
    - hyperplane: best hyperplane seen (never worse than the start)
    - objective: variance primal objective at hyperplane
    - start_objective: variance primal objective at the start
    - path: smoothed objective after each accepted step (start first)
    - steps: accepted steps
    - stalled: True when the line search failed before convergence
    """

    hyperplane: Hyperplane
    objective: float
    start_objective: float
    path: Tuple[float, ...] = field(default_factory=tuple)
    steps: int = 0
    stalled: bool = False
