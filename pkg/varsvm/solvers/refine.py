"""
Smoothed primal descent on the variance-adjusted objective.

An independent path to the solution: the hinge max(0, z) is replaced by

    phi(z) = 0              z <= 0
             z^2 / (2 tau)  0 < z < tau
             z - tau / 2    z >= tau

and (beta, beta0) follows steepest descent with Armijo backtracking. The
beta-gradient is the Lagrangian gradient with alpha_i = C phi'(z_i).
"""

from __future__ import annotations

import logging
from typing import List, Optional, Tuple

import numpy as np

from varsvm.core.models import Dataset, GradientMode, Hyperplane

from .config import SolverConfig
from .models import RefineResult
from .variance import constraint_gradients, current_sigmas, variance_primal_objective

logger = logging.getLogger(__name__)

ARMIJO = 1e-4
MAX_HALVINGS = 60
MAX_STEPS = 500


def _smoothed(z: np.ndarray, tau: float) -> Tuple[np.ndarray, np.ndarray]:
    """phi(z) and phi'(z)."""
    value = np.where(z <= 0.0, 0.0, np.where(z < tau, z * z / (2.0 * tau), z - 0.5 * tau))
    slope = np.clip(z / tau, 0.0, 1.0)
    return value, slope


def _objective(data: Dataset, beta: np.ndarray, beta0: float, config: SolverConfig):
    sigma_neg, sigma_pos, _ = current_sigmas(data, beta, config.sigma_mode)
    scale = np.where(data.labels > 0, sigma_pos, sigma_neg)
    z = 1.0 - data.labels * (data.points @ beta + beta0) / scale
    value, slope = _smoothed(z, config.smoothing)
    return float(0.5 * beta @ beta + config.cost * value.sum()), slope, scale


def _gradient(data, beta, beta0, slope, scale, config: SolverConfig):
    h = Hyperplane(beta=beta, beta0=beta0)
    rows, _ = constraint_gradients(data, h, GradientMode.EXACT, config.sigma_mode)
    alphas = config.cost * slope
    grad_beta = beta - rows.T @ alphas
    grad_beta0 = -float(np.sum(alphas * data.labels / scale))
    return grad_beta, grad_beta0


def gradient_descent_refine(
    data: Dataset,
    start: Hyperplane,
    config: Optional[SolverConfig] = None,
    max_steps: int = MAX_STEPS,
) -> RefineResult:
    """
    Descend the smoothed objective from `start`.

    Stops when the gradient norm falls to kkt_tol * max(1, ||beta||), after
    max_steps accepted steps, or when backtracking fails (stalled). The
    returned hyperplane is the best by the true objective among the start
    and every accepted iterate.
    """
    config = config or SolverConfig()
    start.require_valid()
    data.require_both_classes()

    beta = start.beta.copy()
    beta0 = start.beta0
    start_objective = variance_primal_objective(data, start, config.cost, config.sigma_mode)
    best, best_objective = start, start_objective

    value, slope, scale = _objective(data, beta, beta0, config)
    path: List[float] = [value]
    step_size = 1.0
    steps = 0
    stalled = False

    while steps < max_steps:
        grad_beta, grad_beta0 = _gradient(data, beta, beta0, slope, scale, config)
        norm_sq = float(grad_beta @ grad_beta + grad_beta0 * grad_beta0)
        if np.sqrt(norm_sq) <= config.kkt_tol * max(1.0, float(np.linalg.norm(beta))):
            break

        accepted = False
        trial = min(1.0, 2.0 * step_size)
        for _ in range(MAX_HALVINGS):
            new_beta = beta - trial * grad_beta
            new_beta0 = beta0 - trial * grad_beta0
            if np.any(new_beta != 0.0):
                new_value, new_slope, new_scale = _objective(data, new_beta, new_beta0, config)
                if new_value <= value - ARMIJO * trial * norm_sq:
                    accepted = True
                    break
            trial *= 0.5
        if not accepted:
            stalled = True
            break

        beta, beta0, step_size = new_beta, new_beta0, trial
        value, slope, scale = new_value, new_slope, new_scale
        path.append(value)
        steps += 1

        candidate = Hyperplane(beta=beta, beta0=beta0)
        objective = variance_primal_objective(data, candidate, config.cost, config.sigma_mode)
        if objective < best_objective:
            best, best_objective = candidate, objective

    logger.info(
        "refine_complete",
        extra={
            "iterations": steps,
            "objective": best_objective,
            "converged": not stalled,
        },
    )
    return RefineResult(
        hyperplane=best,
        objective=best_objective,
        start_objective=start_objective,
        path=tuple(path),
        steps=steps,
        stalled=stalled,
    )
