"""
Classical soft-margin linear SVM.

Trained through its Wolfe dual with pairwise ascent
(`varsvm.solvers.pairwise`). The hyperplane is rebuilt from the
multipliers as beta = sum_i alpha_i y_i x_i, the offset from the free
support vectors.
"""

from __future__ import annotations

import logging
from dataclasses import replace
from typing import Optional, Tuple

import numpy as np

from varsvm.core.models import Dataset, DegenerateSolutionError, Hyperplane

from .config import SolverConfig
from .models import TrainedModel, Variant
from .pairwise import PairwiseResult, maximize_dual

logger = logging.getLogger(__name__)

MIN_PAIR_TOL = 1e-14
DEGENERATE_TOL = 1e-12


class NonConvergenceError(RuntimeError):
    """Raised when a solver runs out of budget; `.model` is the best iterate."""

    def __init__(self, message: str, model: TrainedModel):
        super().__init__(message)
        self.model = model


def _functional(data: Dataset, beta, beta0: float) -> np.ndarray:
    """y_i (x_i.beta + beta0)"""
    return data.labels * (data.points @ np.asarray(beta, dtype=float) + beta0)


def classical_slack(data: Dataset, h: Hyperplane) -> np.ndarray:
    """zeta_i = max(0, 1 - y_i (x_i.beta + beta0))"""
    h.require_valid()
    return np.maximum(0.0, 1.0 - _functional(data, h.beta, h.beta0))


def primal_objective(data: Dataset, h: Hyperplane, cost: float) -> float:
    """1/2 ||beta||^2 + C sum_i zeta_i"""
    slack = classical_slack(data, h)
    return float(0.5 * h.beta @ h.beta + cost * slack.sum())


def dual_objective(data: Dataset, alphas, label_scale=None) -> float:
    """
    Wolfe dual value sum_i alpha_i - 1/2 ||sum_i alpha_i y_i x_i / s_i||^2.

    label_scale is the per-point s_i (the frozen sigma_{y_i}); ones when
    omitted, which is the classical dual.
    """
    alphas = np.asarray(alphas, dtype=float).reshape(-1)
    if alphas.shape[0] != data.n_points:
        raise ValueError(f"expected {data.n_points} alphas, got {alphas.shape[0]}")
    weights = alphas * data.labels
    if label_scale is not None:
        label_scale = np.asarray(label_scale, dtype=float).reshape(-1)
        if label_scale.shape[0] != data.n_points:
            raise ValueError(f"expected {data.n_points} label scales, got {label_scale.shape[0]}")
        weights = weights / label_scale
    beta = data.points.T @ weights
    return float(alphas.sum() - 0.5 * beta @ beta)


def complementarity_residual(data: Dataset, model: TrainedModel, cost: float) -> float:
    """
    Feasibility, sign and complementarity part of the KKT conditions.

    With m_i = y_i (x_i.beta + beta0) / sigma_{y_i} (sigma = 1 for the
    classical variant) and the model's own slacks and multipliers:
    - feasibility: m_i >= 1 - zeta_i, zeta_i >= 0
    - signs: 0 <= alpha_i, 0 <= mu_i
    - complementarity: min(alpha_i, |m_i - 1 + zeta_i|), min(mu_i, zeta_i)
    """
    alphas = np.asarray(model.alphas, dtype=float)
    slacks = np.asarray(model.slacks, dtype=float)
    mus = np.asarray(model.mus, dtype=float)
    n = data.n_points
    if alphas.shape != (n,) or slacks.shape != (n,) or mus.shape != (n,):
        raise ValueError("model vectors do not match the dataset size")

    margins = _functional(data, model.hyperplane.beta, model.hyperplane.beta0)
    margins = margins / model.point_sigmas(data.labels)
    surplus = margins - (1.0 - slacks)

    terms = (
        np.maximum(0.0, -surplus),
        np.maximum(0.0, -slacks),
        np.maximum(0.0, -alphas),
        np.maximum(0.0, -mus),
        np.minimum(np.abs(alphas), np.abs(surplus)),
        np.minimum(np.abs(mus), np.abs(slacks)),
    )
    return float(max(np.max(t) for t in terms))


def kkt_residual(data: Dataset, model: TrainedModel, cost: float) -> float:
    """
    Largest KKT violation of the (frozen-sigma) soft-margin problem.

    Adds to `complementarity_residual` the stationarity terms
    ||beta - sum alpha_i y_i x_i / sigma_i||_inf, |sum alpha_i y_i / sigma_i|
    and max_i |alpha_i + mu_i - C|.
    """
    residual = complementarity_residual(data, model, cost)
    sigmas = model.point_sigmas(data.labels)
    weights = np.asarray(model.alphas, dtype=float) * data.labels / sigmas
    stationarity = np.max(np.abs(model.hyperplane.beta - data.points.T @ weights))
    equality = abs(float(weights.sum()))
    box = np.max(np.abs(model.alphas + model.mus - cost))
    return float(max(residual, stationarity, equality, box))


def _build_model(
    data: Dataset,
    result: PairwiseResult,
    cost: float,
    sigmas: Optional[Tuple[float, float]],
    iterations: int,
) -> TrainedModel:
    if sigmas is None:
        scale = np.ones(data.n_points)
        variant = Variant.CLASSICAL
    else:
        scale = np.where(data.labels > 0, sigmas[1], sigmas[0]).astype(float)
        variant = Variant.VARIANCE

    alphas = np.clip(scale * result.multipliers(data.labels), 0.0, cost)
    beta = data.points.T @ (alphas * data.labels / scale)
    beta0 = result.bias
    slacks = np.maximum(0.0, 1.0 - _functional(data, beta, beta0) / scale)
    model = TrainedModel(
        hyperplane=Hyperplane(beta=beta, beta0=beta0),
        alphas=alphas,
        slacks=slacks,
        mus=cost - alphas,
        objective=float(0.5 * beta @ beta + cost * slacks.sum()),
        kkt_residual=0.0,
        iterations=iterations,
        variant=variant,
        sigmas=None if sigmas is None else (float(sigmas[0]), float(sigmas[1])),
        cost=cost,
    )
    return replace(model, kkt_residual=kkt_residual(data, model, cost))


def _require_nonzero_normal(data: Dataset, model: TrainedModel) -> None:
    """
    Reject a vanishing beta = sum_i alpha_i y_i x_i.

    sum_i alpha_i y_i = 0 gives |beta| <= C sum_i |x_i - xbar|; anything
    below DEGENERATE_TOL of that bound is cancellation noise.
    """
    centered = data.points - data.points.mean(axis=0)
    bound = model.cost * float(np.linalg.norm(centered, axis=1).sum())
    if model.hyperplane.norm <= DEGENERATE_TOL * bound:
        raise DegenerateSolutionError(
            "optimal normal beta is zero: the classes cannot be told apart by any "
            "linear direction at this cost"
        )


def _solve_dual(
    data: Dataset,
    config: SolverConfig,
    sigmas: Optional[Tuple[float, float]] = None,
) -> TrainedModel:
    """
    Pairwise ascent on the (optionally sigma-weighted) dual.

    The pair-gap tolerance starts at kkt_tol and is tightened tenfold until
    the KKT residual of the rebuilt model is within kkt_tol. The returned
    model has converged=False when the budget of max_passes * N updates or
    the tolerance floor is reached first.
    """
    data.require_both_classes()
    cost = config.cost
    n = data.n_points
    if sigmas is None:
        linear = np.ones(n)
    else:
        linear = np.where(data.labels > 0, sigmas[1], sigmas[0]).astype(float)

    gram = data.points @ data.points.T
    labels = data.labels.astype(float)
    budget = config.max_passes * n
    tol = config.kkt_tol
    used = 0
    state = None

    while True:
        state = maximize_dual(
            gram,
            labels,
            linear=linear,
            upper=cost / linear,
            tol=tol,
            max_updates=budget - used,
            state=state,
        )
        used += state.updates
        model = _build_model(data, state, cost, sigmas, used)
        if model.kkt_residual <= config.kkt_tol:
            return model
        if used >= budget or tol < MIN_PAIR_TOL:
            return replace(model, converged=False)
        tol *= 0.1


def solve_fixed_sigma(
    data: Dataset,
    sigma_neg: float,
    sigma_pos: float,
    config: Optional[SolverConfig] = None,
) -> TrainedModel:
    """
    Soft-margin SVM whose constraints are y_i (x_i.beta + beta0) / sigma_{y_i} >= 1 - zeta_i.

    Dual: max sum alpha_i - 1/2 ||sum alpha_i y_i x_i / sigma_i||^2 with
    0 <= alpha_i <= C and sum alpha_i y_i / sigma_i = 0, solved as the
    generic dual with a_i = alpha_i / sigma_i. The model carries the frozen
    sigmas and converged=False instead of raising.
    """
    config = config or SolverConfig()
    return _solve_dual(data, config, (sigma_neg, sigma_pos))


def solve_classical(
    data: Dataset,
    config: Optional[SolverConfig] = None,
) -> TrainedModel:
    """
    Train the soft-margin SVM.

    Raises:
        MissingClassError: a label has no observations
        DegenerateSolutionError: the optimal normal is zero
        NonConvergenceError: the update budget ran out before the KKT
            residual reached kkt_tol
    """
    config = config or SolverConfig()
    model = _solve_dual(data, config)
    _require_nonzero_normal(data, model)

    logger.info(
        "classical_solve_complete",
        extra={
            "variant": Variant.CLASSICAL.value,
            "iterations": model.iterations,
            "objective": model.objective,
            "kkt_residual": model.kkt_residual,
            "converged": model.converged,
            "n_points": data.n_points,
            "n_features": data.n_features,
        },
    )
    if not model.converged:
        raise NonConvergenceError(
            f"classical solver stopped after {model.iterations} updates with KKT "
            f"residual {model.kkt_residual:.3g} > {config.kkt_tol:.3g}",
            model,
        )
    return model
