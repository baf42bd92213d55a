"""
Variance-adjusted SVM.

Each class margin is measured in units of that class's standard deviation
along the normal:

    min 1/2 ||beta||^2 + C sum_i zeta_i
    s.t. y_i (x_i.beta + beta0) / sigma_{y_i, beta} >= 1 - zeta_i,  zeta_i >= 0

sigma depends on beta, so the problem is not convex. The solver:

1. starts from the classical solution,
2. alternates between freezing sigma along the current normal and solving
   the resulting weighted convex SVM (`solve_fixed_sigma`), keeping the
   best iterate by the true objective,
3. polishes the normal with the direction-restricted exact solve
   (`varsvm.solvers.restricted`), since a frozen-sigma fixed point is
   generally not stationary once sigma is allowed to move,
4. recovers multipliers for the final hyperplane by bounded least squares
   on the stationarity conditions.
"""

from __future__ import annotations

import logging
from dataclasses import replace
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import lsq_linear

from varsvm.core.geometry import class_sigmas, direction_cosine, sigma_gradient, unit_normal
from varsvm.core.models import Dataset, GradientMode, Hyperplane, SigmaMode

from .classical import (
    NonConvergenceError,
    complementarity_residual,
    solve_classical,
    solve_fixed_sigma,
)
from .config import SolverConfig
from .models import (
    LagrangianGradient,
    StationarityResiduals,
    TrainedModel,
    VarianceIterate,
    Variant,
)
from .restricted import polish_direction

logger = logging.getLogger(__name__)

ACTIVE_TOL = 1e-6
SAME_POINT_TOL = 1e-6


def current_sigmas(
    data: Dataset,
    beta,
    sigma_mode: SigmaMode,
    sigmas: Optional[Tuple[float, float]] = None,
) -> Tuple[float, float, bool]:
    """(sigma_neg, sigma_pos, any_at_floor); an explicit pair is used as given."""
    if sigmas is not None:
        return float(sigmas[0]), float(sigmas[1]), False
    neg, pos = class_sigmas(data, beta, sigma_mode)
    return neg.sigma, pos.sigma, neg.at_floor or pos.at_floor


def _per_point(data: Dataset, sigma_neg: float, sigma_pos: float) -> np.ndarray:
    return np.where(data.labels > 0, sigma_pos, sigma_neg).astype(float)


def variance_slack(
    data: Dataset,
    h: Hyperplane,
    sigma_mode: SigmaMode = SigmaMode.NORMALIZED,
    sigmas: Optional[Tuple[float, float]] = None,
) -> np.ndarray:
    """zeta_i = max(0, 1 - y_i (x_i.beta + beta0) / sigma_{y_i, beta})"""
    h.require_valid()
    sigma_neg, sigma_pos, _ = current_sigmas(data, h.beta, sigma_mode, sigmas)
    functional = data.labels * (data.points @ h.beta + h.beta0)
    return np.maximum(0.0, 1.0 - functional / _per_point(data, sigma_neg, sigma_pos))


def variance_primal_objective(
    data: Dataset,
    h: Hyperplane,
    cost: float,
    sigma_mode: SigmaMode = SigmaMode.NORMALIZED,
    sigmas: Optional[Tuple[float, float]] = None,
) -> float:
    """1/2 ||beta||^2 + C sum_i variance_slack_i"""
    slack = variance_slack(data, h, sigma_mode, sigmas)
    return float(0.5 * h.beta @ h.beta + cost * slack.sum())


def lagrangian_value(
    data: Dataset,
    h: Hyperplane,
    alphas,
    cost: float = 1.0,
    slacks=None,
    mus=None,
    sigma_mode: SigmaMode = SigmaMode.NORMALIZED,
) -> float:
    """
    L_P = 1/2 ||beta||^2 + C sum zeta_i
          - sum alpha_i (y_i (x_i.beta + beta0) / sigma_{y_i,beta} - (1 - zeta_i))
          - sum mu_i zeta_i

    slacks and mus default to zero.
    """
    h.require_valid()
    alphas = np.asarray(alphas, dtype=float)
    n = data.n_points
    slacks = np.zeros(n) if slacks is None else np.asarray(slacks, dtype=float)
    mus = np.zeros(n) if mus is None else np.asarray(mus, dtype=float)
    sigma_neg, sigma_pos, _ = current_sigmas(data, h.beta, sigma_mode)
    margins = data.labels * (data.points @ h.beta + h.beta0) / _per_point(data, sigma_neg, sigma_pos)
    return float(
        0.5 * h.beta @ h.beta
        + cost * slacks.sum()
        - alphas @ (margins - (1.0 - slacks))
        - mus @ slacks
    )


def constraint_gradients(
    data: Dataset,
    h: Hyperplane,
    mode: GradientMode,
    sigma_mode: SigmaMode,
    sigmas: Optional[Tuple[float, float]] = None,
) -> Tuple[np.ndarray, bool]:
    """
    Rows d/d beta [y_i (x_i.beta + beta0) / sigma_{y_i, beta}], shape (N, p).

    With a fixed sigma pair the sigma gradient is taken as zero.
    """
    sigma_neg, sigma_pos, at_floor = current_sigmas(data, h.beta, sigma_mode, sigmas)
    scale = _per_point(data, sigma_neg, sigma_pos)
    rows = (data.labels / scale)[:, None] * data.points
    if sigmas is not None:
        return rows, False

    functional = data.labels * (data.points @ h.beta + h.beta0)
    for label, sigma in ((-1, sigma_neg), (1, sigma_pos)):
        grad = sigma_gradient(data, label, h.beta, sigma_mode, mode)
        mask = data.class_mask(label)
        rows[mask] -= (functional[mask] / sigma**2)[:, None] * grad[None, :]
    return rows, at_floor


def lagrangian_gradient(
    data: Dataset,
    h: Hyperplane,
    alphas,
    mode: GradientMode = GradientMode.EXACT,
    sigma_mode: SigmaMode = SigmaMode.NORMALIZED,
    sigmas: Optional[Tuple[float, float]] = None,
) -> LagrangianGradient:
    """
    d L_P / d beta = beta - sum_i alpha_i y_i x_i / sigma_i
                     + sum_K (sum_{i in K} alpha_i y_i f_i) / sigma_K^2 * grad sigma_K

    f_i = x_i.beta + beta0. `mode` selects the sigma-gradient expression;
    an explicit sigma pair freezes sigma (its gradient is zero).
    """
    h.require_valid()
    alphas = np.asarray(alphas, dtype=float).reshape(-1)
    if alphas.shape[0] != data.n_points:
        raise ValueError(f"expected {data.n_points} alphas, got {alphas.shape[0]}")
    rows, at_floor = constraint_gradients(data, h, GradientMode(mode), sigma_mode, sigmas)
    if at_floor:
        logger.warning("gradient_at_sigma_floor", extra={"check": "lagrangian_gradient"})
    return LagrangianGradient(
        vector=h.beta - rows.T @ alphas,
        mode=GradientMode(mode),
        at_sigma_floor=at_floor,
    )


def finite_difference_check(
    data: Dataset,
    h: Hyperplane,
    alphas,
    mode: GradientMode = GradientMode.EXACT,
    step: float = 1e-6,
    sigma_mode: SigmaMode = SigmaMode.NORMALIZED,
) -> float:
    """
    Relative error of `lagrangian_gradient` against central differences of
    `lagrangian_value` in beta.

    Each coordinate is perturbed by step * max(1, ||beta||).
    """
    analytic = lagrangian_gradient(data, h, alphas, mode, sigma_mode).vector
    delta = step * max(1.0, h.norm)
    numeric = np.zeros_like(analytic)
    for k in range(analytic.shape[0]):
        shift = np.zeros_like(analytic)
        shift[k] = delta
        forward = lagrangian_value(data, Hyperplane(h.beta + shift, h.beta0), alphas, sigma_mode=sigma_mode)
        backward = lagrangian_value(data, Hyperplane(h.beta - shift, h.beta0), alphas, sigma_mode=sigma_mode)
        numeric[k] = (forward - backward) / (2.0 * delta)
    scale = max(float(np.linalg.norm(numeric)), np.finfo(float).tiny)
    return float(np.linalg.norm(analytic - numeric) / scale)


def stationarity_residuals(
    data: Dataset,
    model: TrainedModel,
    sigma_mode: Optional[SigmaMode] = None,
    sigmas: Optional[Tuple[float, float]] = None,
) -> StationarityResiduals:
    """
    Stationarity of the variance-adjusted Lagrangian at the model.

    sigma is recomputed along the model's normal unless a fixed pair is
    given; with sigmas=(1, 1) the residuals reduce to the classical ones.
    """
    sigma_mode = model.sigma_mode if sigma_mode is None else SigmaMode(sigma_mode)
    alphas = np.asarray(model.alphas, dtype=float)
    mus = np.asarray(model.mus, dtype=float)
    if alphas.shape != (data.n_points,) or mus.shape != (data.n_points,):
        raise ValueError("model vectors do not match the dataset size")

    sigma_neg, sigma_pos, _ = current_sigmas(data, model.hyperplane.beta, sigma_mode, sigmas)
    scale = _per_point(data, sigma_neg, sigma_pos)
    gradient = lagrangian_gradient(
        data, model.hyperplane, alphas, GradientMode.EXACT, sigma_mode, sigmas
    )
    return StationarityResiduals(
        equality=abs(float(np.sum(alphas * data.labels / scale))),
        box=float(np.max(np.abs(alphas + mus - model.cost))),
        gradient=float(np.linalg.norm(gradient.vector)),
    )


def recover_multipliers(
    data: Dataset,
    h: Hyperplane,
    cost: float,
    sigma_mode: SigmaMode = SigmaMode.NORMALIZED,
) -> np.ndarray:
    """
    Multipliers certifying h.

    Margin violators get alpha = C, points beyond their margin get 0, and
    the points on their margin solve the bounded least-squares problem

        sum_i alpha_i g_i = beta,  sum_i alpha_i y_i / sigma_i = 0,  0 <= alpha_i <= C

    with g_i the exact constraint gradient.
    """
    sigma_neg, sigma_pos, _ = current_sigmas(data, h.beta, sigma_mode)
    scale = _per_point(data, sigma_neg, sigma_pos)
    margins = data.labels * (data.points @ h.beta + h.beta0) / scale
    rows, _ = constraint_gradients(data, h, GradientMode.EXACT, sigma_mode)

    system = np.vstack([rows.T, (data.labels / scale)[None, :]])
    target = np.concatenate([h.beta, [0.0]])
    active = np.abs(margins - 1.0) <= ACTIVE_TOL
    violators = margins < 1.0 - ACTIVE_TOL

    alphas = np.zeros(data.n_points)
    alphas[violators] = cost
    target = target - system[:, violators].sum(axis=1) * cost
    if np.any(active):
        fit = lsq_linear(system[:, active], target, bounds=(0.0, cost), method="bvls")
        alphas[active] = fit.x
    return alphas


def _finish_model(
    data: Dataset,
    h: Hyperplane,
    config: SolverConfig,
    iterations: int,
    converged: bool,
) -> TrainedModel:
    cost = config.cost
    sigma_neg, sigma_pos, _ = current_sigmas(data, h.beta, config.sigma_mode)
    alphas = recover_multipliers(data, h, cost, config.sigma_mode)
    slacks = variance_slack(data, h, config.sigma_mode)
    model = TrainedModel(
        hyperplane=h,
        alphas=alphas,
        slacks=slacks,
        mus=cost - alphas,
        objective=variance_primal_objective(data, h, cost, config.sigma_mode),
        kkt_residual=0.0,
        iterations=iterations,
        variant=Variant.VARIANCE,
        converged=converged,
        sigmas=(sigma_neg, sigma_pos),
        cost=cost,
        sigma_mode=config.sigma_mode,
    )
    residual = max(
        complementarity_residual(data, model, cost),
        stationarity_residuals(data, model).worst,
    )
    return replace(model, kkt_residual=residual)


def _alternate(
    data: Dataset,
    config: SolverConfig,
    start,
) -> Tuple[List[VarianceIterate], VarianceIterate, bool]:
    """
    Frozen-sigma fixed-point iteration from a starting normal.

    Returns (iterates, best iterate by true objective, converged).
    """
    direction = unit_normal(start)
    iterates: List[VarianceIterate] = []
    best: Optional[VarianceIterate] = None
    converged = False
    sigma_neg, sigma_pos, at_floor = current_sigmas(data, direction, config.sigma_mode)

    for outer in range(1, config.max_outer + 1):
        if at_floor:
            logger.warning(
                "sigma_floor_applied",
                extra={"sigma_neg": sigma_neg, "sigma_pos": sigma_pos, "outer_iteration": outer},
            )
        inner = solve_fixed_sigma(data, sigma_neg, sigma_pos, config)
        h = inner.hyperplane
        if not np.any(h.beta != 0.0):
            logger.warning("variance_zero_normal", extra={"outer_iteration": outer})
            break

        change = 1.0 - abs(direction_cosine(direction, h.beta))
        next_neg, next_pos, at_floor = current_sigmas(data, h.beta, config.sigma_mode)
        sigma_change = max(
            abs(next_neg - sigma_neg) / sigma_neg,
            abs(next_pos - sigma_pos) / sigma_pos,
        )
        iterate = VarianceIterate(
            hyperplane=h,
            sigma_neg=sigma_neg,
            sigma_pos=sigma_pos,
            inner_model=inner,
            direction_change=max(change, 0.0),
            objective=variance_primal_objective(data, h, config.cost, config.sigma_mode),
        )
        iterates.append(iterate)
        if best is None or iterate.objective < best.objective:
            best = iterate

        logger.debug(
            "variance_outer_iteration",
            extra={
                "outer_iteration": outer,
                "direction_change": iterate.direction_change,
                "objective": iterate.objective,
                "sigma_neg": sigma_neg,
                "sigma_pos": sigma_pos,
            },
        )
        if iterate.direction_change <= config.outer_tol and sigma_change <= config.sigma_tol:
            converged = True
            break
        direction = unit_normal(h.beta)
        sigma_neg, sigma_pos = next_neg, next_pos

    return iterates, best, converged


def solve_variance(
    data: Dataset,
    config: Optional[SolverConfig] = None,
) -> TrainedModel:
    """
    Train the variance-adjusted SVM.

    The returned model is flagged converged=False (not raised) when the
    alternating loop used all max_outer iterations; its hyperplane is still
    the best one found.

    Raises:
        MissingClassError: a label has no observations
        DegenerateSolutionError: the classical start has a zero normal
    """
    config = config or SolverConfig()
    data.require_both_classes()

    try:
        classical = solve_classical(data, config)
    except NonConvergenceError as exc:
        classical = exc.model
    start = classical.hyperplane
    start_objective = variance_primal_objective(data, start, config.cost, config.sigma_mode)

    iterates, best, converged = _alternate(data, config, start.beta)
    hyperplane, objective = start, start_objective
    if best is not None and best.objective <= start_objective:
        hyperplane, objective = best.hyperplane, best.objective

    polished = polish_direction(data, hyperplane.beta, config.cost, config.sigma_mode)
    if polished.objective <= objective + 1e-12 * max(1.0, abs(objective)):
        hyperplane = polished.hyperplane

    model = _finish_model(data, hyperplane, config, len(iterates), converged)
    level = logging.INFO if converged else logging.WARNING
    logger.log(
        level,
        "variance_solve_complete",
        extra={
            "variant": Variant.VARIANCE.value,
            "iterations": model.iterations,
            "objective": model.objective,
            "kkt_residual": model.kkt_residual,
            "converged": converged,
            "sigma_neg": model.sigmas[0],
            "sigma_pos": model.sigmas[1],
        },
    )
    return model


def _same_point(a: Hyperplane, b: Hyperplane) -> bool:
    if direction_cosine(a.beta, b.beta) < 1.0 - SAME_POINT_TOL:
        return False
    return abs(a.beta0 / a.norm - b.beta0 / b.norm) <= SAME_POINT_TOL


def explore_fixed_points(
    data: Dataset,
    config: Optional[SolverConfig] = None,
) -> List[VarianceIterate]:
    """
    Distinct fixed points of the alternating scheme.

    Runs from the classical normal and from config.restarts random normals
    drawn with config.seed. Two results are the same point when their
    normals agree to 1e-6 in cosine and their normalized offsets to 1e-6.
    """
    config = config or SolverConfig()
    data.require_both_classes()
    try:
        classical = solve_classical(data, config)
    except NonConvergenceError as exc:
        classical = exc.model

    rng = np.random.default_rng(config.seed)
    starts = [classical.hyperplane.beta]
    for _ in range(config.restarts):
        draw = rng.standard_normal(data.n_features)
        while not np.any(draw != 0.0):
            draw = rng.standard_normal(data.n_features)
        starts.append(draw)

    found: List[VarianceIterate] = []
    for start in starts:
        iterates, _, _ = _alternate(data, config, start)
        if not iterates:
            continue
        final = iterates[-1]
        if not any(_same_point(final.hyperplane, seen.hyperplane) for seen in found):
            found.append(final)
    logger.info("fixed_points_explored", extra={"evaluations": len(starts)})
    return found
