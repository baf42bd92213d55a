"""
Decision function, directional class statistics and per-class margins.

Every function here is pure: inputs are immutable and nothing is cached,
so the same dataset can be shared across threads.
"""

from __future__ import annotations

import logging
from typing import Tuple

import numpy as np

from .models import (
    ClassStats,
    Dataset,
    GradientMode,
    Hyperplane,
    InvalidHyperplaneError,
    MarginReport,
    SigmaMode,
)

logger = logging.getLogger(__name__)

SIGMA_FLOOR_FACTOR = 1e-8


def unit_normal(beta) -> np.ndarray:
    beta = np.asarray(beta, dtype=float).reshape(-1)
    norm = float(np.linalg.norm(beta))
    if not np.isfinite(norm) or norm == 0.0:
        raise InvalidHyperplaneError("hyperplane normal beta must be nonzero")
    return beta / norm


def decision_value(hyperplane: Hyperplane, x) -> float:
    """x.beta + beta0."""
    hyperplane.require_valid()
    x = np.asarray(x, dtype=float).reshape(-1)
    return float(x @ hyperplane.beta + hyperplane.beta0)


def decision_values(hyperplane: Hyperplane, points) -> np.ndarray:
    hyperplane.require_valid()
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    return points @ hyperplane.beta + hyperplane.beta0


def classify(hyperplane: Hyperplane, x) -> int:
    """Sign of the decision value; a point on the boundary is labeled +1."""
    return 1 if decision_value(hyperplane, x) >= 0.0 else -1


def classify_many(hyperplane: Hyperplane, points) -> np.ndarray:
    return np.where(decision_values(hyperplane, points) >= 0.0, 1, -1)


def direction_cosine(a, b) -> float:
    """cos of the angle between two normals."""
    return float(unit_normal(a) @ unit_normal(b))


def sigma_floor(data: Dataset) -> float:
    """1e-8 times the largest per-coordinate range of the dataset."""
    spread = float(np.max(np.ptp(data.points, axis=0)))
    if spread == 0.0:
        return SIGMA_FLOOR_FACTOR
    return SIGMA_FLOOR_FACTOR * spread


def _centered(data: Dataset, label: int) -> Tuple[np.ndarray, np.ndarray]:
    members = data.class_points(label)
    mean = members.mean(axis=0)
    return mean, members - mean


def _raw_sigma(deviations: np.ndarray, u: np.ndarray, sigma_mode: SigmaMode) -> float:
    projections = deviations @ u
    total = float(projections @ projections)
    if SigmaMode(sigma_mode) is SigmaMode.NORMALIZED:
        total /= deviations.shape[0]
    return float(np.sqrt(total))


def class_stats(
    data: Dataset,
    label: int,
    beta,
    sigma_mode: SigmaMode = SigmaMode.NORMALIZED,
) -> ClassStats:
    u = unit_normal(beta)
    mean, deviations = _centered(data, label)
    raw = _raw_sigma(deviations, u, sigma_mode)
    floor = sigma_floor(data)
    at_floor = raw < floor
    if at_floor:
        key = "sigma_neg" if label < 0 else "sigma_pos"
        logger.debug("sigma_floor_applied", extra={key: raw})
    return ClassStats(
        label=label,
        count=int(deviations.shape[0]),
        mean=mean,
        sigma=floor if at_floor else raw,
        at_floor=bool(at_floor),
    )


def class_sigma(
    data: Dataset,
    label: int,
    beta,
    sigma_mode: SigmaMode = SigmaMode.NORMALIZED,
    apply_floor: bool = True,
) -> float:
    """
    Standard deviation of a class projected on beta/||beta||.

    Members are centered at their own class mean. In normalized mode the
    sum of squares is divided by the class count; paper-literal mode keeps
    the bare sum. With apply_floor the result never drops below sigma_floor.
    """
    if apply_floor:
        return class_stats(data, label, beta, sigma_mode).sigma
    _, deviations = _centered(data, label)
    return _raw_sigma(deviations, unit_normal(beta), sigma_mode)


def class_sigmas(
    data: Dataset,
    beta,
    sigma_mode: SigmaMode = SigmaMode.NORMALIZED,
) -> Tuple[ClassStats, ClassStats]:
    """Stats for (class -1, class +1)."""
    return (
        class_stats(data, -1, beta, sigma_mode),
        class_stats(data, 1, beta, sigma_mode),
    )


def point_sigmas(data: Dataset, sigma_neg: float, sigma_pos: float) -> np.ndarray:
    """sigma_{y_i} for every observation."""
    return np.where(data.labels > 0, sigma_pos, sigma_neg).astype(float)


def sigma_gradient(
    data: Dataset,
    label: int,
    beta,
    sigma_mode: SigmaMode = SigmaMode.NORMALIZED,
    mode: GradientMode = GradientMode.EXACT,
) -> np.ndarray:
    """
    Gradient of sigma_{K,beta} with respect to beta.

    With S the class scatter matrix and u = beta/||beta||:
    exact  -> (S u - sigma^2 u) / (sigma ||beta||)
    paper  -> (S u) o (1 - u o u) / (sigma ||beta||)
    Zero when sigma sits on the floor (sigma is constant there).
    """
    beta = np.asarray(beta, dtype=float).reshape(-1)
    u = unit_normal(beta)
    norm = float(np.linalg.norm(beta))
    stats = class_stats(data, label, beta, sigma_mode)
    if stats.at_floor:
        return np.zeros_like(beta)

    _, deviations = _centered(data, label)
    projections = deviations @ u
    scatter_u = deviations.T @ projections
    if SigmaMode(sigma_mode) is SigmaMode.NORMALIZED:
        scatter_u = scatter_u / deviations.shape[0]
    sigma = stats.sigma

    if GradientMode(mode) is GradientMode.PAPER:
        return scatter_u * (1.0 - u * u) / (sigma * norm)
    return (scatter_u - sigma * sigma * u) / (sigma * norm)


def class_margin(
    data: Dataset,
    label: int,
    hyperplane: Hyperplane,
    sigma_mode: SigmaMode = SigmaMode.NORMALIZED,
) -> float:
    """min over class members of y_i (x_i.beta + beta0) / sigma_K."""
    hyperplane.require_valid()
    members = data.class_points(label)
    sigma = class_sigma(data, label, hyperplane.beta, sigma_mode)
    functional = label * (members @ hyperplane.beta + hyperplane.beta0)
    return float(np.min(functional) / sigma)


def margin_report(
    data: Dataset,
    hyperplane: Hyperplane,
    sigma_mode: SigmaMode = SigmaMode.NORMALIZED,
) -> MarginReport:
    hyperplane.require_valid()
    data.require_both_classes()
    neg, pos = class_sigmas(data, hyperplane.beta, sigma_mode)
    values = decision_values(hyperplane, data.points)
    norm = hyperplane.norm

    closest = {}
    for label in (-1, 1):
        closest[label] = float(np.min(label * values[data.class_mask(label)]))

    margin_neg = closest[-1] / neg.sigma
    margin_pos = closest[1] / pos.sigma
    distance_neg = closest[-1] / norm
    distance_pos = closest[1] / norm
    return MarginReport(
        margin_neg=margin_neg,
        margin_pos=margin_pos,
        sigma_neg=neg.sigma,
        sigma_pos=pos.sigma,
        ratio_gap=abs(margin_neg - margin_pos),
        distance_neg=distance_neg,
        distance_pos=distance_pos,
        euclidean_ratio_gap=abs(distance_neg / neg.sigma - distance_pos / pos.sigma),
    )
