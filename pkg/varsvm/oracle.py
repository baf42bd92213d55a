"""
Brute-force reference solvers.

Grid sweeps for 1-D and 2-D data that maximize the smaller of the two
class margins directly, and a dense SLSQP solve of the classical Wolfe
dual. They are slow and exhaustive; tests and `verify` use them as ground
truth.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import minimize

from varsvm.core.geometry import margin_report, sigma_floor
from varsvm.core.models import Dataset, DatasetError, Hyperplane, SigmaMode

logger = logging.getLogger(__name__)

ONE_D_STEP = 1e-4
MAX_1D_GRID = 2_000_001
ANGLE_CHUNK = 256
OFFSET_PADDING = 0.1


class OracleDimensionError(DatasetError):
    """Raised when an oracle is called on data of the wrong dimension."""


@dataclass(frozen=True)
class OracleResult:
    """
    Best hyperplane found by an exhaustive search.

    Fields:
    - hyperplane: unit-normal hyperplane (grid oracles) or dual-recovered one
    - objective: max-min class margin (grid) or dual objective (SLSQP)
    - angle_step: radians between searched normals (0 when not applicable)
    - offset_step: data units between searched offsets at the best angle
    - scaled: margins were divided by the class sigmas
    - method: grid-1d, grid-2d or slsqp-dual
    - alphas: dual solution (slsqp-dual only)
    """

    hyperplane: Hyperplane
    objective: float
    angle_step: float
    offset_step: float
    scaled: bool
    method: str
    alphas: Optional[np.ndarray] = None


def _scatter(members: np.ndarray, sigma_mode: SigmaMode) -> np.ndarray:
    deviations = members - members.mean(axis=0)
    scatter = deviations.T @ deviations
    if SigmaMode(sigma_mode) is SigmaMode.NORMALIZED:
        scatter = scatter / members.shape[0]
    return scatter


def _grid_sigmas(
    data: Dataset,
    directions: np.ndarray,
    scaled: bool,
    sigma_mode: SigmaMode,
    sigmas: Optional[Tuple[float, float]],
) -> Tuple[np.ndarray, np.ndarray]:
    """Per-direction (sigma_neg, sigma_pos); rows of `directions` are unit normals."""
    count = directions.shape[0]
    if not scaled:
        return np.ones(count), np.ones(count)
    if sigmas is not None:
        return np.full(count, float(sigmas[0])), np.full(count, float(sigmas[1]))
    floor = sigma_floor(data)
    result = []
    for label in (-1, 1):
        scatter = _scatter(data.class_points(label), sigma_mode)
        variance = np.einsum("ij,jk,ik->i", directions, scatter, directions)
        raw = np.sqrt(np.maximum(variance, 0.0))
        result.append(np.where(raw < floor, floor, raw))
    return result[0], result[1]


def oracle_1d(
    data: Dataset,
    scaled: bool = True,
    step: float = ONE_D_STEP,
    sigma_mode: SigmaMode = SigmaMode.NORMALIZED,
    sigmas: Optional[Tuple[float, float]] = None,
) -> OracleResult:
    """
    Sweep boundary positions on a line.

    Candidates are every midpoint between consecutive distinct points and
    a uniform grid of `step` across the gap between the class hulls, for
    both orientations of the normal. The boundary c maximizes
    min((T_+ - c)/sigma_+, (c - T_-)/sigma_-) with T_+ the smallest
    projection of class +1 and T_- the largest of class -1.
    """
    if data.n_features != 1:
        raise OracleDimensionError(f"oracle_1d needs 1 feature, got {data.n_features}")
    data.require_both_classes()

    x = data.points[:, 0]
    distinct = np.unique(x)
    midpoints = 0.5 * (distinct[:-1] + distinct[1:])

    best = None
    for orientation in (1.0, -1.0):
        direction = np.array([[orientation]])
        sigma_neg, sigma_pos = _grid_sigmas(data, direction, scaled, sigma_mode, sigmas)
        t = orientation * x
        top = float(np.min(t[data.labels > 0]))
        bottom = float(np.max(t[data.labels < 0]))
        lo, hi = min(top, bottom), max(top, bottom)
        count = int(min(np.ceil((hi - lo) / step) + 1, MAX_1D_GRID))
        grid = np.linspace(lo, hi, max(count, 2))
        candidates = np.concatenate([orientation * midpoints, grid])

        margins = np.minimum((top - candidates) / sigma_pos[0], (candidates - bottom) / sigma_neg[0])
        k = int(np.argmax(margins))
        if best is None or margins[k] > best[0]:
            best = (float(margins[k]), orientation, float(candidates[k]))

    objective, orientation, position = best
    return OracleResult(
        hyperplane=Hyperplane(beta=[orientation], beta0=-position),
        objective=objective,
        angle_step=0.0,
        offset_step=step,
        scaled=scaled,
        method="grid-1d",
    )


def oracle_2d(
    data: Dataset,
    scaled: bool = True,
    angle_steps: int = 360,
    offset_steps: int = 1000,
    sigma_mode: SigmaMode = SigmaMode.NORMALIZED,
    sigmas: Optional[Tuple[float, float]] = None,
) -> OracleResult:
    """
    Exhaustive search over unit normals (cos theta, sin theta) and offsets.

    theta_k = 2 pi k / angle_steps. At each angle the boundary position c
    runs over `offset_steps` values spanning the projected data range
    padded by 10% on both sides. Angles are processed in chunks and the
    first maximum wins, so ties go to the smallest angle index, then the
    smallest offset index.
    """
    if data.n_features != 2:
        raise OracleDimensionError(f"oracle_2d needs 2 features, got {data.n_features}")
    if angle_steps < 1 or offset_steps < 2:
        raise ValueError("oracle_2d needs angle_steps >= 1 and offset_steps >= 2")
    data.require_both_classes()
    if not np.any(np.ptp(data.points, axis=0) > 0.0):
        raise DatasetError("oracle_2d needs points that are not all identical")

    positive = data.labels > 0
    fractions = np.linspace(0.0, 1.0, offset_steps)
    angle_step = 2.0 * np.pi / angle_steps

    best = None
    for start in range(0, angle_steps, ANGLE_CHUNK):
        thetas = angle_step * np.arange(start, min(start + ANGLE_CHUNK, angle_steps))
        directions = np.column_stack([np.cos(thetas), np.sin(thetas)])
        sigma_neg, sigma_pos = _grid_sigmas(data, directions, scaled, sigma_mode, sigmas)

        t = data.points @ directions.T
        top = t[positive].min(axis=0)
        bottom = t[~positive].max(axis=0)
        t_min, t_max = t.min(axis=0), t.max(axis=0)
        pad = OFFSET_PADDING * (t_max - t_min)
        lo, hi = t_min - pad, t_max + pad
        offsets = lo[:, None] + fractions[None, :] * (hi - lo)[:, None]

        margins = np.minimum(
            (top[:, None] - offsets) / sigma_pos[:, None],
            (offsets - bottom[:, None]) / sigma_neg[:, None],
        )
        flat = int(np.argmax(margins))
        row, col = divmod(flat, offset_steps)
        value = float(margins[row, col])
        if best is None or value > best[0]:
            step = float((hi[row] - lo[row]) / (offset_steps - 1))
            best = (value, directions[row], float(offsets[row, col]), step)

    objective, direction, position, offset_step = best
    logger.debug(
        "oracle_2d_complete",
        extra={"objective": objective, "evaluations": angle_steps * offset_steps},
    )
    return OracleResult(
        hyperplane=Hyperplane(beta=direction, beta0=-position),
        objective=objective,
        angle_step=angle_step,
        offset_step=offset_step,
        scaled=scaled,
        method="grid-2d",
    )


def min_class_margin(
    data: Dataset,
    h: Hyperplane,
    scaled: bool = True,
    sigma_mode: SigmaMode = SigmaMode.NORMALIZED,
) -> float:
    """Smaller class margin of h measured with a unit normal."""
    report = margin_report(data, h, sigma_mode)
    if scaled:
        return min(report.margin_neg, report.margin_pos) / h.norm
    return min(report.distance_neg, report.distance_pos)


def grid_bound(
    data: Dataset,
    result: OracleResult,
    sigma_mode: SigmaMode = SigmaMode.NORMALIZED,
) -> float:
    """
    Conservative gap between a grid result and the true max-min margin.

    A grid cell is within angle_step of the optimal normal and offset_step
    of the optimal position, which moves a projection by at most
    angle_step * max ||x|| + offset_step. Dividing by the smallest class
    sigma over all directions bounds the margin change; when scaled, the
    change of sigma itself (at most sqrt(lambda_max) * angle_step) adds
    |objective| * sqrt(lambda_max) * angle_step / sigma_min.
    """
    shift = result.angle_step * float(np.max(np.linalg.norm(data.points, axis=1)))
    shift += result.offset_step
    if not result.scaled:
        return shift

    floor = sigma_floor(data)
    smallest, largest = np.inf, 0.0
    for label in (-1, 1):
        eigenvalues = np.linalg.eigvalsh(_scatter(data.class_points(label), sigma_mode))
        smallest = min(smallest, max(float(np.sqrt(max(eigenvalues[0], 0.0))), floor))
        largest = max(largest, float(np.sqrt(max(eigenvalues[-1], 0.0))))
    return (shift + abs(result.objective) * largest * result.angle_step) / smallest


def oracle_dual(data: Dataset, cost: float) -> OracleResult:
    """
    Dense SLSQP solve of the classical Wolfe dual.

    maximize sum alpha - 1/2 alpha^T Q alpha, Q_ij = y_i y_j <x_i, x_j>,
    subject to 0 <= alpha <= C and sum alpha_i y_i = 0.
    """
    data.require_both_classes()
    labels = data.labels.astype(float)
    signed_points = labels[:, None] * data.points
    quadratic = signed_points @ signed_points.T
    n = data.n_points

    found = minimize(
        lambda a: 0.5 * a @ quadratic @ a - a.sum(),
        np.zeros(n),
        jac=lambda a: quadratic @ a - 1.0,
        method="SLSQP",
        bounds=[(0.0, cost)] * n,
        constraints=[{"type": "eq", "fun": lambda a: a @ labels, "jac": lambda a: labels}],
        options={"ftol": 1e-15, "maxiter": 2000},
    )
    alphas = np.clip(found.x, 0.0, cost)
    beta = data.points.T @ (alphas * labels)
    free = (alphas > 1e-8 * cost) & (alphas < cost * (1.0 - 1e-8))
    if np.any(free):
        beta0 = float(np.mean(labels[free] - data.points[free] @ beta))
    else:
        beta0 = 0.0
    return OracleResult(
        hyperplane=Hyperplane(beta=beta, beta0=beta0),
        objective=float(alphas.sum() - 0.5 * alphas @ quadratic @ alphas),
        angle_step=0.0,
        offset_step=0.0,
        scaled=False,
        method="slsqp-dual",
        alphas=alphas,
    )
