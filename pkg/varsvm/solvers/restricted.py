"""
Direction-restricted solve of the variance-adjusted primal.

For a fixed unit direction u the class sigmas are fixed (sigma depends on
beta only through u), so with beta = r u the primal

    V(u) = min_{r >= 0, b}  1/2 r^2 + C sum_i max(0, 1 - y_i (r t_i + b) / sigma_i),
    t_i = x_i . u

is convex in (r, b). The inner minimization over b is piecewise linear
and solved exactly from sorted breakpoints; r is found by a bounded
scalar search followed by an active-set correction. `polish_direction`
then minimizes V over the unit sphere.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import minimize, minimize_scalar

from varsvm.core.geometry import class_sigmas, unit_normal
from varsvm.core.models import Dataset, Hyperplane, SigmaMode

logger = logging.getLogger(__name__)

ACTIVE_TOL = 1e-6
SIMPLEX_STEP = 0.05


@dataclass(frozen=True)
class DirectionSolution:
    """
    Fields:
    - direction: unit normal u
    - scale: r = ||beta||
    - offset: beta0
    - objective: V(u), the variance primal objective at (r u, beta0)
    - sigma_neg, sigma_pos: class sigmas along u
    """

    direction: np.ndarray
    scale: float
    offset: float
    objective: float
    sigma_neg: float
    sigma_pos: float

    @property
    def hyperplane(self) -> Hyperplane:
        return Hyperplane(beta=self.scale * self.direction, beta0=self.offset)


class _Projection:
    """Per-direction quantities reused by every evaluation along r."""

    def __init__(self, data: Dataset, u: np.ndarray, cost: float, sigma_neg: float, sigma_pos: float):
        projections = data.points @ u
        positive = data.labels > 0
        self.cost = cost
        self.sigma_neg = sigma_neg
        self.sigma_pos = sigma_pos
        self.t = projections
        self.t_pos = projections[positive]
        self.t_neg = projections[~positive]
        self.coef = np.where(positive, 1.0 / sigma_pos, -1.0 / sigma_neg)

    def objective(self, r: float, b: float) -> float:
        slack = np.maximum(0.0, 1.0 - self.coef * (r * self.t + b))
        return float(0.5 * r * r + self.cost * slack.sum())

    def hinge(self, r: float, b: float) -> float:
        tops = self.sigma_pos - r * self.t_pos
        bottoms = -self.sigma_neg - r * self.t_neg
        return float(
            self.cost / self.sigma_pos * np.maximum(0.0, tops - b).sum()
            + self.cost / self.sigma_neg * np.maximum(0.0, b - bottoms).sum()
        )

    def best_offset(self, r: float) -> float:
        """
        Minimizer of the hinge term over b.

        The right derivative is C (#{Q <= b}/sigma_neg - #{P > b}/sigma_pos)
        with P = sigma_pos - r t (class +1) and Q = -sigma_neg - r t
        (class -1); the optimum is the first breakpoint where it turns
        nonnegative. On a zero-hinge flat segment the offset equalizing the
        two sigma-normalized margins is returned; on other flat segments the
        midpoint.
        """
        tops = np.sort(self.sigma_pos - r * self.t_pos)
        bottoms = np.sort(-self.sigma_neg - r * self.t_neg)
        candidates = np.unique(np.concatenate([tops, bottoms]))

        above = tops.shape[0] - np.searchsorted(tops, candidates, side="right")
        below = np.searchsorted(bottoms, candidates, side="right")
        slope = below * self.sigma_pos - above * self.sigma_neg
        k = int(np.argmax(slope >= 0.0))
        if slope[k] > 0.0:
            return float(candidates[k])

        lo = float(candidates[k])
        hi = float(candidates[k + 1])
        if above[k] == 0 and below[k] == 0:
            t_pos = float(self.t_pos.min())
            t_neg = float(self.t_neg.max())
            s_pos, s_neg = self.sigma_pos, self.sigma_neg
            balanced = -r * (s_neg * t_pos + s_pos * t_neg) / (s_pos + s_neg)
            return float(np.clip(balanced, lo, hi))
        return 0.5 * (lo + hi)

    def reduced(self, r: float) -> float:
        return 0.5 * r * r + self.hinge(r, self.best_offset(r))

    def active_set_step(self, r: float, b: float) -> Optional[Tuple[float, float]]:
        """Exact (r, b) from the points sitting on their margin at (r, b)."""
        margins = self.coef * (r * self.t + b)
        active = np.abs(margins - 1.0) <= ACTIVE_TOL
        violators = margins < 1.0 - ACTIVE_TOL
        count = int(active.sum())
        if count >= 2:
            rows = np.column_stack([self.coef[active] * self.t[active], self.coef[active]])
            solution, _, rank, _ = np.linalg.lstsq(rows, np.ones(count), rcond=None)
            if rank < 2:
                return None
            return float(solution[0]), float(solution[1])
        if count == 1:
            a = int(np.flatnonzero(active)[0])
            coef_v = self.coef[violators]
            scale = self.cost * float(np.sum(coef_v * (self.t[violators] - self.t[a])))
            return scale, 1.0 / self.coef[a] - scale * self.t[a]
        return None


def solve_direction(
    data: Dataset,
    direction,
    cost: float,
    sigma_mode: SigmaMode = SigmaMode.NORMALIZED,
    sigmas: Optional[Tuple[float, float]] = None,
) -> DirectionSolution:
    """Optimal (r, beta0) for beta restricted to the ray along `direction`."""
    u = unit_normal(direction)
    if sigmas is None:
        neg, pos = class_sigmas(data, u, sigma_mode)
        sigmas = (neg.sigma, pos.sigma)
    sigma_neg, sigma_pos = sigmas
    proj = _Projection(data, u, cost, sigma_neg, sigma_pos)

    limit = float(np.sqrt(2.0 * proj.reduced(0.0)))
    found = minimize_scalar(
        proj.reduced,
        bounds=(0.0, limit),
        method="bounded",
        options={"xatol": 1e-12 * max(1.0, limit), "maxiter": 500},
    )
    r = float(found.x)
    b = proj.best_offset(r)
    value = proj.objective(r, b)

    step = proj.active_set_step(r, b)
    if step is not None:
        r_exact, b_exact = step
        if r_exact >= 0.0:
            exact_value = proj.objective(r_exact, b_exact)
            if exact_value <= value + 1e-12 * max(1.0, abs(value)):
                r, b, value = r_exact, b_exact, exact_value

    return DirectionSolution(
        direction=u,
        scale=r,
        offset=b,
        objective=value,
        sigma_neg=float(sigma_neg),
        sigma_pos=float(sigma_pos),
    )


def polish_direction(
    data: Dataset,
    start,
    cost: float,
    sigma_mode: SigmaMode = SigmaMode.NORMALIZED,
) -> DirectionSolution:
    """
    Minimize V(u) over unit directions with Nelder-Mead, starting at `start`.

    Search coordinates z live in the tangent space at the start direction,
    u(z) = normalize(u0 + B z). Returns the better of the start and the
    search result.
    """
    u0 = unit_normal(start)
    initial = solve_direction(data, u0, cost, sigma_mode)
    p = u0.shape[0]
    if p == 1:
        return initial

    basis = null_space(u0[None, :])
    dim = basis.shape[1]

    def reduced(z: np.ndarray) -> float:
        return solve_direction(data, u0 + basis @ z, cost, sigma_mode).objective

    simplex = np.vstack([np.zeros(dim), SIMPLEX_STEP * np.eye(dim)])
    result = minimize(
        reduced,
        np.zeros(dim),
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "xatol": 1e-12,
            "fatol": 1e-15 * max(1.0, initial.objective),
            "maxiter": 200 * p,
            "maxfev": 400 * p,
        },
    )
    polished = solve_direction(data, u0 + basis @ result.x, cost, sigma_mode)
    logger.debug(
        "direction_polish_complete",
        extra={
            "evaluations": int(result.nfev),
            "objective": polished.objective,
        },
    )
    if polished.objective < initial.objective:
        return polished
    return initial
