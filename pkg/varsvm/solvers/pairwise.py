"""
Pairwise dual ascent.

Solves

    max  sum_i q_i a_i - 1/2 sum_ij a_i a_j y_i y_j K_ij
    s.t. sum_i y_i a_i = 0,  0 <= a_i <= U_i

in the signed variables s_i = y_i a_i, whose bounds are [0, U_i] for
y_i = +1 and [-U_i, 0] for y_i = -1. Each update moves the maximal
violating pair (i, j) along e_i - e_j, so sum_i s_i stays exactly zero.

The classical soft-margin dual is q = 1, U = C. The frozen-sigma dual of
the variance-adjusted problem is q_i = sigma_i, U_i = C / sigma_i.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

logger = logging.getLogger(__name__)

TAU = 1e-12


@dataclass(frozen=True)
class PairwiseResult:
    """
    Fields:
    - signed: s = y * a at exit
    - gradient: q * y - K s at exit
    - bias: offset consistent with the KKT conditions at exit
    - updates: pair updates performed in this call
    - gap: max violation g_i - g_j of the last selection
    - converged: gap <= tol when the loop stopped
    """

    signed: np.ndarray
    gradient: np.ndarray
    bias: float
    updates: int
    gap: float
    converged: bool

    def multipliers(self, labels: np.ndarray) -> np.ndarray:
        """a_i = y_i s_i, clipped at zero against round-off."""
        return np.maximum(labels * self.signed, 0.0)


def _bounds(labels: np.ndarray, upper: np.ndarray):
    lower = np.where(labels > 0, 0.0, -upper)
    top = np.where(labels > 0, upper, 0.0)
    return lower, top


def _bias(signed, gradient, lower, top) -> float:
    free = (signed > lower) & (signed < top)
    if np.any(free):
        return float(np.mean(gradient[free]))
    up = signed < top
    low = signed > lower
    hi = np.max(gradient[up]) if np.any(up) else None
    lo = np.min(gradient[low]) if np.any(low) else None
    if hi is None and lo is None:
        return 0.0
    if hi is None:
        return float(lo)
    if lo is None:
        return float(hi)
    return 0.5 * float(hi + lo)


def maximize_dual(
    gram: np.ndarray,
    labels: np.ndarray,
    linear: np.ndarray,
    upper: np.ndarray,
    tol: float,
    max_updates: int,
    state: Optional[PairwiseResult] = None,
) -> PairwiseResult:
    """
    Run maximal-violating-pair updates until the pair gap drops to tol.

    Args:
        gram: (N, N) inner products K_ij
        labels: (N,) in {-1, +1}
        linear: (N,) q
        upper: (N,) box limits U
        tol: stop when max_i g_i - min_j g_j <= tol over the working sets
        max_updates: update budget for this call
        state: previous result to warm start from

    Returns:
        PairwiseResult at exit
    """
    labels = np.asarray(labels, dtype=float)
    upper = np.asarray(upper, dtype=float)
    lower, top = _bounds(labels, upper)

    if state is None:
        signed = np.zeros(labels.shape[0])
        gradient = np.asarray(linear, dtype=float) * labels
    else:
        signed = state.signed.copy()
        gradient = state.gradient.copy()

    diagonal = np.diag(gram)
    updates = 0
    gap = np.inf
    converged = False

    while True:
        up = signed < top
        low = signed > lower
        if not np.any(up) or not np.any(low):
            gap = 0.0
            converged = True
            break

        i = int(np.argmax(np.where(up, gradient, -np.inf)))
        j = int(np.argmin(np.where(low, gradient, np.inf)))
        gap = float(gradient[i] - gradient[j])
        if gap <= tol:
            converged = True
            break
        if updates >= max_updates:
            break

        curvature = diagonal[i] + diagonal[j] - 2.0 * gram[i, j]
        if curvature <= 0.0:
            curvature = TAU
        step = min(gap / curvature, top[i] - signed[i], signed[j] - lower[j])

        signed[i] += step
        signed[j] -= step
        # Snap to the box so the working sets stay exact.
        if top[i] - signed[i] <= 1e-15 * max(1.0, abs(top[i])):
            signed[i] = top[i]
        if signed[j] - lower[j] <= 1e-15 * max(1.0, abs(lower[j])):
            signed[j] = lower[j]
        gradient -= step * (gram[:, i] - gram[:, j])
        updates += 1

    logger.debug(
        "pairwise_ascent_stopped",
        extra={"iterations": updates, "converged": converged},
    )
    return PairwiseResult(
        signed=signed,
        gradient=gradient,
        bias=_bias(signed, gradient, lower, top),
        updates=updates,
        gap=gap,
        converged=converged,
    )
