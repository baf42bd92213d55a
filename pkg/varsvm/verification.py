"""
Verification Battery

Checks a dataset's trained models against brute-force references and
their own optimality conditions.

Design Principles:
- Never raises for a failing check (failures are report entries)
- Every entry carries the measured value and the threshold it was held to
- Oracle checks are gated on dimension and reported as skipped above p = 2
- Diagnostics that are expected to disagree are reported as "info"

Checks:
- oracle_classical / oracle_variance: solver margin vs grid oracle (p <= 2)
- oracle_dual_classical: solver objective vs dense SLSQP dual
- gradient_exact: Lagrangian gradient vs central differences
- gradient_paper: same with the printed sigma-gradient form (info)
- kkt_classical: classical KKT residual
- stationarity_variance: variance-adjusted stationarity residual
- ratio_equality: sigma-normalized class margins agree at the solution
- weak_duality: classical dual value <= primal value
- refine_variance: smoothed descent from the solution finds no better point
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional

import numpy as np

from varsvm.core.geometry import margin_report
from varsvm.core.models import Dataset, DatasetError, GradientMode
from varsvm.oracle import grid_bound, min_class_margin, oracle_1d, oracle_2d, oracle_dual
from varsvm.solvers.classical import (
    NonConvergenceError,
    dual_objective,
    kkt_residual,
    primal_objective,
    solve_classical,
)
from varsvm.solvers.config import SolverConfig
from varsvm.solvers.models import TrainedModel
from varsvm.solvers.refine import gradient_descent_refine
from varsvm.solvers.variance import finite_difference_check, solve_variance, stationarity_residuals

logger = logging.getLogger(__name__)

GRADIENT_TOL = 1e-5
STATIONARITY_TOL = 1e-5
RATIO_TOL = 1e-6
DUALITY_TOL = 1e-8
DUAL_ORACLE_TOL = 1e-4
REFINE_TOL = 1e-4
MARGIN_TOL = 1e-6
SEPARATION_TOL = 1e-6
MAX_DUAL_ORACLE_POINTS = 500


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INFO = "info"
    SKIPPED = "skipped"


@dataclass(frozen=True)
class VerificationCheck:
    """
    One entry of the verification report.

    Fields:
    - name: check identifier (e.g., "gradient_exact")
    - status: pass, fail, info or skipped
    - measured: value the check computed (None when skipped)
    - threshold: value it was held to (None for info/skipped)
    - detail: human-readable note
    """

    name: str
    status: CheckStatus
    measured: Optional[float]
    threshold: Optional[float]
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    """
    Fields:
    - passed: True if no check failed
    - checks: every check in run order
    - fail_count, info_count, skipped_count: per-status tallies
    """

    passed: bool
    checks: List[VerificationCheck]
    fail_count: int
    info_count: int
    skipped_count: int

    def check(self, name: str) -> VerificationCheck:
        return next(c for c in self.checks if c.name == name)


def _report(checks: List[VerificationCheck]) -> VerificationReport:
    fail_count = sum(1 for c in checks if c.status is CheckStatus.FAIL)
    return VerificationReport(
        passed=(fail_count == 0),
        checks=checks,
        fail_count=fail_count,
        info_count=sum(1 for c in checks if c.status is CheckStatus.INFO),
        skipped_count=sum(1 for c in checks if c.status is CheckStatus.SKIPPED),
    )


def _bounded(name: str, measured: float, threshold: float, detail: str = "") -> VerificationCheck:
    status = CheckStatus.PASS if measured <= threshold else CheckStatus.FAIL
    return VerificationCheck(name, status, float(measured), float(threshold), detail)


def _skipped(name: str, reason: str) -> VerificationCheck:
    return VerificationCheck(name, CheckStatus.SKIPPED, None, None, f"skipped: {reason}")


# =============================================================================
# ORACLE CHECKS
# =============================================================================


def _oracle_check(
    name: str,
    data: Dataset,
    model: TrainedModel,
    scaled: bool,
    config: SolverConfig,
) -> VerificationCheck:
    """
    Compare the solver's smaller class margin with the grid oracle's.

    Only meaningful in the hard-margin regime, where both maximize the
    smaller (sigma-scaled or Euclidean) class margin. The solver may beat
    the grid by at most the grid's error bound and may not trail it.
    """
    if data.n_features > 2:
        return _skipped(name, "p>2")
    if np.max(model.slacks) > SEPARATION_TOL:
        return _skipped(name, "training set not separated at this cost")

    try:
        if data.n_features == 1:
            result = oracle_1d(data, scaled=scaled, sigma_mode=config.sigma_mode)
        else:
            result = oracle_2d(data, scaled=scaled, sigma_mode=config.sigma_mode)
    except DatasetError as exc:
        return _skipped(name, str(exc))

    solver = min_class_margin(data, model.hyperplane, scaled=scaled, sigma_mode=config.sigma_mode)
    bound = grid_bound(data, result, config.sigma_mode)
    tol = MARGIN_TOL * max(1.0, abs(result.objective))
    measured = solver - result.objective
    ok = -tol <= measured <= bound + tol
    return VerificationCheck(
        name,
        CheckStatus.PASS if ok else CheckStatus.FAIL,
        float(measured),
        float(bound + tol),
        f"solver margin {solver:.12g}, {result.method} margin {result.objective:.12g}",
    )


def _dual_oracle_check(data: Dataset, model: TrainedModel, config: SolverConfig) -> VerificationCheck:
    name = "oracle_dual_classical"
    if data.n_points > MAX_DUAL_ORACLE_POINTS:
        return _skipped(name, f"N>{MAX_DUAL_ORACLE_POINTS}")
    reference = oracle_dual(data, config.cost)
    measured = abs(model.objective - reference.objective) / max(1.0, abs(reference.objective))
    return _bounded(
        name,
        measured,
        DUAL_ORACLE_TOL,
        f"solver {model.objective:.12g}, slsqp dual {reference.objective:.12g}",
    )


# =============================================================================
# OPTIMALITY CHECKS
# =============================================================================


def _gradient_checks(data: Dataset, model: TrainedModel, config: SolverConfig) -> List[VerificationCheck]:
    # Multipliers drawn away from the solution, where the Lagrangian gradient
    # is not near zero and a relative error is well defined.
    rng = np.random.default_rng(config.seed)
    trial_alphas = rng.uniform(0.0, config.cost, data.n_points)
    exact = finite_difference_check(
        data, model.hyperplane, trial_alphas, GradientMode.EXACT, sigma_mode=config.sigma_mode
    )
    paper = finite_difference_check(
        data, model.hyperplane, trial_alphas, GradientMode.PAPER, sigma_mode=config.sigma_mode
    )
    return [
        _bounded("gradient_exact", exact, GRADIENT_TOL, "relative error vs central differences"),
        VerificationCheck(
            "gradient_paper",
            CheckStatus.INFO,
            float(paper),
            None,
            "printed Hadamard sigma-gradient; disagreement off the coordinate axes is expected",
        ),
    ]


def _ratio_check(data: Dataset, model: TrainedModel, config: SolverConfig) -> VerificationCheck:
    report = margin_report(data, model.hyperplane, config.sigma_mode)
    scale = max(1.0, abs(report.margin_neg), abs(report.margin_pos))
    if np.max(model.slacks) > SEPARATION_TOL:
        return VerificationCheck(
            "ratio_equality",
            CheckStatus.INFO,
            float(report.ratio_gap),
            None,
            "soft-margin regime; class margins need not agree",
        )
    return _bounded(
        "ratio_equality",
        report.ratio_gap,
        RATIO_TOL * scale,
        f"margin_neg {report.margin_neg:.12g}, margin_pos {report.margin_pos:.12g}",
    )


def _duality_check(data: Dataset, model: TrainedModel, config: SolverConfig) -> VerificationCheck:
    primal = primal_objective(data, model.hyperplane, config.cost)
    dual = dual_objective(data, model.alphas)
    return _bounded(
        "weak_duality",
        dual - primal,
        DUALITY_TOL * max(1.0, abs(primal)),
        f"primal {primal:.12g}, dual {dual:.12g}",
    )


def _refine_check(data: Dataset, model: TrainedModel, config: SolverConfig) -> VerificationCheck:
    result = gradient_descent_refine(data, model.hyperplane, config)
    improvement = result.start_objective - result.objective
    return _bounded(
        "refine_variance",
        improvement / max(1.0, abs(result.start_objective)),
        REFINE_TOL,
        f"{result.steps} descent steps, stalled={result.stalled}",
    )


def _guarded(name: str, check: Callable[[], VerificationCheck]) -> VerificationCheck:
    try:
        return check()
    except (ArithmeticError, ValueError) as exc:
        logger.warning("verification_check_error", extra={"check": name})
        return VerificationCheck(name, CheckStatus.FAIL, None, None, f"error: {exc}")


# =============================================================================
# ENTRY POINT
# =============================================================================


def run_verification(data: Dataset, config: Optional[SolverConfig] = None) -> VerificationReport:
    """
    Train both variants and run every check.

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
    variance = solve_variance(data, config)

    checks: List[VerificationCheck] = [
        _guarded(
            "oracle_classical",
            lambda: _oracle_check("oracle_classical", data, classical, False, config),
        ),
        _guarded(
            "oracle_variance",
            lambda: _oracle_check("oracle_variance", data, variance, True, config),
        ),
        _guarded("oracle_dual_classical", lambda: _dual_oracle_check(data, classical, config)),
    ]
    try:
        checks.extend(_gradient_checks(data, variance, config))
    except (ArithmeticError, ValueError) as exc:
        checks.append(VerificationCheck("gradient_exact", CheckStatus.FAIL, None, None, f"error: {exc}"))
    checks.extend(
        [
            _bounded("kkt_classical", kkt_residual(data, classical, config.cost), config.kkt_tol),
            _bounded(
                "stationarity_variance",
                stationarity_residuals(data, variance).worst,
                STATIONARITY_TOL * max(1.0, variance.hyperplane.norm),
            ),
            _guarded("ratio_equality", lambda: _ratio_check(data, variance, config)),
            _guarded("weak_duality", lambda: _duality_check(data, classical, config)),
            _guarded("refine_variance", lambda: _refine_check(data, variance, config)),
        ]
    )

    report = _report(checks)
    for check in checks:
        logger.debug("verification_check", extra={"check": check.name, "objective": check.measured})
    logger.info(
        "verification_complete",
        extra={"converged": report.passed, "evaluations": len(checks)},
    )
    return report
