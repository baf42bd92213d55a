"""
Tests for smoothed primal descent.
"""

import numpy as np
import pytest

from varsvm.core.models import Dataset, Hyperplane, InvalidHyperplaneError
from varsvm.solvers.classical import solve_classical
from varsvm.solvers.config import SolverConfig
from varsvm.solvers.refine import gradient_descent_refine
from varsvm.solvers.variance import solve_variance, variance_primal_objective


def _create_four_point() -> Dataset:
    return Dataset(points=[[-3.0], [-1.0], [2.0], [6.0]], labels=[-1, -1, 1, 1])


def _create_clouds(seed: int = 4) -> Dataset:
    rng = np.random.default_rng(seed)
    points = np.vstack([rng.standard_normal((20, 2)) * [0.5, 1.5], rng.standard_normal((20, 2)) + 2.0])
    return Dataset(points=points, labels=np.concatenate([-np.ones(20), np.ones(20)]))


def test_descent_from_classical_start_improves_objective():
    """The classical boundary is not optimal for the variance objective."""
    data = _create_four_point()
    start = solve_classical(data).hyperplane

    result = gradient_descent_refine(data, start)

    assert result.start_objective == pytest.approx(variance_primal_objective(data, start, 1.0))
    assert result.objective < result.start_objective
    assert result.steps >= 1


def test_smoothed_path_is_monotone():
    data = _create_clouds()
    start = solve_classical(data).hyperplane

    result = gradient_descent_refine(data, start, SolverConfig(smoothing=1e-3), max_steps=50)

    path = np.array(result.path)
    assert len(path) == result.steps + 1
    assert np.all(np.diff(path) <= 0.0)
    assert result.steps <= 50


def test_descent_cannot_beat_the_solver_by_much():
    data = _create_clouds()
    config = SolverConfig(cost=1.0)
    model = solve_variance(data, config)

    result = gradient_descent_refine(data, model.hyperplane, config)

    assert result.objective <= result.start_objective
    assert result.start_objective - result.objective <= 1e-4 * max(1.0, result.start_objective)


def test_zero_normal_start_is_rejected():
    with pytest.raises(InvalidHyperplaneError):
        gradient_descent_refine(_create_four_point(), Hyperplane(beta=[0.0], beta0=1.0))


def test_descent_from_rotated_solution_returns_toward_it():
    """Rotating the solved normal by 5 degrees raises the objective; descent brings it back down."""
    data = _create_clouds()
    config = SolverConfig(cost=1.0)
    model = solve_variance(data, config)
    angle = np.deg2rad(5.0)
    rotation = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
    start = Hyperplane(beta=rotation @ model.hyperplane.beta, beta0=model.hyperplane.beta0)

    result = gradient_descent_refine(data, start, config)

    assert result.start_objective > model.objective
    assert result.steps >= 1
    assert result.objective < result.start_objective
    assert result.objective - model.objective < result.start_objective - model.objective
    assert result.objective >= model.objective - 1e-4 * max(1.0, model.objective)
    assert np.all(np.diff(np.array(result.path)) <= 0.0)
