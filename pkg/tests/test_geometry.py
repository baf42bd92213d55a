"""
Tests for the decision function, directional sigmas and margin reports.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from varsvm.core.geometry import (
    class_margin,
    class_sigma,
    class_sigmas,
    class_stats,
    classify,
    classify_many,
    decision_value,
    margin_report,
    sigma_floor,
    sigma_gradient,
    unit_normal,
)
from varsvm.core.models import (
    Dataset,
    DatasetError,
    GradientMode,
    Hyperplane,
    InvalidHyperplaneError,
    MissingClassError,
    SigmaMode,
)


def _create_four_point() -> Dataset:
    """Two classes on a line: {-3, -1} and {2, 6}."""
    return Dataset(points=[[-3.0], [-1.0], [2.0], [6.0]], labels=[-1, -1, 1, 1])


def _create_correlated(seed: int = 3) -> Dataset:
    rng = np.random.default_rng(seed)
    mixing = np.array([[1.0, 0.6, 0.0], [0.0, 0.8, 0.3], [0.2, 0.0, 0.5]])
    negative = rng.standard_normal((30, 3)) @ mixing
    positive = rng.standard_normal((25, 3)) @ mixing.T * 2.0 + 4.0
    return Dataset(
        points=np.vstack([negative, positive]),
        labels=np.concatenate([-np.ones(30), np.ones(25)]),
    )


def test_boundary_point_is_labeled_positive():
    """A point with decision value exactly zero gets label +1."""
    h = Hyperplane(beta=[2.0], beta0=-1.0)

    assert decision_value(h, [0.5]) == 0.0
    assert classify(h, [0.5]) == 1
    assert classify(h, [0.4999]) == -1
    assert list(classify_many(h, [[0.5], [0.0], [3.0]])) == [1, -1, 1]


def test_zero_normal_is_rejected():
    with pytest.raises(InvalidHyperplaneError):
        classify(Hyperplane(beta=[0.0, 0.0], beta0=1.0), [1.0, 2.0])
    with pytest.raises(InvalidHyperplaneError):
        unit_normal([0.0])


def test_dataset_rejects_bad_labels_and_shapes():
    with pytest.raises(DatasetError):
        Dataset(points=[[1.0], [2.0]], labels=[1, 0])
    with pytest.raises(DatasetError):
        Dataset(points=[[1.0], [2.0]], labels=[1])
    with pytest.raises(DatasetError):
        Dataset(points=[[1.0], [np.nan]], labels=[1, -1])


def test_dataset_arrays_are_read_only():
    data = _create_four_point()

    with pytest.raises(ValueError):
        data.points[0, 0] = 10.0


def test_missing_class_raises():
    data = Dataset(points=[[1.0], [2.0]], labels=[1, 1])

    with pytest.raises(MissingClassError):
        data.require_both_classes()
    with pytest.raises(MissingClassError):
        class_sigma(data, -1, [1.0])


def test_four_point_class_sigmas():
    """Normalized sigma is 1 for {-3, -1} and 2 for {2, 6}."""
    neg, pos = class_sigmas(_create_four_point(), [1.0])

    assert neg.sigma == pytest.approx(1.0)
    assert pos.sigma == pytest.approx(2.0)
    assert neg.count == 2
    assert_allclose(pos.mean, [4.0])
    assert not neg.at_floor


def test_paper_literal_sigma_keeps_bare_sum():
    """Paper-literal sigma is sqrt(n) times the normalized one."""
    data = _create_four_point()

    literal = class_sigma(data, 1, [1.0], SigmaMode.PAPER_LITERAL)
    normalized = class_sigma(data, 1, [1.0], SigmaMode.NORMALIZED)

    assert literal == pytest.approx(np.sqrt(2.0) * normalized)


def test_sigma_ignores_normal_scale_and_sign():
    data = _create_correlated()
    beta = np.array([0.3, -1.2, 0.7])

    reference = class_sigma(data, 1, beta)
    assert class_sigma(data, 1, 17.0 * beta) == pytest.approx(reference, rel=1e-12)
    assert class_sigma(data, 1, -beta) == pytest.approx(reference, rel=1e-12)


def test_sigma_floor_applies_to_degenerate_class():
    """A class of identical points sits on the floor and reports it."""
    data = Dataset(
        points=[[0.0, 0.0], [0.0, 0.0], [3.0, 1.0], [4.0, 2.0]],
        labels=[-1, -1, 1, 1],
    )

    stats = class_stats(data, -1, [1.0, 1.0])

    assert stats.at_floor
    assert stats.sigma == pytest.approx(sigma_floor(data))
    assert sigma_floor(data) == pytest.approx(4e-8)
    assert class_sigma(data, -1, [1.0, 1.0], apply_floor=False) == 0.0


def test_sigma_floor_when_all_points_coincide():
    data = Dataset(points=[[2.0], [2.0]], labels=[-1, 1])

    assert sigma_floor(data) == pytest.approx(1e-8)


def test_exact_sigma_gradient_matches_central_differences():
    data = _create_correlated()
    beta = np.array([0.4, -1.0, 0.9])
    step = 1e-6

    analytic = sigma_gradient(data, 1, beta, mode=GradientMode.EXACT)
    numeric = np.zeros(3)
    for k in range(3):
        shift = np.zeros(3)
        shift[k] = step
        numeric[k] = (
            class_sigma(data, 1, beta + shift) - class_sigma(data, 1, beta - shift)
        ) / (2.0 * step)

    assert_allclose(analytic, numeric, rtol=1e-6, atol=1e-9)


def test_exact_sigma_gradient_is_orthogonal_to_beta():
    """sigma is scale invariant, so its gradient has no radial part."""
    data = _create_correlated()
    beta = np.array([1.0, 2.0, -0.5])

    gradient = sigma_gradient(data, -1, beta)

    assert gradient @ beta == pytest.approx(0.0, abs=1e-12)


def test_paper_gradient_agrees_on_coordinate_axes():
    data = _create_correlated()
    beta = np.array([0.0, 2.5, 0.0])

    exact = sigma_gradient(data, 1, beta, mode=GradientMode.EXACT)
    paper = sigma_gradient(data, 1, beta, mode=GradientMode.PAPER)

    assert_allclose(paper, exact, atol=1e-12)


def test_paper_gradient_differs_off_axis():
    data = _create_correlated()
    beta = np.array([1.0, 1.0, 1.0])

    exact = sigma_gradient(data, 1, beta, mode=GradientMode.EXACT)
    paper = sigma_gradient(data, 1, beta, mode=GradientMode.PAPER)

    assert np.linalg.norm(paper - exact) > 1e-3 * np.linalg.norm(exact)


def test_sigma_gradient_is_zero_on_floor():
    data = Dataset(points=[[0.0, 0.0], [0.0, 0.0], [3.0, 1.0], [4.0, 2.0]], labels=[-1, -1, 1, 1])

    assert_allclose(sigma_gradient(data, -1, [1.0, 0.5]), [0.0, 0.0])


def test_margin_report_on_four_point_line():
    """beta = 1, beta0 = 0 puts both sigma-normalized margins at 1."""
    report = margin_report(_create_four_point(), Hyperplane(beta=[1.0], beta0=0.0))

    assert report.margin_neg == pytest.approx(1.0)
    assert report.margin_pos == pytest.approx(1.0)
    assert report.ratio_gap == pytest.approx(0.0, abs=1e-15)
    assert report.distance_neg == pytest.approx(1.0)
    assert report.distance_pos == pytest.approx(2.0)
    assert report.sigma_pos == pytest.approx(2.0)


def test_euclidean_ratio_gap_is_ratio_gap_over_norm():
    data = _create_correlated()
    h = Hyperplane(beta=[0.5, 1.5, -0.2], beta0=-2.0)

    report = margin_report(data, h)

    assert report.euclidean_ratio_gap == pytest.approx(report.ratio_gap / h.norm, rel=1e-9, abs=1e-12)


def test_boundary_position_is_scale_free():
    h = Hyperplane(beta=[3.0, 4.0], beta0=-10.0)

    assert h.boundary_position == pytest.approx(2.0)
    assert h.scaled(7.0).boundary_position == pytest.approx(2.0)
    assert h.negated().boundary_position == pytest.approx(-2.0)


@pytest.mark.parametrize(
    "beta, beta0, x, expected",
    [
        ([1.0, 0.0], 0.0, [0.0, 5.0], 0.0),
        ([1.0, 0.0], -1.0, [3.0, 2.0], 2.0),
        ([2.0, 1.0], 0.5, [1.0, 1.0], 3.5),
    ],
)
def test_decision_value_is_affine(beta, beta0, x, expected):
    assert decision_value(Hyperplane(beta=beta, beta0=beta0), x) == pytest.approx(expected)


def test_square_class_sigma_matches_projection_std():
    """Projecting the square onto (1,1)/sqrt(2) gives a population std of 1."""
    data = Dataset(
        points=[[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [2.0, 2.0], [9.0, 9.0]],
        labels=[1, 1, 1, 1, -1],
    )
    members = data.class_points(1)
    projections = members @ (np.array([1.0, 1.0]) / np.sqrt(2.0))

    assert class_sigma(data, 1, [1.0, 1.0]) == pytest.approx(float(np.std(projections)))
    assert class_sigma(data, 1, [1.0, 1.0]) == pytest.approx(1.0)


def test_class_margin_is_sigma_normalized():
    data = _create_four_point()

    assert class_margin(data, 1, Hyperplane(beta=[1.0], beta0=0.0)) == pytest.approx(1.0)
    assert class_margin(data, 1, Hyperplane(beta=[1.0], beta0=-2.0)) == pytest.approx(0.0)
    assert class_margin(data, 1, Hyperplane(beta=[1.0], beta0=-4.0)) < 0.0
