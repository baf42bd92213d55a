"""
Core Domain Models

Immutable data structures shared by every solver.

Design Principles:
- Frozen dataclasses (immutable)
- Arrays are stored as read-only float64/int64 copies
- Construction validates shape and content; nothing else happens here

Geometry (decision values, directional statistics, margins) lives in
`varsvm.core.geometry`.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

LABELS: Tuple[int, int] = (-1, 1)


class DatasetError(ValueError):
    """Raised when observations or labels violate the dataset contract."""


class MissingClassError(DatasetError):
    """Raised when an operation needs a class that has no members."""


class DegenerateSolutionError(DatasetError):
    """Raised when the optimal normal vanishes, so the data admit no separating direction."""


class InvalidHyperplaneError(ValueError):
    """Raised when a hyperplane with a zero normal is used."""


def _frozen_array(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Dataset:
    """
    Labeled observations.

    Fields:
    - points: (N, p) real coordinates
    - labels: (N,) values in {-1, +1}

    Invariants (checked on construction):
    - N >= 2, p >= 1
    - every coordinate finite
    - every label exactly -1 or +1

    Both labels are only required by training operations
    (see `require_both_classes`).
    """

    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=float)
        if points.ndim == 1:
            points = points.reshape(-1, 1)
        if points.ndim != 2:
            raise DatasetError(f"points must be a 2-D array, got {points.ndim} dimensions")
        labels = np.asarray(self.labels)
        if labels.ndim != 1 or labels.shape[0] != points.shape[0]:
            raise DatasetError(
                f"expected {points.shape[0]} labels, got shape {labels.shape}"
            )
        if points.shape[0] < 2:
            raise DatasetError("a dataset needs at least 2 observations")
        if points.shape[1] < 1:
            raise DatasetError("a dataset needs at least 1 feature")
        if not np.all(np.isfinite(points)):
            raise DatasetError("all coordinates must be finite")
        if not np.all(np.isin(labels, LABELS)):
            raise DatasetError("labels must be -1 or +1")

        object.__setattr__(self, "points", _frozen_array(points, np.float64))
        object.__setattr__(self, "labels", _frozen_array(labels, np.int64))

    @property
    def n_points(self) -> int:
        return int(self.points.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.points.shape[1])

    def class_mask(self, label: int) -> np.ndarray:
        return self.labels == label

    def class_points(self, label: int) -> np.ndarray:
        """Rows of one class; raises MissingClassError when empty."""
        if label not in LABELS:
            raise DatasetError(f"unknown class label {label!r}")
        members = self.points[self.class_mask(label)]
        if members.shape[0] == 0:
            raise MissingClassError(f"class {label:+d} has no observations")
        return members

    def require_both_classes(self) -> None:
        for label in LABELS:
            self.class_points(label)

    def with_labels(self, labels) -> "Dataset":
        return Dataset(points=self.points, labels=labels)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return np.array_equal(self.points, other.points) and np.array_equal(
            self.labels, other.labels
        )


@dataclass(frozen=True)
class Hyperplane:
    """
    Separating hyperplane {x : x.beta + beta0 = 0}.

    Fields:
    - beta: normal vector (p,)
    - beta0: offset

    A zero normal is representable (solvers can produce one for degenerate
    costs) but every geometric operation rejects it.
    """

    beta: np.ndarray
    beta0: float

    def __post_init__(self) -> None:
        beta = np.asarray(self.beta, dtype=float).reshape(-1)
        object.__setattr__(self, "beta", _frozen_array(beta, np.float64))
        object.__setattr__(self, "beta0", float(self.beta0))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.beta))

    def require_valid(self) -> None:
        if not np.all(np.isfinite(self.beta)) or not np.isfinite(self.beta0):
            raise InvalidHyperplaneError("hyperplane coefficients must be finite")
        if not np.any(self.beta != 0.0):
            raise InvalidHyperplaneError("hyperplane normal beta must be nonzero")

    def scaled(self, factor: float) -> "Hyperplane":
        return Hyperplane(beta=self.beta * factor, beta0=self.beta0 * factor)

    def negated(self) -> "Hyperplane":
        return Hyperplane(beta=-self.beta, beta0=-self.beta0)

    @property
    def boundary_position(self) -> float:
        """Signed position of the boundary along the unit normal: -beta0/||beta||."""
        self.require_valid()
        return -self.beta0 / self.norm

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Hyperplane):
            return NotImplemented
        return np.array_equal(self.beta, other.beta) and self.beta0 == other.beta0


@dataclass(frozen=True)
class ClassStats:
    """
    Per-class statistics along a direction.

    Fields:
    - label: class identifier (-1 or +1)
    - count: number of members
    - mean: per-class mean vector
    - sigma: directional standard deviation (after the sigma floor)
    - at_floor: True when the raw statistic fell below the sigma floor
    """

    label: int
    count: int
    mean: np.ndarray
    sigma: float
    at_floor: bool = False


@dataclass(frozen=True)
class MarginReport:
    """
    Per-class margins of a hyperplane.

    Fields:
    - margin_neg, margin_pos: sigma-normalized functional margins
      min_i y_i (x_i.beta + beta0) / sigma_{y_i}
    - sigma_neg, sigma_pos: directional standard deviations used above
    - ratio_gap: |margin_neg - margin_pos|
    - distance_neg, distance_pos: Euclidean signed distances
      min_i y_i (x_i.beta + beta0) / ||beta||
    - euclidean_ratio_gap: |distance_neg/sigma_neg - distance_pos/sigma_pos|
      (equals ratio_gap / ||beta||)
    """

    margin_neg: float
    margin_pos: float
    sigma_neg: float
    sigma_pos: float
    ratio_gap: float
    distance_neg: float
    distance_pos: float
    euclidean_ratio_gap: float


class SigmaMode(str, Enum):
    """How the directional standard deviation is normalized."""

    NORMALIZED = "normalized"
    PAPER_LITERAL = "paper-literal"


class GradientMode(str, Enum):
    """Which expression is used for the gradient of sigma."""

    EXACT = "exact"
    PAPER = "paper"
