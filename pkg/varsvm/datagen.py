"""
Seeded two-class Gaussian generator.

Points come from numpy's PCG64 generator seeded explicitly; each class is
mean + z @ L.T with z standard normal and L = V diag(sqrt(w)) from the
symmetric eigendecomposition of its covariance. Classes are drawn in spec
order, so (specs, seed) fixes the output bit for bit.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, List, Sequence

import numpy as np

from varsvm.core.models import Dataset
from varsvm.storage.validator import validate_class_spec, validate_gaussian_specs

logger = logging.getLogger(__name__)

GENERATOR_VERSION = "pcg64-eigh-v1"


class GaussianSpecError(ValueError):
    """Raised for a malformed class spec; `.field` names the offending field."""

    def __init__(self, message: str, field: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class GaussianSpec:
    """
    One Gaussian class.

    Fields:
    - mean: (p,) center
    - covariance: (p, p) symmetric positive-semidefinite matrix
    - count: number of points (>= 1)
    - label: -1 or +1
    """

    mean: np.ndarray
    covariance: np.ndarray
    count: int
    label: int

    def __post_init__(self) -> None:
        count = int(self.count) if isinstance(self.count, np.integer) else self.count
        label = int(self.label) if isinstance(self.label, np.integer) else self.label
        raw = {
            "mean": np.asarray(self.mean, dtype=float).reshape(-1).tolist(),
            "covariance": np.asarray(self.covariance, dtype=float).tolist(),
            "count": count,
            "label": label,
        }
        issue = validate_class_spec(raw).first_fatal
        if issue is not None:
            raise GaussianSpecError(issue.message, issue.location)
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=float).reshape(-1))
        object.__setattr__(self, "covariance", np.asarray(self.covariance, dtype=float))
        object.__setattr__(self, "count", int(self.count))
        object.__setattr__(self, "label", int(self.label))

    @property
    def n_features(self) -> int:
        return int(self.mean.shape[0])

    @classmethod
    def from_dict(cls, raw: dict) -> "GaussianSpec":
        return cls(
            mean=raw["mean"],
            covariance=raw["covariance"],
            count=raw["count"],
            label=raw["label"],
        )

    def to_dict(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "covariance": self.covariance.tolist(),
            "count": self.count,
            "label": self.label,
        }


def load_gaussian_specs(path: str | Path) -> List[GaussianSpec]:
    """
    Read and validate a `gen` spec file.

    Raises:
        GaussianSpecError: unreadable JSON or the first fatal validation issue
    """
    try:
        raw: Any = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise GaussianSpecError(f"not valid JSON ({exc.msg} at line {exc.lineno})", "$") from exc
    except OSError as exc:
        raise GaussianSpecError(f"cannot read spec file ({exc})", "$") from exc

    result = validate_gaussian_specs(raw)
    for issue in result.issues:
        if issue.severity == "warning":
            logger.warning("gen_spec_warning", extra={"path": issue.location, "check": issue.code})
    issue = result.first_fatal
    if issue is not None:
        raise GaussianSpecError(issue.message, issue.location)
    return [GaussianSpec.from_dict(block) for block in raw["classes"]]


def _factor(covariance: np.ndarray) -> np.ndarray:
    eigenvalues, eigenvectors = np.linalg.eigh(covariance)
    return eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))


def generate(specs: Sequence[GaussianSpec], seed: int = 0) -> Dataset:
    """
    Draw one dataset from two Gaussian class specs.

    Raises:
        GaussianSpecError: not exactly one spec per label, or mismatched dimensions
    """
    if len(specs) != 2:
        raise GaussianSpecError(f"expected 2 class specs, got {len(specs)}", "classes")
    if {spec.label for spec in specs} != {-1, 1}:
        raise GaussianSpecError("need one class labeled -1 and one labeled 1", "classes[1].label")
    if specs[0].n_features != specs[1].n_features:
        raise GaussianSpecError("classes have different dimensions", "classes[1].mean")

    rng = np.random.default_rng(seed)
    blocks, labels = [], []
    for spec in specs:
        draws = rng.standard_normal((spec.count, spec.n_features))
        blocks.append(spec.mean + draws @ _factor(spec.covariance).T)
        labels.append(np.full(spec.count, spec.label))

    logger.info(
        "dataset_generated",
        extra={
            "seed": seed,
            "n_points": sum(spec.count for spec in specs),
            "n_features": specs[0].n_features,
        },
    )
    return Dataset(points=np.vstack(blocks), labels=np.concatenate(labels))


def mirror_dataset(points) -> Dataset:
    """
    Class +1 is `points`; class -1 is its reflection x_1 -> -x_1.

    The reflection maps each class onto the other, so the two classes have
    identical spread along every normal and its mirror image.
    """
    positive = np.asarray(points, dtype=float)
    if positive.ndim == 1:
        positive = positive.reshape(-1, 1)
    negative = positive.copy()
    negative[:, 0] = -negative[:, 0]
    n = positive.shape[0]
    return Dataset(
        points=np.vstack([negative, positive]),
        labels=np.concatenate([-np.ones(n, dtype=int), np.ones(n, dtype=int)]),
    )
