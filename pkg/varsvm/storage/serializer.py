"""
File Formats

Dataset CSV, model JSON and report JSON.

Design Principles:
- No solver logic (pure transformation)
- Stable output ordering (byte-identical output for identical input)
- Lossless numbers: CSV floats use %.17g, JSON floats use Python's
  shortest round-trip repr, so reading back reproduces every bit

Dataset CSV:
    f1,f2,...,fp,label
    one row per point, label last, LF line endings

Model JSON:
    {"format_version": 1, "variant": ..., "beta": [...], "beta0": ...,
     "sigmas": [neg, pos] | null, "config": {...}, "provenance": {...},
     "training": {...}}
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, fields, is_dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from varsvm.core.models import Dataset, DatasetError, Hyperplane
from varsvm.solvers.config import SolverConfig
from varsvm.solvers.models import TrainedModel, Variant

from .validator import MODEL_FORMAT_VERSION, validate_model_document


class DatasetFormatError(DatasetError):
    """Raised when a dataset file cannot be parsed."""


class ModelFormatError(ValueError):
    """Raised when a model document is malformed."""


class CompatibilityError(ValueError):
    """Raised when a model and a dataset (or a format version) do not match."""


@dataclass(frozen=True)
class Provenance:
    """
    Fields:
    - dataset_hash: sha256 of the training file bytes
    - seed: seed the solver ran with
    - timestamp: UTC ISO-8601 training time
    """

    dataset_hash: str
    seed: int
    timestamp: str


@dataclass(frozen=True)
class ModelFile:
    """
    Everything `train` persists.

    Fields:
    - variant: classical or variance
    - hyperplane: trained (beta, beta0)
    - sigmas: (sigma_neg, sigma_pos) for the variance variant, else None
    - config: SolverConfig used for training
    - provenance: where the model came from
    - objective, kkt_residual, iterations, converged: training summary
    - format_version: document version
    """

    variant: Variant
    hyperplane: Hyperplane
    sigmas: Optional[Tuple[float, float]]
    config: SolverConfig
    provenance: Provenance
    objective: float
    kkt_residual: float
    iterations: int
    converged: bool
    format_version: int = MODEL_FORMAT_VERSION

    @classmethod
    def from_trained(
        cls, model: TrainedModel, config: SolverConfig, provenance: Provenance
    ) -> "ModelFile":
        return cls(
            variant=model.variant,
            hyperplane=model.hyperplane,
            sigmas=model.sigmas,
            config=config,
            provenance=provenance,
            objective=model.objective,
            kkt_residual=model.kkt_residual,
            iterations=model.iterations,
            converged=model.converged,
        )


# =============================================================================
# DATASETS
# =============================================================================


def _format_float(value: float) -> str:
    return "%.17g" % value


def dataset_to_csv(data: Dataset) -> str:
    header = [f"f{k + 1}" for k in range(data.n_features)] + ["label"]
    lines = [",".join(header)]
    for row, label in zip(data.points, data.labels):
        lines.append(",".join([_format_float(v) for v in row] + [str(int(label))]))
    return "\n".join(lines) + "\n"


def write_dataset(data: Dataset, path: str | Path) -> None:
    Path(path).write_bytes(dataset_to_csv(data).encode("utf-8"))


def file_hash(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def parse_points(text: str, source: str = "<string>") -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """
    Parse dataset CSV text.

    The label column is optional, so files meant for prediction can omit it.

    Returns:
        (points (N, p), labels (N,) or None)

    Raises:
        DatasetFormatError: bad header, ragged row or non-numeric value
    """
    rows = list(csv.reader(io.StringIO(text)))
    rows = [row for row in rows if row]
    if not rows:
        raise DatasetFormatError(f"{source}: empty file")

    header = [cell.strip() for cell in rows[0]]
    has_labels = header[-1] == "label"
    features = header[:-1] if has_labels else header
    expected = [f"f{k + 1}" for k in range(len(features))]
    if not features or features != expected:
        raise DatasetFormatError(
            f"{source}: header must be {','.join(expected or ['f1'])}[,label], got {','.join(header)}"
        )

    width = len(header)
    points: List[List[float]] = []
    labels: List[int] = []
    for number, row in enumerate(rows[1:], start=2):
        if len(row) != width:
            raise DatasetFormatError(f"{source}:{number}: expected {width} columns, got {len(row)}")
        try:
            values = [float(cell) for cell in row[: len(features)]]
        except ValueError:
            raise DatasetFormatError(f"{source}:{number}: non-numeric coordinate") from None
        if not all(math.isfinite(v) for v in values):
            raise DatasetFormatError(f"{source}:{number}: coordinates must be finite")
        points.append(values)
        if has_labels:
            cell = row[-1].strip()
            if cell not in ("-1", "1", "+1"):
                raise DatasetFormatError(f"{source}:{number}: label must be -1 or 1, got {cell!r}")
            labels.append(int(cell))

    if not points:
        raise DatasetFormatError(f"{source}: no data rows")
    array = np.asarray(points, dtype=float).reshape(len(points), len(features))
    return array, (np.asarray(labels, dtype=np.int64) if has_labels else None)


def read_points(path: str | Path) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise DatasetFormatError(f"{path}: cannot read dataset ({exc})") from exc
    return parse_points(text, str(path))


def read_dataset(path: str | Path) -> Dataset:
    """Read a labeled dataset file."""
    points, labels = read_points(path)
    if labels is None:
        raise DatasetFormatError(f"{path}: a labeled dataset needs a 'label' column")
    return Dataset(points=points, labels=labels)


# =============================================================================
# MODELS
# =============================================================================


def serialize_model(model: ModelFile) -> Dict[str, Any]:
    return {
        "format_version": model.format_version,
        "variant": model.variant.value,
        "beta": [float(v) for v in model.hyperplane.beta],
        "beta0": float(model.hyperplane.beta0),
        "sigmas": None if model.sigmas is None else [float(s) for s in model.sigmas],
        "config": model.config.to_dict(),
        "provenance": {
            "dataset_hash": model.provenance.dataset_hash,
            "seed": model.provenance.seed,
            "timestamp": model.provenance.timestamp,
        },
        "training": {
            "objective": float(model.objective),
            "kkt_residual": float(model.kkt_residual),
            "iterations": int(model.iterations),
            "converged": bool(model.converged),
        },
    }


def deserialize_model(raw: Any) -> ModelFile:
    """
    Build a ModelFile from a parsed document.

    Raises:
        CompatibilityError: unsupported format_version
        ModelFormatError: any other validation failure
    """
    result = validate_model_document(raw)
    issue = result.first_fatal
    if issue is not None:
        if issue.code == "UNSUPPORTED_VERSION":
            raise CompatibilityError(issue.message)
        raise ModelFormatError(f"{issue.location}: {issue.message}")

    try:
        config = SolverConfig(**raw["config"])
    except (TypeError, ValueError) as exc:
        raise ModelFormatError(f"config: {exc}") from exc

    provenance = raw["provenance"]
    training = raw["training"]
    sigmas = raw["sigmas"]
    return ModelFile(
        format_version=raw["format_version"],
        variant=Variant(raw["variant"]),
        hyperplane=Hyperplane(beta=raw["beta"], beta0=raw["beta0"]),
        sigmas=None if sigmas is None else (float(sigmas[0]), float(sigmas[1])),
        config=config,
        provenance=Provenance(
            dataset_hash=str(provenance["dataset_hash"]),
            seed=int(provenance["seed"]),
            timestamp=str(provenance["timestamp"]),
        ),
        objective=float(training["objective"]),
        kkt_residual=float(training["kkt_residual"]),
        iterations=int(training["iterations"]),
        converged=bool(training["converged"]),
    )


def save_model(model: ModelFile, path: str | Path) -> None:
    Path(path).write_text(dumps(serialize_model(model)), encoding="utf-8")


def load_model(path: str | Path) -> ModelFile:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ModelFormatError(f"{path}: cannot read model ({exc})") from exc
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not valid JSON ({exc.msg})") from exc
    return deserialize_model(raw)


# =============================================================================
# REPORTS
# =============================================================================


def to_jsonable(value: Any) -> Any:
    """Plain JSON types from dataclasses, enums and numpy values."""
    if is_dataclass(value) and not isinstance(value, type):
        return {f.name: to_jsonable(getattr(value, f.name)) for f in fields(value)}
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def dumps(value: Any) -> str:
    """Deterministic JSON text (two-space indent, trailing newline)."""
    return json.dumps(to_jsonable(value), indent=2, allow_nan=False) + "\n"
