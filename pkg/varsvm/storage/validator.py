"""
Document Validator

Checks raw JSON documents (generator specs and model files) before they
are turned into domain objects.

Design Principles:
- Validator does NOT modify data (immutable inputs)
- Returns structured results (no exceptions for expected errors)
- Distinguishes fatal errors from warnings
- Every issue names its location (e.g. "classes[1].covariance")
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, List

import numpy as np

MODEL_FORMAT_VERSION = 1
SYMMETRY_TOL = 1e-12

SPEC_FIELDS = ("mean", "covariance", "count", "label")
MODEL_FIELDS = (
    "format_version",
    "variant",
    "beta",
    "beta0",
    "sigmas",
    "config",
    "provenance",
    "training",
)
CONFIG_FIELDS = (
    "cost",
    "kkt_tol",
    "max_passes",
    "sigma_mode",
    "outer_tol",
    "sigma_tol",
    "max_outer",
    "gradient_mode",
    "smoothing",
    "restarts",
    "seed",
)
PROVENANCE_FIELDS = ("dataset_hash", "seed", "timestamp")
TRAINING_FIELDS = ("objective", "kkt_residual", "iterations", "converged")


@dataclass(frozen=True)
class ValidationIssue:
    """
    Single validation issue.

    Fields:
    - code: machine-readable code (e.g., "NON_PSD_COVARIANCE")
    - message: human-readable description
    - location: where it occurred (e.g., "classes[0].mean")
    - severity: "fatal" or "warning"
    """

    code: str
    message: str
    location: str
    severity: str


@dataclass(frozen=True)
class ValidationResult:
    """
    Fields:
    - passed: True if no fatal issues (warnings are acceptable)
    - issues: all issues, fatal and warning
    - fatal_count: number of fatal issues
    - warning_count: number of warnings
    """

    passed: bool
    issues: List[ValidationIssue]
    fatal_count: int
    warning_count: int

    @property
    def first_fatal(self) -> ValidationIssue | None:
        return next((i for i in self.issues if i.severity == "fatal"), None)


def _result(issues: List[ValidationIssue]) -> ValidationResult:
    fatal_count = sum(1 for i in issues if i.severity == "fatal")
    warning_count = sum(1 for i in issues if i.severity == "warning")
    return ValidationResult(
        passed=(fatal_count == 0),
        issues=issues,
        fatal_count=fatal_count,
        warning_count=warning_count,
    )


def _fatal(code: str, message: str, location: str) -> ValidationIssue:
    return ValidationIssue(code=code, message=message, location=location, severity="fatal")


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def _is_vector(value: Any) -> bool:
    return isinstance(value, list) and len(value) > 0 and all(_is_number(v) for v in value)


def _at(where: str, key: str) -> str:
    return f"{where}.{key}" if where else key


# =============================================================================
# GENERATOR SPECS
# =============================================================================


def validate_gaussian_specs(raw: Any) -> ValidationResult:
    """
    Validate a `gen` spec document.

    Expected shape:
    {"classes": [{"mean": [...], "covariance": [[...]], "count": n, "label": -1|1}, ...]}
    with exactly two classes, one per label, sharing a dimension.

    Does NOT raise exceptions (issues returned in result).
    """
    issues: List[ValidationIssue] = []
    if not isinstance(raw, dict):
        return _result([_fatal("NOT_AN_OBJECT", "spec must be a JSON object", "$")])
    classes = raw.get("classes")
    if not isinstance(classes, list):
        return _result([_fatal("MISSING_FIELD", "spec needs a 'classes' list", "classes")])
    if len(classes) != 2:
        issues.append(
            _fatal("CLASS_COUNT", f"expected 2 classes, got {len(classes)}", "classes")
        )
    for key in raw:
        if key != "classes":
            issues.append(
                ValidationIssue("UNKNOWN_FIELD", f"unknown field '{key}'", key, "warning")
            )

    dimension = None
    labels = []
    for index, block in enumerate(classes):
        where = f"classes[{index}]"
        block_issues = _validate_class_block(block, where)
        issues.extend(block_issues)
        if block_issues and any(i.severity == "fatal" for i in block_issues):
            continue
        if dimension is None:
            dimension = len(block["mean"])
        elif len(block["mean"]) != dimension:
            issues.append(
                _fatal(
                    "DIMENSION_MISMATCH",
                    f"mean has {len(block['mean'])} entries, expected {dimension}",
                    _at(where, "mean"),
                )
            )
        if block["label"] in labels:
            issues.append(
                _fatal("DUPLICATE_LABEL", f"label {block['label']} used twice", _at(where, "label"))
            )
        labels.append(block["label"])

    return _result(issues)


def validate_class_spec(block: Any) -> ValidationResult:
    """Validate a single class block; locations are bare field names."""
    return _result(_validate_class_block(block, ""))


def _validate_class_block(block: Any, where: str) -> List[ValidationIssue]:
    if not isinstance(block, dict):
        return [_fatal("NOT_AN_OBJECT", "class block must be an object", where or "$")]
    issues: List[ValidationIssue] = []
    for key in SPEC_FIELDS:
        if key not in block:
            issues.append(_fatal("MISSING_FIELD", f"missing '{key}'", _at(where, key)))
    for key in block:
        if key not in SPEC_FIELDS:
            issues.append(
                ValidationIssue("UNKNOWN_FIELD", f"unknown field '{key}'", _at(where, key), "warning")
            )
    if issues and any(i.severity == "fatal" for i in issues):
        return issues

    mean = block["mean"]
    if not _is_vector(mean):
        issues.append(
            _fatal("INVALID_MEAN", "mean must be a non-empty list of finite numbers", _at(where, "mean"))
        )
        return issues

    count = block["count"]
    if isinstance(count, bool) or not isinstance(count, int) or count < 1:
        issues.append(_fatal("INVALID_COUNT", "count must be an integer >= 1", _at(where, "count")))
    elif count == 1:
        issues.append(
            ValidationIssue(
                "SINGLE_POINT_CLASS",
                "a single-point class has zero spread; sigma will sit on the floor",
                _at(where, "count"),
                "warning",
            )
        )

    label = block["label"]
    if isinstance(label, bool) or label not in (-1, 1):
        issues.append(_fatal("INVALID_LABEL", "label must be -1 or 1", _at(where, "label")))

    issues.extend(_validate_covariance(block["covariance"], len(mean), _at(where, "covariance")))
    return issues


def _validate_covariance(covariance: Any, dimension: int, where: str) -> List[ValidationIssue]:
    if (
        not isinstance(covariance, list)
        or len(covariance) != dimension
        or not all(isinstance(row, list) and len(row) == dimension for row in covariance)
        or not all(_is_number(v) for row in covariance for v in row)
    ):
        return [
            _fatal(
                "INVALID_COVARIANCE",
                f"covariance must be a {dimension}x{dimension} matrix of finite numbers",
                where,
            )
        ]
    matrix = np.asarray(covariance, dtype=float)
    scale = max(1.0, float(np.max(np.abs(matrix))))
    if np.max(np.abs(matrix - matrix.T)) > SYMMETRY_TOL * scale:
        return [_fatal("ASYMMETRIC_COVARIANCE", "covariance must be symmetric", where)]
    eigenvalues = np.linalg.eigvalsh(matrix)
    if eigenvalues[0] < -SYMMETRY_TOL * scale:
        return [
            _fatal(
                "NON_PSD_COVARIANCE",
                f"covariance has negative eigenvalue {eigenvalues[0]:.3g}",
                where,
            )
        ]
    return []


# =============================================================================
# MODEL DOCUMENTS
# =============================================================================


def validate_model_document(raw: Any) -> ValidationResult:
    """
    Validate a model JSON document.

    Unknown fields are fatal at every level. A format_version other than
    the supported one is reported with code UNSUPPORTED_VERSION.

    Does NOT raise exceptions (issues returned in result).
    """
    if not isinstance(raw, dict):
        return _result([_fatal("NOT_AN_OBJECT", "model must be a JSON object", "$")])

    issues: List[ValidationIssue] = []
    issues.extend(_check_fields(raw, MODEL_FIELDS, ""))
    if issues:
        return _result(issues)

    version = raw["format_version"]
    if isinstance(version, bool) or not isinstance(version, int):
        issues.append(_fatal("INVALID_VERSION", "format_version must be an integer", "format_version"))
    elif version != MODEL_FORMAT_VERSION:
        issues.append(
            _fatal(
                "UNSUPPORTED_VERSION",
                f"format_version {version} is not supported (expected {MODEL_FORMAT_VERSION})",
                "format_version",
            )
        )

    variant = raw["variant"]
    if variant not in ("classical", "variance"):
        issues.append(_fatal("INVALID_VARIANT", "variant must be classical or variance", "variant"))
    if not _is_vector(raw["beta"]):
        issues.append(_fatal("INVALID_BETA", "beta must be a non-empty list of finite numbers", "beta"))
    if not _is_number(raw["beta0"]):
        issues.append(_fatal("INVALID_BETA0", "beta0 must be a finite number", "beta0"))

    sigmas = raw["sigmas"]
    if variant == "variance":
        if not (_is_vector(sigmas) and len(sigmas) == 2 and min(sigmas) > 0):
            issues.append(
                _fatal("INVALID_SIGMAS", "variance models need two positive sigmas", "sigmas")
            )
    elif sigmas is not None:
        issues.append(_fatal("INVALID_SIGMAS", "classical models carry sigmas = null", "sigmas"))

    for name, allowed in (
        ("config", CONFIG_FIELDS),
        ("provenance", PROVENANCE_FIELDS),
        ("training", TRAINING_FIELDS),
    ):
        block = raw[name]
        if not isinstance(block, dict):
            issues.append(_fatal("NOT_AN_OBJECT", f"{name} must be an object", name))
            continue
        issues.extend(_check_fields(block, allowed, f"{name}."))

    return _result(issues)


def _check_fields(block: dict, allowed, prefix: str) -> List[ValidationIssue]:
    issues = []
    for key in block:
        if key not in allowed:
            issues.append(_fatal("UNKNOWN_FIELD", f"unknown field '{key}'", f"{prefix}{key}"))
    for key in allowed:
        if key not in block:
            issues.append(_fatal("MISSING_FIELD", f"missing '{key}'", f"{prefix}{key}"))
    return issues
