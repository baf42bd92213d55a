"""
Core Layer

Domain types and the geometry every solver shares: decision values,
directional class standard deviations and sigma-normalized margins.
"""

from .geometry import (
    class_margin,
    class_sigma,
    class_sigmas,
    class_stats,
    classify,
    classify_many,
    decision_value,
    decision_values,
    direction_cosine,
    margin_report,
    point_sigmas,
    sigma_floor,
    sigma_gradient,
)
from .models import (
    LABELS,
    ClassStats,
    Dataset,
    DatasetError,
    DegenerateSolutionError,
    GradientMode,
    Hyperplane,
    InvalidHyperplaneError,
    MarginReport,
    MissingClassError,
    SigmaMode,
)

__all__ = [
    "LABELS",
    "ClassStats",
    "Dataset",
    "DatasetError",
    "DegenerateSolutionError",
    "GradientMode",
    "Hyperplane",
    "InvalidHyperplaneError",
    "MarginReport",
    "MissingClassError",
    "SigmaMode",
    "class_margin",
    "class_sigma",
    "class_sigmas",
    "class_stats",
    "classify",
    "classify_many",
    "decision_value",
    "decision_values",
    "direction_cosine",
    "margin_report",
    "point_sigmas",
    "sigma_floor",
    "sigma_gradient",
]
