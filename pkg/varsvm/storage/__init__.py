"""
Storage Layer

Dataset CSV, model JSON and report JSON, plus structured validation of
raw documents.
"""

from .serializer import (
    CompatibilityError,
    DatasetFormatError,
    ModelFile,
    ModelFormatError,
    Provenance,
    dataset_to_csv,
    deserialize_model,
    dumps,
    file_hash,
    load_model,
    parse_points,
    read_dataset,
    read_points,
    save_model,
    serialize_model,
    to_jsonable,
    write_dataset,
)
from .validator import (
    ValidationIssue,
    ValidationResult,
    validate_class_spec,
    validate_gaussian_specs,
    validate_model_document,
)

__all__ = [
    "CompatibilityError",
    "DatasetFormatError",
    "ModelFile",
    "ModelFormatError",
    "Provenance",
    "ValidationIssue",
    "ValidationResult",
    "dataset_to_csv",
    "deserialize_model",
    "dumps",
    "file_hash",
    "load_model",
    "parse_points",
    "read_dataset",
    "read_points",
    "save_model",
    "serialize_model",
    "to_jsonable",
    "validate_class_spec",
    "validate_gaussian_specs",
    "validate_model_document",
    "write_dataset",
]
