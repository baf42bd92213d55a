"""
Tests for raw document validation.
"""

import copy

import pytest

from varsvm.storage.validator import (
    MODEL_FORMAT_VERSION,
    validate_class_spec,
    validate_gaussian_specs,
    validate_model_document,
)


def _create_spec() -> dict:
    return {
        "classes": [
            {"mean": [0.0], "covariance": [[1.0]], "count": 3, "label": -1},
            {"mean": [4.0], "covariance": [[2.0]], "count": 2, "label": 1},
        ]
    }


def _create_model_document() -> dict:
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "variant": "variance",
        "beta": [1.0],
        "beta0": 0.0,
        "sigmas": [1.0, 2.0],
        "config": {
            "cost": 1.0,
            "kkt_tol": 1e-8,
            "max_passes": 10000,
            "sigma_mode": "normalized",
            "outer_tol": 1e-10,
            "sigma_tol": 1e-10,
            "max_outer": 200,
            "gradient_mode": "exact",
            "smoothing": 1e-6,
            "restarts": 0,
            "seed": 0,
        },
        "provenance": {"dataset_hash": "ab" * 32, "seed": 0, "timestamp": "2026-01-01T00:00:00Z"},
        "training": {"objective": 0.5, "kkt_residual": 0.0, "iterations": 3, "converged": True},
    }


def _codes(result) -> list:
    return [issue.code for issue in result.issues]


def test_valid_spec_passes():
    result = validate_gaussian_specs(_create_spec())

    assert result.passed
    assert result.fatal_count == 0


def test_spec_needs_two_classes():
    raw = _create_spec()
    raw["classes"].pop()

    result = validate_gaussian_specs(raw)

    assert not result.passed
    assert result.first_fatal.code == "CLASS_COUNT"


def test_duplicate_label_is_fatal():
    raw = _create_spec()
    raw["classes"][1]["label"] = -1

    result = validate_gaussian_specs(raw)

    assert result.first_fatal.code == "DUPLICATE_LABEL"
    assert result.first_fatal.location == "classes[1].label"


def test_dimension_mismatch_is_fatal():
    raw = _create_spec()
    raw["classes"][1]["mean"] = [4.0, 0.0]
    raw["classes"][1]["covariance"] = [[1.0, 0.0], [0.0, 1.0]]

    result = validate_gaussian_specs(raw)

    assert result.first_fatal.code == "DIMENSION_MISMATCH"


@pytest.mark.parametrize(
    "field, value, code",
    [
        ("count", 0, "INVALID_COUNT"),
        ("count", True, "INVALID_COUNT"),
        ("label", 0, "INVALID_LABEL"),
        ("mean", [], "INVALID_MEAN"),
        ("covariance", [[1.0, 0.0]], "INVALID_COVARIANCE"),
        ("covariance", [[-1.0]], "NON_PSD_COVARIANCE"),
    ],
)
def test_bad_class_fields(field, value, code):
    raw = _create_spec()
    raw["classes"][0][field] = value

    result = validate_gaussian_specs(raw)

    assert result.first_fatal.code == code
    assert result.first_fatal.location == f"classes[0].{field}"


def test_asymmetric_covariance_is_fatal():
    block = {"mean": [0.0, 0.0], "covariance": [[1.0, 0.5], [0.0, 1.0]], "count": 2, "label": 1}

    result = validate_class_spec(block)

    assert result.first_fatal.code == "ASYMMETRIC_COVARIANCE"
    assert result.first_fatal.location == "covariance"


def test_single_point_class_is_a_warning():
    raw = _create_spec()
    raw["classes"][1]["count"] = 1

    result = validate_gaussian_specs(raw)

    assert result.passed
    assert result.warning_count == 1
    assert "SINGLE_POINT_CLASS" in _codes(result)


def test_unknown_spec_field_is_a_warning():
    raw = _create_spec()
    raw["classes"][0]["weight"] = 2

    result = validate_gaussian_specs(raw)

    assert result.passed
    assert result.issues[0].location == "classes[0].weight"


def test_valid_model_document_passes():
    assert validate_model_document(_create_model_document()).passed


def test_unknown_model_field_is_fatal():
    raw = _create_model_document()
    raw["kernel"] = "rbf"

    result = validate_model_document(raw)

    assert not result.passed
    assert result.first_fatal.code == "UNKNOWN_FIELD"
    assert result.first_fatal.location == "kernel"


def test_unknown_nested_model_field_is_fatal():
    raw = _create_model_document()
    raw["config"]["tolerance"] = 1e-3

    result = validate_model_document(raw)

    assert result.first_fatal.location == "config.tolerance"


def test_unsupported_version_has_its_own_code():
    raw = _create_model_document()
    raw["format_version"] = MODEL_FORMAT_VERSION + 1

    result = validate_model_document(raw)

    assert _codes(result) == ["UNSUPPORTED_VERSION"]


def test_classical_model_must_not_carry_sigmas():
    raw = _create_model_document()
    raw["variant"] = "classical"

    assert validate_model_document(raw).first_fatal.code == "INVALID_SIGMAS"
    raw["sigmas"] = None
    assert validate_model_document(raw).passed


def test_validator_does_not_modify_input():
    raw = _create_model_document()
    before = copy.deepcopy(raw)

    validate_model_document(raw)

    assert raw == before
