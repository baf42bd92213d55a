"""
End-to-end tests for the varsvm command line.
"""

import json
from pathlib import Path

import numpy as np
import pytest

from varsvm.cli.main import (
    EXIT_COMPATIBILITY_ERROR,
    EXIT_DATA_ERROR,
    EXIT_OK,
    EXIT_SPEC_ERROR,
    build_parser,
    run,
)
from varsvm.core.models import Dataset, Hyperplane
from varsvm.datagen import GaussianSpec, generate
from varsvm.solvers.config import SolverConfig
from varsvm.solvers.models import Variant
from varsvm.storage.serializer import (
    ModelFile,
    Provenance,
    file_hash,
    load_model,
    save_model,
    write_dataset,
)

FIXTURES = Path(__file__).parent / "fixtures"
FOUR_POINT = str(FIXTURES / "four_point_1d.csv")


def _run_json(capsys, argv) -> dict:
    assert run(argv) == EXIT_OK
    return json.loads(capsys.readouterr().out)


def _create_line_model(tmp_path: Path) -> Path:
    """Boundary at x = 0.5: f(x) = 2x - 1."""
    path = tmp_path / "model.json"
    save_model(
        ModelFile(
            variant=Variant.CLASSICAL,
            hyperplane=Hyperplane(beta=[2.0], beta0=-1.0),
            sigmas=None,
            config=SolverConfig(),
            provenance=Provenance(dataset_hash="0" * 64, seed=0, timestamp="2026-01-01T00:00:00Z"),
            objective=0.0,
            kkt_residual=0.0,
            iterations=0,
            converged=True,
        ),
        path,
    )
    return path


def _write_points(path: Path, rows) -> str:
    lines = ["f1"] + [repr(float(v)) for v in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)


# =============================================================================
# gen
# =============================================================================


def test_gen_is_reproducible(tmp_path, capsys):
    spec = str(FIXTURES / "gaussian_spec.json")
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"

    report_a = _run_json(capsys, ["gen", spec, "--seed", "7", "--output", str(first)])
    report_b = _run_json(capsys, ["gen", spec, "--seed", "7", "--output", str(second)])

    assert first.read_bytes() == second.read_bytes()
    assert report_a["dataset_hash"] == report_b["dataset_hash"] == file_hash(first)
    assert report_a["n_points"] == 5
    assert report_a["seed"] == 7


def test_gen_writes_csv_to_stdout(capsys):
    assert run(["gen", str(FIXTURES / "gaussian_spec.json")]) == EXIT_OK

    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "f1,f2,label"
    assert len(lines) == 6


def test_gen_rejects_non_psd_covariance(tmp_path, capsys):
    spec = json.loads((FIXTURES / "gaussian_spec.json").read_text())
    spec["classes"][1]["covariance"] = [[1.0, 3.0], [3.0, 1.0]]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(spec))

    assert run(["gen", str(path)]) == EXIT_SPEC_ERROR
    assert "classes[1].covariance" in capsys.readouterr().err


# =============================================================================
# train
# =============================================================================


def test_train_variance_moves_the_boundary(tmp_path, capsys):
    output = tmp_path / "model.json"

    report = _run_json(capsys, ["train", FOUR_POINT, "--cost", "1000", "--output", str(output)])

    assert report["variant"] == "variance"
    assert report["hyperplane"]["boundary_position"] == pytest.approx(0.0, abs=1e-3)
    assert report["sigmas"] == pytest.approx([1.0, 2.0])
    assert report["training_errors"]["total"] == 0
    assert report["dataset_hash"] == file_hash(FOUR_POINT)

    model = load_model(output)
    assert model.variant is Variant.VARIANCE
    assert model.config.cost == 1000.0
    assert model.provenance.dataset_hash == file_hash(FOUR_POINT)


def test_train_classical_keeps_the_midpoint(tmp_path, capsys):
    output = tmp_path / "model.json"

    report = _run_json(
        capsys, ["train", FOUR_POINT, "--method", "classical", "--output", str(output)]
    )

    assert report["hyperplane"]["boundary_position"] == pytest.approx(0.5, abs=1e-6)
    assert report["sigmas"] is None
    assert "stationarity" not in report


def test_train_single_class_is_a_data_error(tmp_path, capsys):
    data = tmp_path / "one.csv"
    data.write_text("f1,label\n1,1\n2,1\n", encoding="utf-8")

    assert run(["train", str(data), "--output", str(tmp_path / "m.json")]) == EXIT_DATA_ERROR
    assert "❌ Error:" in capsys.readouterr().err


def test_train_rejects_invalid_cost(tmp_path, capsys):
    code = run(["train", FOUR_POINT, "--cost", "-1", "--output", str(tmp_path / "m.json")])

    assert code == EXIT_SPEC_ERROR
    assert "cost" in capsys.readouterr().err


def test_train_malformed_csv_is_a_data_error(tmp_path, capsys):
    data = tmp_path / "broken.csv"
    data.write_text("f1,label\n1,1\nx,-1\n", encoding="utf-8")

    assert run(["train", str(data), "--output", str(tmp_path / "m.json")]) == EXIT_DATA_ERROR
    assert "broken.csv:3" in capsys.readouterr().err


# =============================================================================
# predict
# =============================================================================


def test_predict_labels_boundary_point_positive(tmp_path, capsys):
    model = _create_line_model(tmp_path)
    data = _write_points(tmp_path / "points.csv", [-3.0, 0.5, 6.0])

    assert run(["predict", str(model), data]) == EXIT_OK

    lines = capsys.readouterr().out.splitlines()
    assert lines == ["index,decision_value,label", "0,-7,-1", "1,0,1", "2,11,1"]


def test_predict_follows_row_order(tmp_path, capsys):
    model = _create_line_model(tmp_path)
    forward = _write_points(tmp_path / "forward.csv", [-3.0, 0.5, 6.0])
    backward = _write_points(tmp_path / "backward.csv", [6.0, 0.5, -3.0])

    run(["predict", str(model), forward])
    first = [line.split(",")[1:] for line in capsys.readouterr().out.splitlines()[1:]]
    run(["predict", str(model), backward])
    second = [line.split(",")[1:] for line in capsys.readouterr().out.splitlines()[1:]]

    assert second == first[::-1]


def test_predict_writes_to_file(tmp_path, capsys):
    model = _create_line_model(tmp_path)
    data = _write_points(tmp_path / "points.csv", [1.0])
    output = tmp_path / "predictions.csv"

    assert run(["predict", str(model), data, "--output", str(output)]) == EXIT_OK

    assert capsys.readouterr().out == ""
    assert output.read_text() == "index,decision_value,label\n0,1,1\n"


def test_predict_dimension_mismatch(tmp_path, capsys):
    model = _create_line_model(tmp_path)
    data = tmp_path / "wide.csv"
    data.write_text("f1,f2\n1,2\n", encoding="utf-8")

    assert run(["predict", str(model), str(data)]) == EXIT_COMPATIBILITY_ERROR
    assert "features" in capsys.readouterr().err


def test_predict_unsupported_model_version(tmp_path, capsys):
    path = _create_line_model(tmp_path)
    raw = json.loads(path.read_text())
    raw["format_version"] = 2
    path.write_text(json.dumps(raw))
    data = _write_points(tmp_path / "points.csv", [1.0])

    assert run(["predict", str(path), data]) == EXIT_COMPATIBILITY_ERROR


def test_trained_model_scores_its_own_training_file(tmp_path, capsys):
    output = tmp_path / "model.json"
    run(["train", FOUR_POINT, "--method", "classical", "--output", str(output)])
    capsys.readouterr()

    assert run(["predict", str(output), FOUR_POINT]) == EXIT_OK

    labels = [line.rsplit(",", 1)[1] for line in capsys.readouterr().out.splitlines()[1:]]
    assert labels == ["-1", "-1", "1", "1"]


# =============================================================================
# compare
# =============================================================================


def test_compare_reports_shift_toward_low_variance_class(capsys):
    report = _run_json(capsys, ["compare", FOUR_POINT, "--cost", "1000"])

    assert set(report) == {
        "config",
        "low_variance_label",
        "classical",
        "variance",
        "shift_toward_low_variance",
        "agreement",
    }
    assert report["low_variance_label"] == -1
    assert report["shift_toward_low_variance"] == pytest.approx(0.5, abs=1e-3)
    assert report["shift_toward_low_variance"] > 0.0
    assert report["classical"]["holdout_errors"] is None
    assert report["agreement"]["direction_cosine"] == pytest.approx(1.0)
    assert report["agreement"]["boundary_difference"] == pytest.approx(0.5, abs=1e-3)


def test_compare_with_holdout(tmp_path, capsys):
    holdout = tmp_path / "holdout.csv"
    write_dataset(Dataset(points=[[0.25], [-2.0], [3.0]], labels=[-1, -1, 1]), holdout)

    report = _run_json(capsys, ["compare", FOUR_POINT, "--holdout", str(holdout), "--cost", "1000"])

    # 0.25 falls between the two boundaries (0 and 0.5).
    assert report["classical"]["holdout_errors"] == {"neg": 0, "pos": 0, "total": 0}
    assert report["variance"]["holdout_errors"] == {"neg": 1, "pos": 0, "total": 1}


@pytest.mark.parametrize("seed", range(20))
def test_compare_shift_on_separated_three_to_one_spread(tmp_path, capsys, seed):
    """
    Separable stand-in for the 3:1 benchmark (means 15 apart instead of 4, C = 1000).

    In the hard-margin regime the boundary moves toward the tighter class -1
    on every seed. The overlapping benchmark is only recorded, see below.
    """
    specs = [
        GaussianSpec(mean=[0.0, 0.0], covariance=[[1.0, 0.0], [0.0, 1.0]], count=50, label=-1),
        GaussianSpec(mean=[15.0, 0.0], covariance=[[9.0, 0.0], [0.0, 9.0]], count=50, label=1),
    ]
    data = tmp_path / "spread.csv"
    write_dataset(generate(specs, seed=seed), data)

    report = _run_json(capsys, ["compare", str(data), "--cost", "1000"])

    assert report["low_variance_label"] == -1
    variance, classical = report["variance"], report["classical"]
    assert variance["low_variance_distance"] < classical["low_variance_distance"]


def _three_to_one_specs(count: int):
    return [
        GaussianSpec(mean=[0.0, 0.0], covariance=[[1.0, 0.0], [0.0, 1.0]], count=count, label=-1),
        GaussianSpec(mean=[4.0, 0.0], covariance=[[9.0, 0.0], [0.0, 9.0]], count=count, label=1),
    ]


def test_three_to_one_benchmark_records_each_seed(tmp_path, capsys, record_property):
    """
    Overlapping 3:1 benchmark at the default cost: 500 points per class,
    5000 held out per class, 20 seeds.

    The sign of the shift is not gated here; the hinge term pulls the
    boundary toward the spread-out class once the classes overlap.
    """
    outcomes = []
    for seed in range(20):
        train = tmp_path / f"train_{seed}.csv"
        holdout = tmp_path / f"holdout_{seed}.csv"
        write_dataset(generate(_three_to_one_specs(500), seed=seed), train)
        write_dataset(generate(_three_to_one_specs(5000), seed=10_000 + seed), holdout)

        report = _run_json(capsys, ["compare", str(train), "--holdout", str(holdout)])

        assert report["low_variance_label"] == -1
        outcomes.append(
            {
                "seed": seed,
                "shift_toward_low_variance": report["shift_toward_low_variance"],
                "classical_holdout_errors": report["classical"]["holdout_errors"]["total"],
                "variance_holdout_errors": report["variance"]["holdout_errors"]["total"],
            }
        )

    record_property("three_to_one_outcomes", outcomes)
    record_property(
        "three_to_one_positive_shifts",
        sum(1 for outcome in outcomes if outcome["shift_toward_low_variance"] > 0.0),
    )
    assert [outcome["seed"] for outcome in outcomes] == list(range(20))
    for outcome in outcomes:
        assert np.isfinite(outcome["shift_toward_low_variance"])
        assert 0 <= outcome["classical_holdout_errors"] <= 10_000
        assert 0 <= outcome["variance_holdout_errors"] <= 10_000


@pytest.mark.parametrize(
    "argv",
    [
        ["train", "{data}", "--method", "classical", "--output", "{model}"],
        ["train", "{data}", "--method", "variance", "--output", "{model}"],
        ["compare", "{data}"],
        ["verify", "{data}"],
    ],
)
def test_zero_normal_is_a_data_error(tmp_path, capsys, argv):
    """Every location carries both labels, so no direction separates anything."""
    data = tmp_path / "coincident.csv"
    model = tmp_path / "model.json"
    write_dataset(
        Dataset(points=[[0.0, 0.0], [0.0, 0.0], [1.0, 1.0], [1.0, 1.0]], labels=[-1, 1, -1, 1]),
        data,
    )

    code = run([arg.format(data=data, model=model) for arg in argv])

    assert code == EXIT_DATA_ERROR
    assert "beta is zero" in capsys.readouterr().err
    assert not model.exists()


# =============================================================================
# verify
# =============================================================================


def test_verify_passes_on_four_points(capsys):
    report = _run_json(capsys, ["verify", FOUR_POINT])

    assert report["passed"] is True
    statuses = {check["name"]: check["status"] for check in report["checks"]}
    assert statuses["oracle_classical"] == "pass"
    assert statuses["oracle_variance"] == "pass"
    assert statuses["gradient_exact"] == "pass"
    assert statuses["gradient_paper"] == "info"


def test_verify_skips_grid_oracles_above_two_features(tmp_path, capsys):
    rng = np.random.default_rng(3)
    points = np.vstack([rng.standard_normal((10, 5)), rng.standard_normal((10, 5)) * 2.0 + 6.0])
    data = tmp_path / "wide.csv"
    write_dataset(Dataset(points=points, labels=[-1] * 10 + [1] * 10), data)

    report = _run_json(capsys, ["verify", str(data)])

    details = {check["name"]: check["detail"] for check in report["checks"]}
    assert details["oracle_classical"] == "skipped: p>2"
    assert details["oracle_variance"] == "skipped: p>2"


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])