"""
CLI command implementations.

Each command reads its inputs, runs the solvers and prints one report.
Errors propagate as domain exceptions; `main.run` maps them to exit codes.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

from varsvm.core.geometry import (
    class_sigmas,
    classify_many,
    decision_values,
    direction_cosine,
    margin_report,
)
from varsvm.core.models import Dataset, Hyperplane
from varsvm.datagen import GENERATOR_VERSION, generate, load_gaussian_specs
from varsvm.solvers.classical import NonConvergenceError, solve_classical
from varsvm.solvers.config import SolverConfig
from varsvm.solvers.models import TrainedModel, Variant
from varsvm.solvers.variance import explore_fixed_points, solve_variance, stationarity_residuals
from varsvm.storage.serializer import (
    CompatibilityError,
    ModelFile,
    Provenance,
    dataset_to_csv,
    file_hash,
    load_model,
    read_dataset,
    read_points,
    save_model,
    to_jsonable,
)
from varsvm.verification import run_verification

from .inspector import ReportInspector, emit, print_json

logger = logging.getLogger(__name__)


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")


def train_model(data: Dataset, method: Variant, config: SolverConfig) -> TrainedModel:
    """Train one variant; classical non-convergence yields the flagged best iterate."""
    if Variant(method) is Variant.CLASSICAL:
        try:
            return solve_classical(data, config)
        except NonConvergenceError as exc:
            logger.warning("classical_not_converged", extra={"iterations": exc.model.iterations})
            return exc.model
    return solve_variance(data, config)


class CLICommands:
    """
    Executes CLI commands.
    """

    def __init__(self, config: Optional[SolverConfig] = None, verbose: bool = False):
        self.config = config or SolverConfig()
        self.verbose = verbose
        self.inspector = ReportInspector()

    # =========================================================================
    # gen
    # =========================================================================

    def gen(self, spec_path: str, output: Optional[str] = None) -> int:
        """
        Generate a dataset from a Gaussian spec file.

        Writes the CSV to `output` (standard output when omitted) and, when
        writing to a file, prints a JSON summary.
        """
        specs = load_gaussian_specs(spec_path)
        data = generate(specs, seed=self.config.seed)
        text = dataset_to_csv(data)
        emit(text, output)
        if output:
            print_json(
                {
                    "output": output,
                    "n_points": data.n_points,
                    "n_features": data.n_features,
                    "seed": self.config.seed,
                    "generator_version": GENERATOR_VERSION,
                    "dataset_hash": file_hash(output),
                }
            )
        return 0

    # =========================================================================
    # train
    # =========================================================================

    def _training_report(self, data: Dataset, model: TrainedModel) -> Dict[str, Any]:
        report: Dict[str, Any] = {
            "variant": model.variant.value,
            "converged": model.converged,
            "objective": model.objective,
            "iterations": model.iterations,
            "kkt_residual": model.kkt_residual,
            "hyperplane": self.inspector.hyperplane(model.hyperplane),
            "sigmas": model.sigmas,
            "margins": self.inspector.margins(
                margin_report(data, model.hyperplane, self.config.sigma_mode)
            ),
            "training_errors": self.inspector.errors(model.hyperplane, data),
        }
        if model.variant is Variant.VARIANCE:
            report["stationarity"] = stationarity_residuals(data, model)
        return report

    def train(self, data_path: str, method: str, output: str) -> int:
        data = read_dataset(data_path)
        data.require_both_classes()
        variant = Variant(method)
        model = train_model(data, variant, self.config)

        provenance = Provenance(
            dataset_hash=file_hash(data_path),
            seed=self.config.seed,
            timestamp=_timestamp(),
        )
        save_model(ModelFile.from_trained(model, self.config, provenance), output)

        report = self._training_report(data, model)
        report["model_path"] = output
        report["dataset_hash"] = provenance.dataset_hash
        if self.verbose and variant is Variant.VARIANCE:
            report["fixed_points"] = [
                {
                    "hyperplane": self.inspector.hyperplane(point.hyperplane),
                    "objective": point.objective,
                    "sigma_neg": point.sigma_neg,
                    "sigma_pos": point.sigma_pos,
                }
                for point in explore_fixed_points(data, self.config)
            ]
        print_json(report)
        return 0

    # =========================================================================
    # predict
    # =========================================================================

    def predict(self, model_path: str, data_path: str, output: Optional[str] = None) -> int:
        """
        Score every row of a dataset file.

        Raises:
            CompatibilityError: model and data dimensions differ
        """
        model = load_model(model_path)
        points, _ = read_points(data_path)
        expected = model.hyperplane.beta.shape[0]
        if points.shape[1] != expected:
            raise CompatibilityError(
                f"model has {expected} features, {data_path} has {points.shape[1]}"
            )

        if file_hash(data_path) == model.provenance.dataset_hash:
            logger.info("dataset_hash_match", extra={"path": data_path})
        else:
            logger.info("dataset_hash_mismatch", extra={"path": data_path})

        values = decision_values(model.hyperplane, points)
        labels = classify_many(model.hyperplane, points)
        emit(self.inspector.format_predictions(values, labels), output)
        return 0

    # =========================================================================
    # compare
    # =========================================================================

    def _method_report(
        self,
        data: Dataset,
        model: TrainedModel,
        holdout: Optional[Dataset],
        low_label: int,
    ) -> Dict[str, Any]:
        h = model.hyperplane
        margins = margin_report(data, h, self.config.sigma_mode)
        distances = {}
        for label, key in ((-1, "neg"), (1, "pos")):
            mean = data.class_points(label).mean(axis=0)
            distances[key] = float(label * (mean @ h.beta + h.beta0) / h.norm)
        return {
            "converged": model.converged,
            "objective": model.objective,
            "hyperplane": self.inspector.hyperplane(h),
            "margins": self.inspector.margins(margins),
            "ratio_gap": margins.ratio_gap,
            "training_errors": self.inspector.errors(h, data),
            "holdout_errors": None if holdout is None else self.inspector.errors(h, holdout),
            "mean_distance": distances,
            "low_variance_distance": distances["neg" if low_label < 0 else "pos"],
        }

    def compare(self, data_path: str, holdout_path: Optional[str] = None) -> int:
        """
        Train both variants on the same data and report how their boundaries differ.

        The low-variance class is the one with the smaller sigma along the
        classical normal. shift_toward_low_variance is the classical
        distance to that class mean minus the variance-adjusted one; a
        positive value means the variance-adjusted boundary sits closer to
        the low-variance class, leaving more room on the high-variance side.
        """
        data = read_dataset(data_path)
        data.require_both_classes()
        holdout = read_dataset(holdout_path) if holdout_path else None
        if holdout is not None and holdout.n_features != data.n_features:
            raise CompatibilityError(
                f"holdout has {holdout.n_features} features, training data has {data.n_features}"
            )

        with ThreadPoolExecutor(max_workers=2) as pool:
            futures = {
                variant: pool.submit(train_model, data, variant, self.config)
                for variant in (Variant.CLASSICAL, Variant.VARIANCE)
            }
            models = {variant: future.result() for variant, future in futures.items()}

        classical = models[Variant.CLASSICAL]
        variance = models[Variant.VARIANCE]
        neg, pos = class_sigmas(data, classical.hyperplane.beta, self.config.sigma_mode)
        low_label = -1 if neg.sigma < pos.sigma else 1

        reports = {
            variant.value: self._method_report(data, models[variant], holdout, low_label)
            for variant in (Variant.CLASSICAL, Variant.VARIANCE)
        }
        print_json(
            {
                "config": self.config.to_dict(),
                "low_variance_label": low_label,
                "classical": reports["classical"],
                "variance": reports["variance"],
                "shift_toward_low_variance": (
                    reports["classical"]["low_variance_distance"]
                    - reports["variance"]["low_variance_distance"]
                ),
                "agreement": _agreement(classical.hyperplane, variance.hyperplane),
            }
        )
        return 0

    # =========================================================================
    # verify
    # =========================================================================

    def verify(self, data_path: str) -> int:
        """Run the verification battery. Failing checks do not change the exit code."""
        data = read_dataset(data_path)
        report = run_verification(data, self.config)
        print_json(to_jsonable(report))
        return 0


def _agreement(a: Hyperplane, b: Hyperplane) -> Dict[str, float]:
    return {
        "direction_cosine": direction_cosine(a.beta, b.beta),
        "boundary_difference": abs(a.boundary_position - b.boundary_position),
    }


def method_names() -> List[str]:
    return [variant.value for variant in Variant]
