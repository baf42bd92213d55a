"""
Report formatting utilities.

Standard output carries command results only: JSON reports and CSV
prediction streams. Logs go to standard error.
"""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Any, Dict, Optional, TextIO

import numpy as np

from varsvm.core.geometry import classify_many
from varsvm.core.models import Dataset, Hyperplane, MarginReport
from varsvm.storage.serializer import dumps


class ReportInspector:
    """
    Builds the JSON-ready pieces shared by several commands.
    """

    @staticmethod
    def format_json(data: Any) -> str:
        return dumps(data)

    @staticmethod
    def hyperplane(h: Hyperplane) -> Dict[str, Any]:
        return {
            "beta": h.beta,
            "beta0": h.beta0,
            "boundary_position": h.boundary_position,
        }

    @staticmethod
    def margins(report: MarginReport) -> Dict[str, Any]:
        return {
            "margin_neg": report.margin_neg,
            "margin_pos": report.margin_pos,
            "sigma_neg": report.sigma_neg,
            "sigma_pos": report.sigma_pos,
            "ratio_gap": report.ratio_gap,
            "distance_neg": report.distance_neg,
            "distance_pos": report.distance_pos,
            "euclidean_ratio_gap": report.euclidean_ratio_gap,
        }

    @staticmethod
    def errors(h: Hyperplane, data: Dataset) -> Dict[str, int]:
        """Misclassified counts per class and in total (decision value 0 counts as +1)."""
        wrong = classify_many(h, data.points) != data.labels
        neg = int(np.sum(wrong & (data.labels < 0)))
        pos = int(np.sum(wrong & (data.labels > 0)))
        return {"neg": neg, "pos": pos, "total": neg + pos}

    @staticmethod
    def format_predictions(values: np.ndarray, labels: np.ndarray) -> str:
        """CSV `index,decision_value,label`."""
        lines = ["index,decision_value,label"]
        for index, (value, label) in enumerate(zip(values, labels)):
            lines.append(f"{index},{'%.17g' % value},{int(label)}")
        return "\n".join(lines) + "\n"


def print_json(data: Any, stream: Optional[TextIO] = None) -> None:
    """Print data as deterministic JSON."""
    (stream or sys.stdout).write(ReportInspector.format_json(data))


def emit(text: str, output: Optional[str] = None) -> None:
    """Write text to `output` when given, else to standard output."""
    if output:
        Path(output).write_bytes(text.encode("utf-8"))
    else:
        sys.stdout.write(text)
