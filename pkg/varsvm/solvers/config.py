"""
Solver Configuration

One frozen record carries every knob the classical and variance solvers
read. Values are validated on construction so a bad flag fails before any
solve starts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

from varsvm.core.models import GradientMode, SigmaMode


class ConfigError(ValueError):
    """Raised when a SolverConfig field is out of range."""


@dataclass(frozen=True)
class SolverConfig:
    """
    Solver settings.

    Fields:
    - cost: regularization C (> 0)
    - kkt_tol: KKT / stationarity acceptance tolerance (> 0)
    - max_passes: pair updates allowed per observation (>= 1)
    - sigma_mode: normalized or paper-literal directional sigma
    - outer_tol: direction change accepted by the alternating loop (> 0)
    - sigma_tol: relative sigma change accepted by the alternating loop (> 0)
    - max_outer: alternating iterations allowed (>= 1)
    - gradient_mode: gradient expression reported by diagnostics
    - smoothing: hinge smoothing width used by the primal refiner (> 0)
    - restarts: random restarts for fixed-point exploration (>= 0)
    - seed: seed for every random choice (>= 0)
    """

    cost: float = 1.0
    kkt_tol: float = 1e-6
    max_passes: int = 10_000
    sigma_mode: SigmaMode = SigmaMode.NORMALIZED
    outer_tol: float = 1e-8
    sigma_tol: float = 1e-8
    max_outer: int = 100
    gradient_mode: GradientMode = GradientMode.EXACT
    smoothing: float = 1e-6
    restarts: int = 4
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("cost", "kkt_tol", "outer_tol", "sigma_tol", "smoothing"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
                raise ConfigError(f"{name} must be a positive finite number, got {value!r}")
        for name, minimum in (("max_passes", 1), ("max_outer", 1), ("restarts", 0), ("seed", 0)):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
                raise ConfigError(f"{name} must be an integer >= {minimum}, got {value!r}")

        try:
            object.__setattr__(self, "sigma_mode", SigmaMode(self.sigma_mode))
        except ValueError:
            raise ConfigError(f"unknown sigma_mode {self.sigma_mode!r}") from None
        try:
            object.__setattr__(self, "gradient_mode", GradientMode(self.gradient_mode))
        except ValueError:
            raise ConfigError(f"unknown gradient_mode {self.gradient_mode!r}") from None

        object.__setattr__(self, "cost", float(self.cost))
        object.__setattr__(self, "kkt_tol", float(self.kkt_tol))
        object.__setattr__(self, "outer_tol", float(self.outer_tol))
        object.__setattr__(self, "sigma_tol", float(self.sigma_tol))
        object.__setattr__(self, "smoothing", float(self.smoothing))

    def with_overrides(self, **overrides) -> "SolverConfig":
        """Validated copy; None values keep the current setting."""
        known = {f.name for f in fields(self)}
        unknown = sorted(set(overrides) - known)
        if unknown:
            raise ConfigError(f"unknown config fields: {', '.join(unknown)}")
        changes = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "cost": self.cost,
            "kkt_tol": self.kkt_tol,
            "max_passes": self.max_passes,
            "sigma_mode": self.sigma_mode.value,
            "outer_tol": self.outer_tol,
            "sigma_tol": self.sigma_tol,
            "max_outer": self.max_outer,
            "gradient_mode": self.gradient_mode.value,
            "smoothing": self.smoothing,
            "restarts": self.restarts,
            "seed": self.seed,
        }
