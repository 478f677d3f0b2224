"""EstimateReport and the fitting helpers shared by the lab checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

DRIFT_TOLERANCE = 0.2


@dataclass
class EstimateReport:
    """Outcome of one verification sweep.

    fitted_constant is the largest measured/predicted ratio on the grid;
    growth_exponent_fit and confidence are set by regression checks only.
    checks maps a criterion name to its pass flag; passed is their conjunction.
    """

    name: str
    grid: dict
    fitted_constant: float = math.nan
    growth_exponent_fit: float | None = None
    confidence: tuple[float, float] | None = None
    checks: dict[str, bool] = field(default_factory=dict)
    runtime: float = 0.0
    details: list[dict] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def failures(self) -> list[str]:
        return [name for name, ok in self.checks.items() if not ok]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "grid": to_plain(self.grid),
            "fitted_constant": _number(self.fitted_constant),
            "growth_exponent_fit": _number(self.growth_exponent_fit),
            "confidence": (
                None if self.confidence is None else [_number(c) for c in self.confidence]
            ),
            "checks": dict(self.checks),
            "passed": self.passed,
            "failures": self.failures,
            "runtime": self.runtime,
            "details": [to_plain(d) for d in self.details],
            "notes": to_plain(self.notes),
        }


def _number(value):
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else str(value)


def to_plain(obj):
    """JSON-safe copy: numpy scalars and arrays become floats and lists."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _number(obj.real), "im": _number(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        return _number(obj)
    return obj


def fit_constant(measured, predicted) -> float:
    """max measured/predicted; inf when any ratio is not finite."""
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.abs(np.asarray(measured, dtype=float)) / np.asarray(predicted, dtype=float)
    if ratios.size == 0 or not np.all(np.isfinite(ratios)):
        return math.inf
    return float(np.max(ratios))


def drift(base: float, other: float) -> float:
    if not (math.isfinite(base) and math.isfinite(other)) or base == 0:
        return math.inf
    return abs(other - base) / abs(base)


def fit_exponent(t, values) -> tuple[float, tuple[float, float]]:
    """Slope of log(values) against log(1 + t), with a ±2 standard error band."""
    x = np.log1p(np.asarray(t, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    fit = stats.linregress(x, y)
    half = 2.0 * float(fit.stderr) if np.isfinite(fit.stderr) else 0.0
    return float(fit.slope), (float(fit.slope) - half, float(fit.slope) + half)


def refine_grid(grid) -> np.ndarray:
    """The grid with midpoints inserted.

    Midpoints are geometric for positive grids spanning at least a decade.
    """
    grid = np.asarray(sorted(set(np.atleast_1d(np.asarray(grid, dtype=float)))), dtype=float)
    if grid.size < 2:
        return grid
    if grid[0] > 0 and grid[-1] / grid[0] >= 10:
        mids = np.sqrt(grid[:-1] * grid[1:])
    else:
        mids = 0.5 * (grid[:-1] + grid[1:])
    return np.sort(np.concatenate([grid, mids]))
