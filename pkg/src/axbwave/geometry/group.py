"""The group G = ℝ⋉ℝⁿ with law (x, y)(x', y') = (x + x', y + e^x y')."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from axbwave.common.errors import ArcchDomainError, DomainError

logger = logging.getLogger(__name__)

ARCCH_CLAMP = 1e-12


@dataclass(frozen=True)
class GroupPoint:
    """A point (x, y) of G; n is the length of y."""

    x: float
    y: tuple[float, ...]

    def __post_init__(self):
        if len(self.y) < 1:
            raise DomainError("y must have at least one coordinate")
        if not (math.isfinite(self.x) and all(math.isfinite(c) for c in self.y)):
            raise DomainError(f"non-finite group point ({self.x}, {self.y})")

    @property
    def n(self) -> int:
        return len(self.y)

    def y_array(self) -> np.ndarray:
        return np.asarray(self.y, dtype=float)


def make_point(x: float, y) -> GroupPoint:
    """Build a GroupPoint from a scalar x and a sequence (or scalar) y."""
    return GroupPoint(float(x), tuple(float(c) for c in np.atleast_1d(y)))


def identity(n: int) -> GroupPoint:
    return GroupPoint(0.0, (0.0,) * n)


def group_mul(a: GroupPoint, b: GroupPoint) -> GroupPoint:
    if a.n != b.n:
        raise DomainError(f"dimension mismatch: {a.n} vs {b.n}")
    y = a.y_array() + math.exp(a.x) * b.y_array()
    return make_point(a.x + b.x, y)


def group_inv(a: GroupPoint) -> GroupPoint:
    return make_point(-a.x, -math.exp(-a.x) * a.y_array())


def arcch(d):
    """Inverse of ch on [1, ∞) → [0, ∞).

    Arguments in [1 − 1e−12, 1) are rounding noise and are clamped to 1;
    anything smaller raises ArcchDomainError.
    """
    d = np.asarray(d, dtype=float)
    if np.any(d < 1.0 - ARCCH_CLAMP):
        raise ArcchDomainError(f"arcch argument below 1: {np.min(d)!r}")
    low = d < 1.0
    if np.any(low):
        logger.debug("arcch: clamped %d argument(s) to 1", int(np.sum(low)))
        d = np.where(low, 1.0, d)
    result = np.arccosh(d)
    return float(result) if result.ndim == 0 else result


def cosh_distance_minus_one(x, y_norm_sq):
    """ch R − 1 = 2 sh²(x/2) + ½‖y‖² e^{−x}, free of cancellation."""
    x = np.asarray(x, dtype=float)
    return 2.0 * np.sinh(0.5 * x) ** 2 + 0.5 * np.asarray(y_norm_sq, dtype=float) * np.exp(-x)


def radial_distance_xy(x, y_norm_sq):
    """Vectorised R from x and ‖y‖²."""
    gap = cosh_distance_minus_one(x, y_norm_sq)
    return 2.0 * np.arcsinh(np.sqrt(0.5 * gap))


def radial_distance(a: GroupPoint) -> float:
    """Riemannian distance from a to the identity, arcch(ch x + ½‖y‖²e^{−x})."""
    y = a.y_array()
    return float(radial_distance_xy(a.x, float(y @ y)))


def point_at_distance(n: int, R: float, x: float = 0.0) -> GroupPoint:
    """A point with the given x coordinate and radial distance R.

    y is placed on the first axis. Requires ch R ≥ ch x.
    """
    gap = 2.0 * (math.cosh(R) - math.cosh(x)) * math.exp(x)
    if gap < 0:
        raise DomainError(f"no point with x={x} at distance R={R}")
    y = np.zeros(n)
    y[0] = math.sqrt(gap)
    return make_point(x, y)


def laplacian_fd(func, point: GroupPoint, h: float = 1e-3) -> float:
    """L f = −X²f − ΣY_j²f at point, by central differences.

    X = ∂_x and Y_j = e^x ∂_{y_j}, so Y_j² = e^{2x}∂²_{y_j}. func takes
    (x, y) with y an array of length n.
    """
    x, y = point.x, point.y_array()
    centre = func(x, y)
    xx = (func(x + h, y) - 2.0 * centre + func(x - h, y)) / h**2
    yy = 0.0
    for j in range(point.n):
        step = np.zeros(point.n)
        step[j] = h
        yy += (func(x, y + step) - 2.0 * centre + func(x, y - step)) / h**2
    return -xx - math.exp(2.0 * x) * yy
