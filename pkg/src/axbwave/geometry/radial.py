"""Radial integration on G.

For g a function of the radial distance,

    ∫_G e^{−nx/2} g(R(x, y)) dx dy = ∫_0^∞ g(R) J(R) dR,

    J(R) = (n/2) 2^{n/2} V_n sh R ∫_{−R}^{R} (ch R − ch x)^{n/2−1} dx,

and J is the derivative of the ball volume
B(r) = V_n 2^{n/2} ∫_{−r}^{r} (ch r − ch x)^{n/2} dx. J ∼ Rⁿ near 0 and
J ∼ R e^{nR/2} for large R.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma

from axbwave.common.errors import DomainError
from axbwave.geometry.group import radial_distance_xy
from axbwave.quadrature.rules import QuadResult, QuadSpec, integrate_panels
from axbwave.quadrature.singular import cosh_gap_ratio, integrate_algebraic, integrate_decaying

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RadialDensity:
    """J evaluated on a grid of radii, with per-point error estimates."""

    n: float
    R: np.ndarray
    values: np.ndarray
    errors: np.ndarray


def unit_ball_volume(n: float) -> float:
    """V_n = π^{n/2}/Γ(n/2 + 1)."""
    return math.pi ** (n / 2) / float(gamma(n / 2 + 1))


def cosh_gap_integral(R, beta: float, quad: QuadSpec | None = None):
    """∫_0^R (ch R − ch x)^β dx for every R in a positive array.

    With x = R(1 − τ) the integrand is (Rτ·sh(R − Rτ/2)·sinhc(Rτ/2))^β,
    an algebraic endpoint factor times a smooth one, so all radii share
    one panel set in τ.
    """
    quad = (quad or QuadSpec()).refined()
    R = np.atleast_1d(np.asarray(R, dtype=float))
    if np.any(R <= 0):
        raise DomainError("radii must be positive")

    def ratio(tau):
        r = R[None, :]
        return r * cosh_gap_ratio(r * (1.0 - tau[:, None]), r * tau[:, None])

    res = integrate_algebraic(lambda tau: np.ones_like(tau), 1.0, beta, ratio, quad)
    values = np.atleast_1d(res.value) * R
    errors = np.atleast_1d(res.error_estimate) * R
    return values, errors


def density_table(n: float, R_values, quad: QuadSpec | None = None) -> RadialDensity:
    """J on a grid; J(0) = 0."""
    if n <= 0:
        raise DomainError(f"dimension must be positive, got {n}")
    R = np.atleast_1d(np.asarray(R_values, dtype=float))
    if np.any(R < 0):
        raise DomainError("radii must be nonnegative")
    values = np.zeros_like(R)
    errors = np.zeros_like(R)
    positive = R > 0
    if np.any(positive):
        rp = R[positive]
        integral, err = cosh_gap_integral(rp, n / 2 - 1, quad)
        prefactor = n * 2 ** (n / 2) * unit_ball_volume(n) * np.sinh(rp)
        values[positive] = prefactor * integral
        errors[positive] = prefactor * err
    return RadialDensity(n=n, R=R, values=values, errors=errors)


def radial_density(n: float, R: float, quad: QuadSpec | None = None) -> QuadResult:
    """J(R) with its error estimate."""
    table = density_table(n, [R], quad)
    return QuadResult(
        value=float(table.values[0]),
        error_estimate=float(table.errors[0]),
        subdivisions_used=0,
        truncation_point=R,
    )


def ball_volume(n: float, r: float, quad: QuadSpec | None = None) -> float:
    """Right Haar volume of {R ≤ r} against the weight e^{−nx/2}."""
    if r < 0:
        raise DomainError(f"radius must be nonnegative, got {r}")
    if r == 0:
        return 0.0
    integral, _ = cosh_gap_integral([r], n / 2, quad)
    return float(unit_ball_volume(n) * 2 ** (n / 2) * 2.0 * integral[0])


def integrate_radial(
    n: float,
    g,
    quad: QuadSpec | None = None,
    *,
    upper: float = math.inf,
    breakpoints=(),
) -> QuadResult:
    """∫_0^upper g(R) J(R) dR.

    g must accept an array of radii. An infinite upper limit needs
    quad.decay_rate, a bound κ with |g(R)J(R)| ≲ e^{−κR}; the tail is then
    truncated where that bound certifies the remainder.
    """
    quad = quad or QuadSpec()
    if math.isinf(upper) and quad.decay_rate is None:
        raise DomainError("integrate_radial over [0, ∞) needs a decay rate")

    def integrand(R):
        R = np.asarray(R, dtype=float)
        return np.asarray(g(R)) * density_table(n, R, quad).values

    split = max([1.0, *breakpoints]) if math.isinf(upper) else upper
    head = integrate_panels(integrand, 0.0, split, quad, breakpoints=breakpoints)
    if not math.isinf(upper):
        return head
    tail = integrate_decaying(integrand, split, quad)
    logger.debug(
        "radial integral: head %.6g, tail %.6g, truncated at R=%.4g",
        head.value, tail.value, tail.truncation_point,
    )
    return QuadResult(
        value=head.value + tail.value,
        error_estimate=head.error_estimate + tail.error_estimate,
        subdivisions_used=head.subdivisions_used + tail.subdivisions_used,
        truncation_point=tail.truncation_point,
    )


def monte_carlo_radial(
    n: int,
    g,
    box: tuple[float, float] = (6.0, 20.0),
    samples: int = 400_000,
    seed: int = 0,
) -> tuple[float, float]:
    """Monte Carlo ∫ e^{−nx/2} g(R(x, y)) dx dy over [−X, X] × [−Y, Y]ⁿ.

    Returns (estimate, standard error).
    """
    x_half, y_half = box
    rng = np.random.Generator(np.random.PCG64(seed))
    x = rng.uniform(-x_half, x_half, samples)
    y = rng.uniform(-y_half, y_half, (samples, n))
    R = radial_distance_xy(x, np.einsum("ij,ij->i", y, y))
    values = np.exp(-0.5 * n * x) * np.asarray(g(R), dtype=float)
    volume = 2.0 * x_half * (2.0 * y_half) ** n
    return float(volume * values.mean()), float(volume * values.std(ddof=1) / math.sqrt(samples))
