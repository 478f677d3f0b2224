"""Sup norm of k_λ^t against (1 + t^{−n/2}) λ^{n/2+1}.

On the ray x = −R, y = 0 the prefactor e^{−nx/2} e^{−nR/2} equals 1, so
k_λ^t(−R, 0) = G_λ(R, R − t) + G_λ(R, R + t). The sup is taken along that ray
on a coarse grid (geometric below R = 1, finer near the wave front R = t)
refined twice around the largest coarse value.
"""

from __future__ import annotations

import logging
import math
import time

import numpy as np

from axbwave.common.errors import DomainError
from axbwave.kernels.profiles import MultiplierProfile, bump_band
from axbwave.kernels.spectral import G_lambda, check_wave_profile
from axbwave.lab.report import DRIFT_TOLERANCE, EstimateReport, drift, fit_constant
from axbwave.quadrature.rules import QuadSpec
from axbwave.sweep.pool import map_ordered

logger = logging.getLogger(__name__)

R_MIN = 1e-3
REFINE_POINTS = 11
REFINE_ROUNDS = 2


def supnorm_envelope(n: int, lam: float, t: float) -> float:
    return (1.0 + t ** (-n / 2)) * lam ** (n / 2 + 1)


def ray_grid(lam: float, t: float, density: float = 1.0) -> np.ndarray:
    """Radii for the coarse search; density 2 doubles every spacing."""
    small = np.geomspace(R_MIN, 1.0, int(13 * density))
    far = np.arange(1.0, t + 3.0, 0.25 / density)
    front = t + np.arange(-3.0, 3.0 + 1e-12, 0.25 / density) / lam
    grid = np.concatenate([small, far, front])
    return np.unique(grid[grid >= R_MIN])


def _ray_values(n, l, psi, lam, t, radii, quad) -> np.ndarray:
    out = np.empty(len(radii))
    for i, R in enumerate(radii):
        G = G_lambda(n, l, psi, lam, float(R), [R - t, R + t], quad)
        out[i] = abs(complex(G.values[0] + G.values[1]))
    return out


def ray_supremum(
    n: int,
    lam: float,
    t: float,
    psi: MultiplierProfile | None = None,
    quad: QuadSpec | None = None,
    l: int | None = None,
    density: float = 1.0,
) -> tuple[float, float]:
    """(sup_R |k_λ^t(−R, 0)|, argmax R)."""
    psi = psi or bump_band()
    check_wave_profile(psi, lam)
    radii = ray_grid(lam, t, density)
    values = _ray_values(n, l, psi, lam, t, radii, quad)
    best = int(np.argmax(values))
    peak, where = float(values[best]), float(radii[best])
    for _ in range(REFINE_ROUNDS):
        lo = radii[max(best - 1, 0)]
        hi = radii[min(best + 1, len(radii) - 1)]
        radii = np.linspace(max(lo, R_MIN), hi, REFINE_POINTS)
        values = _ray_values(n, l, psi, lam, t, radii, quad)
        best = int(np.argmax(values))
        if values[best] > peak:
            peak, where = float(values[best]), float(radii[best])
    logger.debug("sup |k| for lam=%g t=%g: %.6g at R=%.4g", lam, t, peak, where)
    return peak, where


def _sup_point(job) -> tuple[float, float]:
    return ray_supremum(*job)


def check_supnorm(
    n: int,
    lam_grid,
    t_grid,
    quad: QuadSpec | None = None,
    psi: MultiplierProfile | None = None,
    l: int | None = None,
    scaling_t: float = 1.0,
    threads: int = 1,
) -> EstimateReport:
    """Fit the constant of the sup-norm envelope and check its λ-scaling.

    Checks: the constant is finite, moves by at most 20% when the search
    grid is doubled, and sup(2λ)/sup(λ) at t = scaling_t is within a factor
    2 of 2^{n/2+1} for the smallest λ of the grid.
    """
    started = time.perf_counter()
    quad = quad or QuadSpec()
    if min(lam_grid) < 1:
        raise DomainError("the sup-norm bound is stated for lambda >= 1")
    pairs = [(float(lam), float(t)) for lam in lam_grid for t in t_grid]
    coarse = map_ordered(_sup_point, [(n, lam, t, psi, quad, l, 1.0) for lam, t in pairs], threads)
    fine = map_ordered(_sup_point, [(n, lam, t, psi, quad, l, 2.0) for lam, t in pairs], threads)
    predicted = [supnorm_envelope(n, lam, t) for lam, t in pairs]
    constant = fit_constant([c[0] for c in coarse], predicted)
    refined = fit_constant([f[0] for f in fine], predicted)

    lam0 = float(min(lam_grid))
    low, _ = ray_supremum(n, lam0, scaling_t, psi, quad, l)
    high, _ = ray_supremum(n, 2.0 * lam0, scaling_t, psi, quad, l)
    scaling = high / low
    expected = 2.0 ** (n / 2 + 1)

    details = [
        {"lam": lam, "t": t, "sup": c[0], "argmax_R": c[1], "predicted": p, "ratio": c[0] / p}
        for (lam, t), c, p in zip(pairs, coarse, predicted)
    ]
    return EstimateReport(
        name="supnorm",
        grid={"n": n, "lambda": list(lam_grid), "t": list(t_grid)},
        fitted_constant=constant,
        checks={
            "finite": math.isfinite(constant),
            "stable_grid": drift(constant, refined) <= DRIFT_TOLERANCE,
            "lambda_scaling": expected / 2.0 <= scaling <= 2.0 * expected,
        },
        runtime=time.perf_counter() - started,
        details=details,
        notes={
            "scaling_ratio": scaling,
            "expected_scaling": expected,
            "scaling_t": scaling_t,
            "refined_constant": refined,
        },
    )
