"""Pointwise envelopes for G_λ(R, ρ).

Three regimes:

    regime            R       λ ≥ 1                              λ < 1
    large_R           R ≥ 1   λ^{n/2+1}                         λ²
    small_R, n = 1    R ≤ 1   R^{−1/2}λ^{3/2}                    R^{−1/2}λ²
    small_R, n ≥ 2    R ≤ 1   R^{1−n}λ² + R^{−n/2}λ^{n/2+1}      R^{1−n}λ²
    small_R_improved  R ≤ 1   λ^{n+1}                            λ²

Every regime carries the factor (1+|λρ|)^{−N}.

The improved regime is measured on the sine-based G (G_lambda_sin).
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass

import numpy as np

from axbwave.common.errors import DomainError
from axbwave.kernels.profiles import MultiplierProfile, bump_band, bump_low
from axbwave.kernels.spectral import G_lambda, G_lambda_sin, check_wave_profile
from axbwave.lab.report import DRIFT_TOLERANCE, EstimateReport, drift, fit_constant, refine_grid
from axbwave.quadrature.rules import QuadSpec
from axbwave.sweep.pool import map_ordered

logger = logging.getLogger(__name__)

REGIMES = ("large_R", "small_R", "small_R_improved")
_ALIASES = {
    "large-r": "large_R",
    "r>=1": "large_R",
    "small-r": "small_R",
    "r<=1": "small_R",
    "small-r-improved": "small_R_improved",
    "smallr_improved": "small_R_improved",
    "improved": "small_R_improved",
}


def normalise_regime(name: str) -> str:
    if name in REGIMES:
        return name
    key = name.strip().lower()
    for regime in REGIMES:
        if key == regime.lower():
            return regime
    if key in _ALIASES:
        return _ALIASES[key]
    raise DomainError(f"unknown regime {name!r}; expected one of {', '.join(REGIMES)}")


@dataclass(frozen=True)
class EnvelopeSpec:
    n: int
    regime: str
    N: int = 4

    def __post_init__(self):
        object.__setattr__(self, "regime", normalise_regime(self.regime))
        if self.N < 0:
            raise DomainError(f"decay order must be nonnegative, got {self.N}")
        if self.n < 1:
            raise DomainError(f"dimension must be >= 1, got {self.n}")

    def covers(self, R: float) -> bool:
        if self.regime == "large_R":
            return R >= 1.0
        return 0.0 < R <= 1.0

    def predicted(self, R, rho, lam: float):
        R = np.asarray(R, dtype=float)
        decay = (1.0 + np.abs(lam * np.asarray(rho, dtype=float))) ** -self.N
        n = self.n
        if self.regime == "large_R":
            size = lam ** (n / 2 + 1) if lam >= 1 else lam**2
        elif self.regime == "small_R_improved":
            size = lam ** (n + 1) if lam >= 1 else lam**2
        elif n == 1:
            size = R**-0.5 * (lam**1.5 if lam >= 1 else lam**2)
        elif lam >= 1:
            size = R ** (1 - n) * lam**2 + R ** (-n / 2) * lam ** (n / 2 + 1)
        else:
            size = R ** (1 - n) * lam**2
        return size * decay


def default_wave_profile(lam: float) -> MultiplierProfile:
    """bump_band for λ ≥ 1 (it must vanish on [−1, 1]), bump_low below."""
    return bump_band() if lam >= 1 else bump_low()


def _g_point(job) -> np.ndarray:
    n, l, psi, lam, R, rhos, quad, improved = job
    evaluate = G_lambda_sin if improved else G_lambda
    return np.abs(evaluate(n, l, psi, lam, R, rhos, quad).values)


def _measure(spec: EnvelopeSpec, R_grid, rho_grid, lam_grid, psi, quad, l, threads):
    jobs = []
    keys = []
    for lam in lam_grid:
        profile = psi if psi is not None else default_wave_profile(lam)
        check_wave_profile(profile, lam)
        for R in R_grid:
            improved = spec.regime == "small_R_improved"
            jobs.append((spec.n, l, profile, float(lam), float(R), rho_grid, quad, improved))
            keys.append((float(lam), float(R)))
    rows = []
    for (lam, R), measured in zip(keys, map_ordered(_g_point, jobs, threads)):
        predicted = spec.predicted(R, rho_grid, lam)
        for rho, m, p in zip(rho_grid, measured, predicted):
            rows.append({
                "lam": lam,
                "R": R,
                "rho": float(rho),
                "measured": float(m),
                "predicted": float(p),
            })
    return rows


def _rows_constant(rows) -> float:
    return fit_constant([r["measured"] for r in rows], [r["predicted"] for r in rows])


def check_envelope(
    spec: EnvelopeSpec,
    R_grid,
    rho_grid,
    lam_grid,
    psi: MultiplierProfile | None = None,
    quad: QuadSpec | None = None,
    l: int | None = None,
    threads: int = 1,
) -> EstimateReport:
    """Fit the constant of the given envelope over the (R, ρ, λ) grid.

    The fit is repeated on the grid with midpoints inserted in R and ρ and
    with tightened quadrature tolerances; the check passes when the constant
    is finite and neither repeat moves it by more than 20%.
    """
    started = time.perf_counter()
    quad = quad or QuadSpec()
    R_grid = np.asarray(R_grid, dtype=float)
    rho_grid = np.asarray(rho_grid, dtype=float)
    outside = [float(R) for R in R_grid if not spec.covers(R)]
    if outside:
        raise DomainError(f"R values {outside} lie outside the {spec.regime} regime")

    rows = _measure(spec, R_grid, rho_grid, lam_grid, psi, quad, l, threads)
    constant = _rows_constant(rows)

    R_fine = np.array([R for R in refine_grid(R_grid) if spec.covers(R)])
    fine_rows = _measure(spec, R_fine, refine_grid(rho_grid), lam_grid, psi, quad, l, threads)
    grid_drift = drift(constant, _rows_constant(fine_rows))

    tight_rows = _measure(spec, R_grid, rho_grid, lam_grid, psi, quad.refined(), l, threads)
    quad_drift = drift(constant, _rows_constant(tight_rows))

    if max(grid_drift, quad_drift) > DRIFT_TOLERANCE:
        logger.warning(
            "%s envelope drifts: %.1f%% under grid doubling, %.1f%% under refinement",
            spec.regime, 100 * grid_drift, 100 * quad_drift,
        )
    return EstimateReport(
        name=f"envelope[{spec.regime}]",
        grid={
            "n": spec.n,
            "N": spec.N,
            "regime": spec.regime,
            "lambda": list(lam_grid),
            "R": R_grid,
            "rho": rho_grid,
        },
        fitted_constant=constant,
        checks={
            "finite": math.isfinite(constant),
            "stable_grid": grid_drift <= DRIFT_TOLERANCE,
            "stable_quadrature": quad_drift <= DRIFT_TOLERANCE,
        },
        runtime=time.perf_counter() - started,
        details=rows,
        notes={"grid_drift": grid_drift, "quadrature_drift": quad_drift},
    )


def _conjecture_envelope(n: int, lam: float, t: float, R, N: int):
    R = np.asarray(R, dtype=float)
    growth = np.maximum(R, 1.0) ** (n / 2)
    if lam * t >= 1:
        return t ** (-n / 2) * lam ** (n / 2 + 1) * growth * (1.0 + lam * np.abs(R - t)) ** -N
    return lam ** (n + 1) * growth * (1.0 + lam * R) ** -N


def check_transfer_conjecture(
    n: int,
    lam: float,
    t_grid,
    R_grid,
    N: int = 4,
    quad: QuadSpec | None = None,
    l: int | None = None,
) -> EstimateReport:
    """Compare P_λ^t(R) = G_λ(R, R−t) + G_λ(R, R+t) with the envelope
    a naive transfer from n = 2 would suggest.

    Report only: checks stays empty. For λ ≤ 1 the size of P at R = t is
    recorded against both λ^{n/2+1} and λ².
    """
    started = time.perf_counter()
    psi = default_wave_profile(lam)
    rows = []
    for t in t_grid:
        for R in R_grid:
            G = G_lambda(n, l, psi, lam, float(R), [R - t, R + t], quad)
            size = abs(complex(G.values[0] + G.values[1]))
            rows.append({
                "t": float(t),
                "R": float(R),
                "measured": size,
                "predicted": float(_conjecture_envelope(n, lam, float(t), R, N)),
            })
    notes = {}
    if lam <= 1:
        at_peak = []
        for t in t_grid:
            if t <= 0:
                continue
            G = G_lambda(n, l, psi, lam, float(t), [0.0, 2.0 * t], quad)
            size = abs(complex(G.values[0] + G.values[1]))
            at_peak.append({
                "t": float(t),
                "size": size,
                "over_lambda_half_n_plus_1": size / lam ** (n / 2 + 1),
                "over_lambda_squared": size / lam**2,
            })
        notes["size_at_R_equals_t"] = at_peak
    return EstimateReport(
        name="transfer_conjecture",
        grid={"n": n, "lambda": lam, "N": N, "t": list(t_grid), "R": list(R_grid)},
        fitted_constant=fit_constant([r["measured"] for r in rows], [r["predicted"] for r in rows]),
        runtime=time.perf_counter() - started,
        details=rows,
        notes=notes,
    )
