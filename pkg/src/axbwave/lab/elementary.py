"""The integrals I_0 = ∫_0^1 and I_∞ = ∫_1^∞ of (1 + |λR − t|)^{−N} R^α."""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from axbwave.common.errors import DomainError
from axbwave.lab.report import DRIFT_TOLERANCE, EstimateReport, drift, fit_constant, refine_grid
from axbwave.quadrature.rules import QuadSpec, integrate_panels


@dataclass(frozen=True)
class ElementaryBounds:
    I0: float
    Iinf: float
    bound0: float
    bound_inf: float

    @property
    def ratio0(self) -> float:
        return self.I0 / self.bound0

    @property
    def ratio_inf(self) -> float:
        return self.Iinf / self.bound_inf


def envelope_I0(alpha: float, lam: float, t: float, N: float) -> float:
    if t <= 2 * lam:
        return (1 + lam) ** (-alpha - 1) * (1 + t) ** alpha
    return (1 + t) ** -N


def envelope_Iinf(alpha: float, lam: float, t: float, N: float) -> float:
    if t <= lam / 2:
        return lam ** (-alpha - 1) * (1 + lam) ** (-N + alpha + 1)
    return lam ** (-alpha - 1) * (1 + t) ** alpha


def elementary_bounds(
    alpha: float, lam: float, t: float, N: float, quad: QuadSpec | None = None,
) -> ElementaryBounds:
    """Both integrals by adaptive quadrature, split at the kink R = t/λ.

    I_∞ is taken in u = 1/R: ∫_0^1 (1 + |λ/u − t|)^{−N} u^{−α−2} du, which
    behaves like λ^{−N} u^{N−α−2} at u = 0.
    """
    if lam <= 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    if alpha < 0 or t < 0:
        raise DomainError(f"need alpha >= 0 and t >= 0, got alpha={alpha}, t={t}")
    if not N > alpha + 1:
        raise DomainError(f"need N > alpha + 1, got N={N}, alpha={alpha}")
    quad = quad or QuadSpec(rel_tol=1e-9)

    def near(R):
        return (1.0 + np.abs(lam * R - t)) ** -N * R**alpha

    def far(u):
        return (1.0 + np.abs(lam / u - t)) ** -N * u ** (-alpha - 2.0)

    kink = t / lam
    I0 = integrate_panels(near, 0.0, 1.0, quad, breakpoints=[kink] if 0 < kink < 1 else [])
    u_kink = lam / t if t > 0 else math.inf
    Iinf = integrate_panels(far, 0.0, 1.0, quad, breakpoints=[u_kink] if 0 < u_kink < 1 else [])
    return ElementaryBounds(
        I0=float(I0.value),
        Iinf=float(Iinf.value),
        bound0=envelope_I0(alpha, lam, t, N),
        bound_inf=envelope_Iinf(alpha, lam, t, N),
    )


def _fit(alpha, N, lams, ts, quad):
    rows = []
    for lam, t in itertools.product(lams, ts):
        b = elementary_bounds(alpha, lam, t, N, quad)
        rows.append({
            "alpha": alpha, "N": N, "lam": float(lam), "t": float(t),
            "I0": b.I0, "Iinf": b.Iinf, "ratio0": b.ratio0, "ratio_inf": b.ratio_inf,
        })
    constant = fit_constant([max(r["ratio0"], r["ratio_inf"]) for r in rows], np.ones(len(rows)))
    return constant, rows


def elementary_bounds_grid(
    alphas, lams, ts, N: float, quad: QuadSpec | None = None,
) -> EstimateReport:
    """One fitted constant per (α, N) over the (λ, t) grid.

    Stable means the constant moves by at most 20% when both grids are doubled.
    """
    started = time.perf_counter()
    constants = {}
    checks = {}
    details = []
    for alpha in alphas:
        constant, rows = _fit(alpha, N, lams, ts, quad)
        fine, _ = _fit(alpha, N, refine_grid(lams), refine_grid(ts), quad)
        key = f"alpha={alpha:g},N={N:g}"
        constants[key] = {"constant": constant, "refined": fine}
        checks[f"finite[{key}]"] = math.isfinite(constant)
        checks[f"stable[{key}]"] = drift(constant, fine) <= DRIFT_TOLERANCE
        details.extend(rows)
    return EstimateReport(
        name="elementary",
        grid={"alpha": list(alphas), "lambda": list(lams), "t": list(ts), "N": N},
        fitted_constant=max(c["constant"] for c in constants.values()),
        checks=checks,
        runtime=time.perf_counter() - started,
        details=details,
        notes={"constants": constants},
    )
