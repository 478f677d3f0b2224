"""Weighted L¹ norms of F(L/λ²) against the Sobolev norm of F.

F is a profile in the variable u = s², supported in [1, 2]. The kernel of
F(L/λ²) is the multiplier kernel of ψ(s) = F(s²/λ²), and

    ‖F‖_{H(s)} = (∫_ℝ |f̂(ξ)|² (1 + |ξ|)^{2s} dξ)^{1/2},  f(v) = F(v²),

with f̂(ξ) = 2 ∫_1^{√2} F(v²) cos(vξ) dv.
"""

from __future__ import annotations

import math
import time

import numpy as np

from axbwave.common.errors import DomainError
from axbwave.geometry.group import point_at_distance
from axbwave.geometry.radial import integrate_radial
from axbwave.kernels.profiles import MultiplierProfile, band_bump, custom_profile
from axbwave.kernels.spectral import multiplier_kernel
from axbwave.lab.report import EstimateReport
from axbwave.quadrature.rules import QuadSpec, integrate_panels, kronrod_grid

FOURIER_CUTOFF = 400.0
PANELS_PER_UNIT_FREQUENCY = 0.25
# kernels of the family decay at least like (λR)^{−4}
KERNEL_REACH = 60.0


def hs_family() -> list[MultiplierProfile]:
    """Five profiles of u supported in [1, 2]."""
    return [
        band_bump(1.0, 1.5, 2.0),
        band_bump(1.0, 1.2, 2.0),
        band_bump(1.0, 1.8, 2.0),
        band_bump(1.2, 1.5, 1.8),
        band_bump(1.0, 1.5, 2.0, order=3),
    ]


def squared_profile(F: MultiplierProfile) -> MultiplierProfile:
    """s ↦ F(s²) as a profile of s."""
    return custom_profile(
        lambda a: F(np.asarray(a) ** 2),
        support=math.sqrt(F.support),
        breakpoints=[math.sqrt(b) for b in F.edges() if b > 0],
        vanishes_below=math.sqrt(F.vanishes_below),
    )


def _check_support(F: MultiplierProfile) -> None:
    if F.support > 2.0 or F.vanishes_below < 1.0:
        raise DomainError(f"F must be supported in [1, 2], got [{F.vanishes_below}, {F.support}]")


def f_hat(F: MultiplierProfile, xi) -> np.ndarray:
    """2 ∫ F(v²) cos(vξ) dv over the support of v ↦ F(v²)."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    lo, hi = math.sqrt(F.vanishes_below), math.sqrt(F.support)
    if hi <= lo:
        return np.zeros_like(xi)
    top = float(np.max(np.abs(xi), initial=0.0))
    panels = max(8, math.ceil((hi - lo) * top * PANELS_PER_UNIT_FREQUENCY))
    kinks = [math.sqrt(b) for b in F.edges() if lo < math.sqrt(b) < hi]
    edges = np.unique(np.concatenate([np.linspace(lo, hi, panels + 1), kinks]))
    v, kronrod, _ = kronrod_grid(edges)
    return 2.0 * (F(v**2)[None, :] * np.cos(np.outer(xi, v))) @ kronrod


def sobolev_norm(F: MultiplierProfile, s: float, cutoff: float = FOURIER_CUTOFF) -> float:
    """‖F‖_{H(s)} by quadrature of |f̂|²(1+ξ)^{2s} over [0, cutoff], doubled."""
    quad = QuadSpec(rel_tol=1e-8, abs_tol=1e-300)

    def integrand(xi):
        return np.abs(f_hat(F, xi)) ** 2 * (1.0 + np.abs(xi)) ** (2.0 * s)

    res = integrate_panels(integrand, 0.0, cutoff, quad, breakpoints=np.arange(10.0, cutoff, 10.0))
    return math.sqrt(2.0 * float(res.value))


def weighted_kernel_l1(
    n: int,
    F: MultiplierProfile,
    lam: float,
    eps: float,
    quad: QuadSpec | None = None,
    l: int | None = None,
) -> float:
    """∫_G |F(L/λ²)δ| (1 + λR)^ε."""
    quad = quad or QuadSpec()
    psi = squared_profile(F).scaled(lam)
    inner = QuadSpec(rel_tol=max(quad.rel_tol, 1e-8), abs_tol=quad.abs_tol)
    outer = QuadSpec(rel_tol=max(quad.rel_tol, 1e-4), abs_tol=quad.abs_tol)

    def g(R):
        out = np.empty(np.shape(R))
        for i, r in enumerate(np.ravel(R)):
            out.flat[i] = abs(multiplier_kernel(n, l, psi, point_at_distance(n, float(r)), inner))
        return out * (1.0 + lam * np.asarray(R)) ** eps

    upper = KERNEL_REACH / lam
    breakpoints = [1.0] if upper > 1.0 else []
    return float(integrate_radial(n, g, outer, upper=upper, breakpoints=breakpoints).value)


def check_hebisch_steger(
    n: int,
    family,
    lam: float,
    eps: float,
    s_order: float,
    quad: QuadSpec | None = None,
    l: int | None = None,
) -> EstimateReport:
    """Ratios ∫|F(L/λ²)δ|(1+λR)^ε / ‖F‖_{H(s)} over a family of F.

    Passes when every ratio is finite. The zero profile has ratio 0.
    """
    started = time.perf_counter()
    if lam <= 0 or eps < 0:
        raise DomainError(f"need lambda > 0 and eps >= 0, got {lam}, {eps}")
    if s_order <= 1.5 + eps or (lam >= 1 and s_order <= (n + 1) / 2 + eps):
        raise DomainError(f"Sobolev order {s_order} too small for n={n}, eps={eps}, lambda={lam}")
    rows = []
    for F in family:
        if not np.any(F(np.linspace(0.0, F.support, 257))):
            rows.append({
                "profile": F.kind,
                "support": [0.0, 0.0],
                "integral": 0.0,
                "norm": 0.0,
                "ratio": 0.0,
            })
            continue
        _check_support(F)
        integral = weighted_kernel_l1(n, F, lam, eps, quad, l)
        norm = sobolev_norm(F, s_order)
        ratio = 0.0 if integral == 0.0 else integral / norm
        rows.append({
            "profile": F.kind,
            "support": [F.vanishes_below, F.support],
            "integral": integral,
            "norm": norm,
            "ratio": ratio,
        })
    ratios = [r["ratio"] for r in rows]
    return EstimateReport(
        name=f"hs[lambda={lam:g}]",
        grid={"n": n, "lambda": lam, "eps": eps, "s": s_order, "profiles": len(rows)},
        fitted_constant=max(ratios, default=0.0),
        checks={"finite": all(math.isfinite(r) for r in ratios)},
        runtime=time.perf_counter() - started,
        details=rows,
    )
