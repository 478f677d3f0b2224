"""Acceptance suites for the resolvent and the n = 2 transfer oracle."""

from __future__ import annotations

import math
import time

import numpy as np

from axbwave.geometry.group import make_point, point_at_distance
from axbwave.kernels.profiles import MultiplierProfile
from axbwave.kernels.resolvent import (
    continuation_gap,
    f0_profile,
    ode_residual,
    resolvent_kernel,
    resolvent_kernel_closed_form,
    resolvent_params,
    small_r_leading,
)
from axbwave.kernels.transfer import cross_validate
from axbwave.lab.envelopes import default_wave_profile
from axbwave.lab.report import EstimateReport
from axbwave.quadrature.rules import QuadSpec

CLOSED_FORM_TOLERANCE = 1e-8
ODE_TOLERANCE = 1e-4
CONTINUATION_TOLERANCE = 1e-7
SMALL_R = 1e-3
WAVE_ORACLE_TOLERANCE = 1e-4
HEAT_ORACLE_TOLERANCE = 1e-6


def random_points(n: int, count: int, seed: int = 0, spread: float = 1.5):
    """Group points with x and the y-coordinates uniform in [−spread, spread]."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return [
        make_point(rng.uniform(-spread, spread), rng.uniform(-spread, spread, size=n))
        for _ in range(count)
    ]


def check_resolvent(
    n: int,
    nus,
    points: int = 20,
    seed: int = 0,
    quad: QuadSpec | None = None,
) -> EstimateReport:
    """Closed form (n = 2), ODE residual, l vs l + 1 agreement and small-R law."""
    started = time.perf_counter()
    checks = {}
    details = []
    d_values = np.linspace(1.01, 20.0, points)
    R_values = np.linspace(0.1, 5.0, points)
    small_tolerance = 0.2 if n == 1 else 0.05
    for nu in nus:
        p = resolvent_params(n, nu=nu)
        label = f"nu={complex(nu):g}"
        if n == 2:
            errors = []
            for g in random_points(n, points, seed):
                exact = resolvent_kernel_closed_form(p.nu, g)
                errors.append(abs(resolvent_kernel(p, g, quad) - exact) / abs(exact))
            checks[f"closed_form[{label}]"] = max(errors) <= CLOSED_FORM_TOLERANCE
            details.append({"nu": p.nu, "check": "closed_form", "max_error": max(errors)})
        residual = max(ode_residual(p, float(d), quad=quad) for d in d_values)
        checks[f"ode[{label}]"] = residual <= ODE_TOLERANCE
        gap = max(continuation_gap(p, float(R), quad) for R in R_values)
        checks[f"continuation[{label}]"] = gap <= CONTINUATION_TOLERANCE
        ratio = abs(f0_profile(p, SMALL_R, quad)) / small_r_leading(n, SMALL_R)
        checks[f"small_R[{label}]"] = abs(ratio - 1.0) <= small_tolerance
        details.extend([
            {"nu": p.nu, "check": "ode", "max_residual": residual},
            {"nu": p.nu, "check": "continuation", "max_gap": gap},
            {"nu": p.nu, "check": "small_R", "ratio": ratio},
        ])
    return EstimateReport(
        name="resolvent-suite",
        grid={"n": n, "nu": list(nus), "points": points, "seed": seed},
        checks=checks,
        runtime=time.perf_counter() - started,
        details=details,
    )


def oracle_points(R_values, seed: int = 0):
    """n = 2 points at the given distances with x drawn uniformly in [−R/2, R/2]."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return [point_at_distance(2, float(R), float(rng.uniform(-0.5, 0.5) * R)) for R in R_values]


def check_oracle(
    lam_t_pairs,
    R_values,
    psi: MultiplierProfile | None = None,
    seed: int = 0,
    quad: QuadSpec | None = None,
) -> EstimateReport:
    """cross_validate for each (λ, t); heat profiles use the tighter tolerance."""
    started = time.perf_counter()
    points = oracle_points(R_values, seed)
    checks = {}
    details = []
    for lam, t in lam_t_pairs:
        profile = psi if psi is not None else default_wave_profile(lam)
        tolerance = HEAT_ORACLE_TOLERANCE if profile.tau is not None else WAVE_ORACLE_TOLERANCE
        error = cross_validate(lam, t, profile, points, quad)
        checks[f"oracle[lambda={lam:g},t={t:g}]"] = math.isfinite(error) and error <= tolerance
        details.append({"lambda": lam, "t": t, "psi": profile.kind, "max_rel_error": error})
    return EstimateReport(
        name="oracle",
        grid={"pairs": [list(p) for p in lam_t_pairs], "R": list(R_values), "seed": seed},
        fitted_constant=max((d["max_rel_error"] for d in details), default=0.0),
        checks=checks,
        runtime=time.perf_counter() - started,
        details=details,
    )
