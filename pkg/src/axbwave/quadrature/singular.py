"""Integrals with an algebraic endpoint factor, linear-phase oscillation and
exponentially decaying tails.

The model integral is

    ∫_R^upper f(v) (ch v − ch R)^β e^{isv} dv,   β > −1,

split into a near piece [R, R+a] that carries the endpoint factor and a
regular piece [R+a, upper). The near piece is integrated in the variable u
with v = R + u^q, which turns the endpoint factor into a smooth function of u
for the exponents that occur (β ∈ ½ℤ and ¼ℤ). The regular piece carries the
oscillation on Legendre-Filon panels. Infinite tails are truncated where the
caller's decay bound certifies the remainder.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from axbwave.common.errors import DecayHintError, DomainError
from axbwave.quadrature.rules import (
    PanelLayout,
    QuadResult,
    QuadSpec,
    adaptive_panels,
    fixed_panels,
)

logger = logging.getLogger(__name__)

_TAIL_SAMPLES = 64
_MAX_TAIL_EXTENSIONS = 12
_GROWTH_SLACK = 1e3


def sinhc(z):
    """sh(z)/z with the removable singularity filled in."""
    z = np.asarray(z, dtype=float)
    safe = np.where(z == 0.0, 1.0, z)
    return np.where(z == 0.0, 1.0, np.sinh(safe) / safe)


def cosh_gap_ratio(R, w):
    """(ch(R+w) − ch R)/w, computed without cancellation."""
    w = np.asarray(w, dtype=float)
    return np.sinh(R + 0.5 * w) * sinhc(0.5 * w)


def endpoint_substitution(beta: float) -> tuple[float, float]:
    """Exponent q of the substitution w = u^q and the resulting power of u.

    After w = u^q the factor q u^{q−1} w^β becomes q u^{q(1+β)−1}; q is
    chosen so that this power is a nonnegative integer where possible.
    """
    if beta <= -1:
        raise DomainError(f"invalid beta {beta}: the endpoint factor is not integrable")
    for q in (1.0, 2.0, 4.0):
        power = q * (1.0 + beta) - 1.0
        if abs(power - round(power)) < 1e-12 and round(power) >= 0:
            return q, float(round(power))
    if beta < 0:
        return 1.0 / (1.0 + beta), 0.0
    return 1.0, beta


def integrate_algebraic(
    f,
    length: float,
    beta: float,
    ratio,
    quad: QuadSpec | None = None,
    *,
    frozen: PanelLayout | None = None,
    scale: float | np.ndarray = 0.0,
) -> QuadResult:
    """∫_0^length f(w)·(w·ratio(w))^β dw with ratio smooth and positive.

    f and ratio may be vector valued, returning shape (m, k); a (m,) result
    is broadcast against the other.
    """
    quad = quad or QuadSpec()
    if length <= 0:
        raise DomainError(f"length must be positive, got {length}")
    q, power = endpoint_substitution(beta)

    def integrand(u):
        w = u**q
        weight = np.asarray(ratio(w), dtype=float) ** beta
        jac = q * u**power
        values = np.asarray(f(w))
        if weight.ndim == 2 or values.ndim == 2:
            return np.atleast_2d(values.T).T * np.atleast_2d(weight.T).T * jac[:, None]
        return values * weight * jac

    u_max = length ** (1.0 / q)
    if frozen is not None:
        value, err = fixed_panels(integrand, frozen)
        return QuadResult(value, err, len(frozen.lo), length, {"near": frozen})
    edges = np.linspace(0.0, u_max, 3)
    value, err, used, layout = adaptive_panels(integrand, edges, quad, scale=scale)
    return QuadResult(value, err, used, length, {"near": layout})


def _growth_constant(magnitude, lo: float, hi: float, base: float, kappa: float) -> np.ndarray:
    v = np.linspace(lo, hi, _TAIL_SAMPLES)
    mag = np.abs(np.asarray(magnitude(v)))
    if mag.ndim == 1:
        mag = mag[:, None]
    return np.max(mag * np.exp(kappa * (v - base))[:, None], axis=0)


def _tail_target(total: np.ndarray, quad: QuadSpec) -> np.ndarray:
    relative = min(0.1 * quad.rel_tol, 10.0 ** (-quad.tail_cutoff_decades))
    return np.maximum(0.1 * quad.abs_tol, relative * np.abs(total))


def _march(segment, magnitude, start: float, base: float, kappa: float, quad, head, scale):
    """Integrate [start, V) with V chosen so the decay bound certifies the rest.

    segment(lo, hi, scale) returns (value, error, used, layout) for [lo, hi].
    Returns (value, error, used, layouts, V, remainder).
    """
    end = start + max(2.0, 10.0 / kappa)
    value, err, used, layout = segment(start, end, scale)
    layouts = [layout]
    bound = _growth_constant(magnitude, start, end, base, kappa)
    for _ in range(_MAX_TAIL_EXTENSIONS):
        total = head + value
        target = _tail_target(total, quad)
        with np.errstate(divide="ignore"):
            needed = base + np.log(np.maximum(bound, 1e-300) / (kappa * target)) / kappa
        need = float(np.max(needed))
        if need <= end:
            break
        if need - base > 700.0 / kappa:
            raise DecayHintError(
                f"tail past v={need:.4g} needed; decay rate {kappa} is too optimistic",
            )
        v2, e2, u2, l2 = segment(end, need, np.maximum(np.abs(total), scale))
        late = _growth_constant(magnitude, end, need, base, kappa)
        if np.any(late > _GROWTH_SLACK * bound):
            raise DecayHintError(
                f"integrand grows against the decay hint {kappa} beyond v={end:.4g}",
            )
        bound = np.maximum(bound, late)
        value, err, used = value + v2, err + e2, used + u2
        layouts.append(l2)
        end = need
    else:
        raise DecayHintError("tail truncation did not settle")
    remainder = bound * math.exp(-kappa * (end - base)) / kappa
    logger.debug(
        "tail truncated at v=%.6g with remainder bound %.3g", end, float(np.max(remainder)),
    )
    return value, err + remainder, used, layouts, end, remainder


def _merge(layouts: list[PanelLayout], shift: float = 0.0) -> PanelLayout:
    return PanelLayout(
        lo=np.concatenate([lay.lo for lay in layouts]) - shift,
        hi=np.concatenate([lay.hi for lay in layouts]) - shift,
        rule=layouts[0].rule,
    )


def _unit_edges(lo: float, hi: float, width: float = 1.0) -> np.ndarray:
    return np.linspace(lo, hi, max(1, math.ceil((hi - lo) / width)) + 1)


def integrate_singular_osc_many(
    f_smooth,
    beta: float,
    R: float,
    s_values,
    upper: float,
    quad: QuadSpec | None = None,
    decay_rate: float | None = None,
    *,
    frozen: QuadResult | None = None,
) -> QuadResult:
    """∫_R^upper f(v, s)(ch v − ch R)^β e^{isv} dv for every s in s_values.

    f_smooth(v, s) must return the non-oscillating amplitude with shape
    (len(v), len(s)). Panels are shared by all frequencies. With frozen, the
    panel layout of an earlier result is re-applied (shifted to this R)
    without adaptivity.
    """
    quad = quad or QuadSpec()
    s = np.atleast_1d(np.asarray(s_values, dtype=float))
    if not R > 0:
        raise DomainError(f"R must be positive, got {R}")
    if not upper > R:
        raise DomainError(f"upper limit {upper} must exceed R={R}")
    kappa = decay_rate if decay_rate is not None else quad.decay_rate
    if math.isinf(upper) and kappa is None:
        raise DomainError("an infinite upper limit needs a decay rate")
    endpoint_substitution(beta)

    s_max = float(np.max(np.abs(s)))
    near_length = 1.0 if s_max == 0 else min(1.0, 2.0 * math.pi / s_max)
    near_length = min(near_length, upper - R)

    def near(w):
        v = R + w
        return f_smooth(v, s) * np.exp(1j * np.outer(v, s))

    def amplitude(v):
        w = v - R
        gap = w * cosh_gap_ratio(R, w)
        return f_smooth(v, s) * (gap**beta)[:, None]

    def ratio(w):
        return cosh_gap_ratio(R, w)

    if frozen is not None:
        near_layout = frozen.layouts["near"]
        head = integrate_algebraic(near, near_length, beta, ratio, quad, frozen=near_layout)
        value, err = head.value, head.error_estimate
        regular = frozen.layouts.get("regular")
        if regular is not None:
            shifted = PanelLayout(regular.lo + R, regular.hi + R, regular.rule)
            v2, e2 = fixed_panels(amplitude, shifted, omega=s)
            value, err = value + v2, err + e2
        return QuadResult(
            value, err, frozen.subdivisions_used, frozen.truncation_point, frozen.layouts,
        )

    head = integrate_algebraic(near, near_length, beta, ratio, quad)
    value = np.atleast_1d(head.value)
    err = np.atleast_1d(head.error_estimate)
    used = head.subdivisions_used
    layouts = {"near": head.layouts["near"]}
    start = R + near_length
    truncation = upper

    def segment(lo, hi, scale):
        edges = _unit_edges(lo, hi)
        return adaptive_panels(amplitude, edges, quad, rule="filon", omega=s, scale=scale)

    if start < upper:
        if math.isinf(upper):
            v2, e2, u2, parts, truncation, _ = _march(
                segment, amplitude, start, R, kappa, quad, value, np.abs(value),
            )
        else:
            v2, e2, u2, part = segment(start, upper, np.abs(value))
            parts = [part]
        value, err, used = value + v2, err + e2, used + u2
        layouts["regular"] = _merge(parts, shift=R)

    return QuadResult(
        value=value,
        error_estimate=err,
        subdivisions_used=used,
        truncation_point=truncation,
        layouts=layouts,
    )


def integrate_singular_osc(
    f_smooth,
    beta: float,
    R: float,
    s: float,
    upper: float,
    quad: QuadSpec | None = None,
    decay_rate: float | None = None,
    *,
    frozen: QuadResult | None = None,
) -> QuadResult:
    """∫_R^upper f_smooth(v)(ch v − ch R)^β e^{isv} dv for one frequency s.

    f_smooth(v) is the non-oscillating amplitude.
    """

    def amplitude(v, _s):
        return np.asarray(f_smooth(v), dtype=complex).reshape(-1, 1)

    res = integrate_singular_osc_many(
        amplitude, beta, R, [s], upper, quad, decay_rate, frozen=frozen,
    )
    return QuadResult(
        value=complex(np.asarray(res.value).ravel()[0]),
        error_estimate=float(np.asarray(res.error_estimate).ravel()[0]),
        subdivisions_used=res.subdivisions_used,
        truncation_point=res.truncation_point,
        layouts=res.layouts,
    )


def integrate_decaying(f, a: float, quad: QuadSpec) -> QuadResult:
    """∫_a^∞ f(v) dv with truncation certified by quad.decay_rate.

    With an oscillation_hint the initial panels are no wider than π/|hint|.
    """
    if quad.decay_rate is None:
        raise DomainError("integrate_decaying needs quad.decay_rate")
    width = min(1.0, math.pi / abs(quad.oscillation_hint)) if quad.oscillation_hint else 1.0

    def segment(lo, hi, scale):
        return adaptive_panels(f, _unit_edges(lo, hi, width), quad, scale=scale)

    value, err, used, parts, end, _ = _march(segment, f, a, a, quad.decay_rate, quad, 0.0, 0.0)
    value = np.asarray(value)
    err = np.asarray(err)
    return QuadResult(
        value=value.reshape(()).item() if value.size == 1 else value,
        error_estimate=float(err.reshape(()).item()) if err.size == 1 else err,
        subdivisions_used=used,
        truncation_point=end,
        layouts={"regular": _merge(parts)},
    )
