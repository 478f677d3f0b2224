"""Kernels of spectral multipliers of L by subordination.

For an even profile ψ of s = √L,

    k_ψ(x, y) = c_l e^{−nx/2} ∫_ℝ ψ(s) F_R(s) s ds,

    F_R(ζ) = ∫_R^∞ D^l[e^{iζv}] (ch v − ch R)^{l−n/2} dv,

    c_l = (−1)^l/(πi) · 2^{−1−n/2} π^{−n/2} / Γ(1 − n/2 + l).

F_R is computed on a whole s-grid at once (shared panels in v), and every
s-integral is a composite 7/15 Kronrod sum over that grid, with panel edges at
the profile's breakpoints and panels short enough to resolve the residual
phase. F_R(−s̄ + iδ) = conj F_R(s + iδ), so only |s| is integrated.

Wave kernels use the split

    k_λ^t = e^{−nx/2} e^{−nR/2} [G_λ(R, R − t) + G_λ(R, R + t)],
    G_λ(R, ρ) = (c_l/2) e^{nR/2} ∫_ℝ ψ(s/λ) F_R(s) s e^{i(ρ−R)s} ds.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import rgamma

from axbwave.calculus.dsh import dsh_amplitude, dsh_apply_sin
from axbwave.common.errors import DomainError
from axbwave.geometry.group import GroupPoint, radial_distance
from axbwave.kernels.profiles import MultiplierProfile, custom_profile
from axbwave.kernels.resolvent import default_l
from axbwave.quadrature.rules import QuadSpec, kronrod_grid
from axbwave.quadrature.singular import (
    cosh_gap_ratio,
    integrate_algebraic,
    integrate_decaying,
    integrate_singular_osc_many,
)

logger = logging.getLogger(__name__)

PHASE_PER_PANEL = 4.0
CONTOUR_HALF_WIDTH = 3.5


def c_l(n: float, l: int) -> complex:
    scale = 2.0 ** (-1 - n / 2) * math.pi ** (-n / 2) * float(rgamma(1 - n / 2 + l))
    return (-1) ** l / (math.pi * 1j) * scale


def _check_l(n: float, l: int | None) -> int:
    l = default_l(n) if l is None else l
    if not l - n / 2 > -1:
        raise DomainError(f"l={l} is not admissible for n={n}")
    return l


@dataclass(frozen=True)
class FTable:
    """F_R(s + i·shift) on a grid of real s."""

    n: float
    l: int
    R: float
    shift: float
    s: np.ndarray
    values: np.ndarray
    errors: np.ndarray


def F_R_table(
    n: float,
    l: int | None,
    R: float,
    s_values,
    quad: QuadSpec | None = None,
    *,
    shift: float = 0.0,
) -> FTable:
    """F_R(s + i·shift) for every s; shift > −n/2."""
    l = _check_l(n, l)
    if not shift > -n / 2:
        raise DomainError(f"Im(zeta) must exceed -n/2, got {shift}")
    s = np.asarray(s_values, dtype=float)
    magnitudes, inverse = np.unique(np.abs(s), return_inverse=True)

    def amplitude(v, freq):
        zeta = freq + 1j * shift
        mu = 1j * zeta[None, :]
        return dsh_amplitude(l, mu, v[:, None]) * np.exp(-shift * v)[:, None]

    res = integrate_singular_osc_many(
        amplitude, l - n / 2, R, magnitudes, math.inf, quad, n / 2 + shift,
    )
    positive = np.asarray(res.value)[inverse]
    values = np.where(s < 0, np.conj(positive), positive)
    errors = np.asarray(res.error_estimate)[inverse]
    logger.debug(
        "F table R=%.4g: %d frequencies, %d panels, tail at v=%.4g",
        R, magnitudes.size, res.subdivisions_used, res.truncation_point,
    )
    return FTable(n=n, l=l, R=R, shift=shift, s=s, values=values, errors=errors)


def F_R(n: float, l: int | None, R: float, s: float, quad: QuadSpec | None = None) -> complex:
    """∫_R^∞ D^l[e^{isv}] (ch v − ch R)^{l−n/2} dv."""
    return complex(F_R_table(n, l, R, [s], quad).values[0])


def F_R_sin(n: float, l: int | None, R: float, s: float, quad: QuadSpec | None = None) -> float:
    """∫_R^∞ D^l[sin(sv)] (ch v − ch R)^{l−n/2} dv, integrated directly.

    Equals (F_R(s) − F_R(−s))/(2i). Near v = R the integrand is summed from
    the exact small-v series of D^l[sin(sv)], so small R loses no digits.
    """
    l = _check_l(n, l)
    quad = quad or QuadSpec()
    if s < 0:
        raise DomainError(f"s must be nonnegative, got {s}")
    if s == 0:
        return 0.0
    beta = l - n / 2
    near = min(1.0, 2.0 * math.pi / s)
    head = integrate_algebraic(
        lambda w: dsh_apply_sin(l, s, R + w), near, beta, lambda w: cosh_gap_ratio(R, w), quad,
    )

    def tail_integrand(v):
        w = v - R
        return dsh_apply_sin(l, s, v) * (w * cosh_gap_ratio(R, w)) ** beta

    tail = integrate_decaying(tail_integrand, R + near, quad.with_hint(s).with_decay(n / 2))
    return float(np.ravel(head.value)[0]) + float(tail.value)


def s_edges(profile: MultiplierProfile, frequency: float, symmetric: bool = True) -> np.ndarray:
    """Panel edges over the support of ψ, split at its breakpoints.

    Panels are no longer than 1 and carry at most PHASE_PER_PANEL radians of
    e^{i·frequency·s}.
    """
    width = min(1.0, PHASE_PER_PANEL / max(abs(frequency), 1.0))
    points = {p for p in profile.edges() if profile.vanishes_below <= p <= profile.support}
    points |= {profile.vanishes_below, profile.support}
    points = sorted(points)
    pieces = []
    for lo, hi in zip(points[:-1], points[1:]):
        count = max(1, math.ceil((hi - lo) / width))
        pieces.append(np.linspace(lo, hi, count + 1)[:-1])
    positive = np.concatenate([*pieces, [points[-1]]])
    if not symmetric:
        return positive
    if positive[0] == 0.0:
        return np.concatenate([-positive[:0:-1], positive])
    return np.concatenate([-positive[::-1], positive])


def _kronrod_sum(nodes_values, kronrod, gauss):
    """Kronrod sums of the columns of nodes_values, with |K − G| as error."""
    k = kronrod @ nodes_values
    g = gauss @ nodes_values
    return k, np.abs(k - g)


@dataclass(frozen=True)
class GValues:
    rho: np.ndarray
    values: np.ndarray
    errors: np.ndarray


def G_lambda(
    n: float,
    l: int | None,
    psi: MultiplierProfile,
    lam: float,
    R: float,
    rhos,
    quad: QuadSpec | None = None,
) -> GValues:
    """G_λ(R, ρ) for every ρ, from one F_R table."""
    l = _check_l(n, l)
    rho = np.atleast_1d(np.asarray(rhos, dtype=float))
    profile = psi.scaled(lam)
    edges = s_edges(profile, float(np.max(np.abs(rho))))
    s, kronrod, gauss = kronrod_grid(edges)
    table = F_R_table(n, l, R, s, quad)
    base = profile(s) * s
    phase = np.exp(1j * np.outer(s, rho - R))
    columns = (base * table.values)[:, None] * phase
    k, disc = _kronrod_sum(columns, kronrod, gauss)
    scale = 0.5 * c_l(n, l) * math.exp(n * R / 2)
    propagated = np.abs(kronrod) @ (np.abs(base) * table.errors)
    return GValues(rho=rho, values=scale * k, errors=abs(scale) * (disc + propagated))


def G_lambda_sin(
    n: float,
    l: int | None,
    psi: MultiplierProfile,
    lam: float,
    R: float,
    rhos,
    quad: QuadSpec | None = None,
) -> GValues:
    """i c_l e^{nR/2} ∫_0^∞ ψ(s/λ) F̃_R(s) s e^{i(ρ−R)s} ds.

    Pairs G(R, R − t) + G(R, R + t) sum to the same kernel as G_lambda;
    F̃_R = (F_R(s) − F_R(−s))/(2i) carries the improved small-R bound.
    """
    l = _check_l(n, l)
    rho = np.atleast_1d(np.asarray(rhos, dtype=float))
    profile = psi.scaled(lam)
    edges = s_edges(profile, float(np.max(np.abs(rho))), symmetric=False)
    s, kronrod, gauss = kronrod_grid(edges)
    table = F_R_table(n, l, R, np.concatenate([s, -s]), quad)
    half = s.size
    f_sin = (table.values[:half] - table.values[half:]) / 2j
    f_err = 0.5 * (table.errors[:half] + table.errors[half:])
    base = profile(s) * s
    columns = (base * f_sin)[:, None] * np.exp(1j * np.outer(s, rho - R))
    k, disc = _kronrod_sum(columns, kronrod, gauss)
    scale = 1j * c_l(n, l) * math.exp(n * R / 2)
    propagated = np.abs(kronrod) @ (np.abs(base) * f_err)
    return GValues(rho=rho, values=scale * k, errors=abs(scale) * (disc + propagated))


@dataclass(frozen=True)
class KernelSample:
    n: float
    l: int
    R: float
    x: float
    value: complex
    error_estimate: float


@dataclass(frozen=True)
class WaveKernelSample:
    n: float
    lam: float
    t: float
    l: int
    R: float
    x: float
    value: complex
    G_minus: complex
    G_plus: complex
    error_estimate: float


def multiplier_sample(
    n: float,
    l: int | None,
    psi: MultiplierProfile,
    g: GroupPoint,
    quad: QuadSpec | None = None,
    method: str = "full",
) -> KernelSample:
    """k_ψ at g with an error estimate; see multiplier_kernel."""
    l = _check_l(n, l)
    if g.n != n:
        raise DomainError(f"dimension mismatch: n={n}, point n={g.n}")
    R = radial_distance(g)
    if R == 0:
        raise DomainError("kernels are evaluated away from the identity")
    if method == "full":
        s, kronrod, gauss = kronrod_grid(s_edges(psi, R))
        table = F_R_table(n, l, R, s, quad)
        base = psi(s) * s
        k, disc = _kronrod_sum((base * table.values)[:, None], kronrod, gauss)
        constant = c_l(n, l)
        integral, err = k[0], disc[0] + float(np.abs(kronrod) @ (np.abs(base) * table.errors))
    elif method == "half":
        s, kronrod, gauss = kronrod_grid(s_edges(psi, R, symmetric=False))
        f_sin = np.array([F_R_sin(n, l, R, si, quad) for si in s])
        base = psi(s) * s
        k, disc = _kronrod_sum((base * f_sin)[:, None], kronrod, gauss)
        constant = 2j * c_l(n, l)
        integral, err = k[0], disc[0]
    else:
        raise DomainError(f"unknown method {method!r}")
    factor = math.exp(-n * g.x / 2)
    value = factor * constant * integral
    logger.debug("multiplier kernel at R=%.4g: imaginary residual %.3g", R, abs(value.imag))
    return KernelSample(
        n=n, l=l, R=R, x=g.x, value=value, error_estimate=factor * abs(constant) * float(err),
    )


def multiplier_kernel(
    n: float,
    l: int | None,
    psi: MultiplierProfile,
    g: GroupPoint,
    quad: QuadSpec | None = None,
    method: str = "full",
) -> complex:
    """k_ψ(g) = c_l e^{−nx/2} ∫ ψ(s) F_R(s) s ds.

    method "full" integrates over the whole line from an F_R table; "half"
    integrates 2i ∫_0^∞ ψ(s) F̃_R(s) s ds with F̃_R computed directly.
    """
    return multiplier_sample(n, l, psi, g, quad, method).value


def check_wave_profile(psi: MultiplierProfile, lam: float) -> None:
    if lam <= 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    if psi.support > 2.0:
        raise DomainError(f"wave kernels need psi supported in [-2, 2], support is {psi.support}")
    if lam >= 1 and psi.vanishes_below < 1.0:
        raise DomainError("for lambda >= 1 psi must vanish on [-1, 1] (use bump_band)")


def wave_kernel(
    n: float,
    l: int | None,
    psi: MultiplierProfile,
    lam: float,
    t: float,
    g: GroupPoint,
    quad: QuadSpec | None = None,
) -> WaveKernelSample:
    """Kernel of ψ(√L/λ) cos(t√L) at g."""
    l = _check_l(n, l)
    check_wave_profile(psi, lam)
    if g.n != n:
        raise DomainError(f"dimension mismatch: n={n}, point n={g.n}")
    R = radial_distance(g)
    if R == 0:
        raise DomainError("kernels are evaluated away from the identity")
    G = G_lambda(n, l, psi, lam, R, [R - t, R + t], quad)
    factor = math.exp(-n * g.x / 2) * math.exp(-n * R / 2)
    return WaveKernelSample(
        n=n,
        lam=lam,
        t=t,
        l=l,
        R=R,
        x=g.x,
        value=factor * (G.values[0] + G.values[1]),
        G_minus=complex(G.values[0]),
        G_plus=complex(G.values[1]),
        error_estimate=factor * float(G.errors[0] + G.errors[1]),
    )


def wave_kernel_rescaled(n, l, psi, lam, t, g, quad=None) -> WaveKernelSample:
    """W_λ^t = k_λ^{t/λ}: the kernel of ψ(√L/λ) cos(t√L/λ)."""
    return wave_kernel(n, l, psi, lam, t / lam, g, quad)


def wave_kernel_sin(
    n: float,
    l: int | None,
    psi: MultiplierProfile,
    lam: float,
    t: float,
    g: GroupPoint,
    quad: QuadSpec | None = None,
) -> complex:
    """Kernel of ψ(√L/λ) sin(t√L)/√L: c_l e^{−nx/2} ∫ ψ(s/λ) sin(ts) F_R(s) ds."""
    l = _check_l(n, l)
    check_wave_profile(psi, lam)
    if g.n != n:
        raise DomainError(f"dimension mismatch: n={n}, point n={g.n}")
    R = radial_distance(g)
    if R == 0:
        raise DomainError("kernels are evaluated away from the identity")
    if t == 0:
        return 0j
    profile = psi.scaled(lam)
    s, kronrod, _ = kronrod_grid(s_edges(profile, R + abs(t)))
    table = F_R_table(n, l, R, s, quad)
    integral = kronrod @ (profile(s) * np.sin(t * s) * table.values)
    return math.exp(-n * g.x / 2) * c_l(n, l) * integral


def regularised_profile(psi_u: MultiplierProfile, eps: float, nodes: int = 64):
    """ψ_ε(w) = (2πε)^{−1/2} ∫ ψ(u) e^{−(u−w)²/2ε} du for complex w.

    psi_u is a profile of u = s² supported in [vanishes_below, support].
    """
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")
    edges = np.array(sorted({*psi_u.edges(), psi_u.vanishes_below, psi_u.support}))
    edges = edges[(edges >= psi_u.vanishes_below) & (edges <= psi_u.support)]
    x, w = np.polynomial.legendre.leggauss(nodes)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    u = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel() * psi_u(u)
    norm = (2.0 * math.pi * eps) ** -0.5

    def evaluate(zeta):
        zeta = np.asarray(zeta, dtype=complex)
        return norm * np.exp(-((u[None, :] - zeta.ravel()[:, None]) ** 2) / (2.0 * eps)) @ weights

    return evaluate


def regularised_multiplier(psi_u: MultiplierProfile, eps: float) -> MultiplierProfile:
    """The real profile s ↦ ψ_ε(s²), treated as zero beyond |s| = 3.5."""
    psi_eps = regularised_profile(psi_u, eps)

    def profile(a):
        return psi_eps(np.asarray(a) ** 2).real.reshape(np.shape(a))

    return custom_profile(profile, CONTOUR_HALF_WIDTH)


def contour_multiplier_kernel(
    n: float,
    l: int | None,
    psi_u: MultiplierProfile,
    eps: float,
    delta: float,
    g: GroupPoint,
    quad: QuadSpec | None = None,
) -> complex:
    """c_l e^{−nx/2} ∫ ψ_ε(ζ²) F_R(ζ) ζ dζ along ζ = s + iδ, |s| ≤ 3.5.

    ψ_ε is entire and F_R analytic for Im ζ > −n/2, so for small δ this
    equals multiplier_kernel of s ↦ ψ_ε(s²).
    """
    l = _check_l(n, l)
    if g.n != n:
        raise DomainError(f"dimension mismatch: n={n}, point n={g.n}")
    R = radial_distance(g)
    if R == 0:
        raise DomainError("kernels are evaluated away from the identity")
    psi_eps = regularised_profile(psi_u, eps)
    width = min(0.5, PHASE_PER_PANEL / max(R, 1.0))
    count = math.ceil(CONTOUR_HALF_WIDTH / width)
    edges = np.linspace(-CONTOUR_HALF_WIDTH, CONTOUR_HALF_WIDTH, 2 * count + 1)
    s, kronrod, _ = kronrod_grid(edges)
    zeta = s + 1j * delta
    table = F_R_table(n, l, R, s, quad, shift=delta)
    integral = kronrod @ (psi_eps(zeta**2) * table.values * zeta)
    return math.exp(-n * g.x / 2) * c_l(n, l) * integral
