"""The resolvent kernel of L − λ.

For Re ν < 0 and ν² = −λ the right convolution kernel of (L − λ)^{−1} is

    k(x, y) = 2^{−1−n/2} π^{−n/2} e^{−nx/2} f0(R),

    f0(R) = (−1)^l Γ(l − n/2 + 1)^{−1} ∫_R^∞ D^l[e^{νv}] (ch v − ch R)^{l−n/2} dv,

which does not depend on the admissible l (l − n/2 > −1). As a function of
d = ch R, f0 solves −n²/4 f − (n+1) d f' − (d² − 1) f'' = λ f.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma, rgamma

from axbwave.calculus.dsh import dsh_amplitude
from axbwave.common.errors import DomainError
from axbwave.geometry.group import GroupPoint, arcch, radial_distance, radial_distance_xy
from axbwave.geometry.radial import density_table
from axbwave.quadrature.rules import QuadResult, QuadSpec, integrate_panels
from axbwave.quadrature.singular import integrate_singular_osc_many

logger = logging.getLogger(__name__)


def default_l(n: float) -> int:
    """The l with l − n/2 ∈ [−1/2, 0] for integer n (−1 < l − n/2 ≤ 0 in general)."""
    return math.floor(n / 2 - 1) + 1


@dataclass(frozen=True)
class ResolventParams:
    n: float
    lam: complex
    nu: complex
    l: int

    def __post_init__(self):
        if not self.nu.real < 0:
            raise DomainError(f"Re(nu) must be negative, got {self.nu}")
        if not self.l - self.n / 2 > -1:
            raise DomainError(f"l={self.l} is not admissible for n={self.n}")

    @property
    def beta(self) -> float:
        return self.l - self.n / 2

    def with_l(self, l: int) -> ResolventParams:
        return ResolventParams(self.n, self.lam, self.nu, l)


def resolvent_params(n: float, lam=None, nu=None, l: int | None = None) -> ResolventParams:
    """Parameters from either λ ∉ [0, ∞) or ν with Re ν < 0."""
    if n <= 0:
        raise DomainError(f"dimension must be positive, got {n}")
    if (lam is None) == (nu is None):
        raise DomainError("give exactly one of lam and nu")
    if lam is not None:
        lam = complex(lam)
        if lam.imag == 0 and lam.real >= 0:
            raise DomainError(f"lambda={lam} lies in the spectrum [0, inf)")
        nu = 1j * cmath.sqrt(lam)
        if nu.real >= 0:
            nu = -nu
    else:
        nu = complex(nu)
        if nu.real >= 0:
            raise DomainError(f"Re(nu) must be negative, got {nu}")
        lam = -(nu**2)
    return ResolventParams(n=n, lam=lam, nu=nu, l=default_l(n) if l is None else l)


def kernel_constant(n: float) -> float:
    return 2.0 ** (-1 - n / 2) * math.pi ** (-n / 2)


def f0_integral(
    p: ResolventParams,
    R: float,
    quad: QuadSpec | None = None,
    *,
    frozen: QuadResult | None = None,
) -> QuadResult:
    """∫_R^∞ D^l[e^{νv}] (ch v − ch R)^{l−n/2} dv.

    The oscillation e^{i Im(ν) v} is carried by the panel rule; the rest of
    e^{νv} stays in the amplitude.
    """
    nu = p.nu

    def amplitude(v, _s):
        v = np.asarray(v, dtype=float)
        return (dsh_amplitude(p.l, nu, v) * np.exp(nu.real * v))[:, None]

    res = integrate_singular_osc_many(
        amplitude, p.beta, R, [nu.imag], math.inf, quad, p.n / 2 - nu.real, frozen=frozen,
    )
    return QuadResult(
        value=complex(np.ravel(res.value)[0]),
        error_estimate=float(np.ravel(res.error_estimate)[0]),
        subdivisions_used=res.subdivisions_used,
        truncation_point=res.truncation_point,
        layouts=res.layouts,
    )


def f0_profile(p: ResolventParams, R: float, quad: QuadSpec | None = None) -> complex:
    """(−1)^l Γ(l − n/2 + 1)^{−1} ∫_R^∞ D^l[e^{νv}](ch v − ch R)^{l−n/2} dv."""
    if not R > 0:
        raise DomainError(f"R must be positive, got {R}")
    return (-1) ** p.l * float(rgamma(p.beta + 1)) * f0_integral(p, R, quad).value


def radial_profile(p: ResolventParams, R: float, quad: QuadSpec | None = None) -> complex:
    """k at distance R with the e^{−nx/2} factor removed."""
    return kernel_constant(p.n) * f0_profile(p, R, quad)


def resolvent_kernel(p: ResolventParams, g: GroupPoint, quad: QuadSpec | None = None) -> complex:
    if p.n != g.n:
        raise DomainError(f"dimension mismatch: params n={p.n}, point n={g.n}")
    R = radial_distance(g)
    if R == 0:
        raise DomainError("the resolvent kernel is singular at the identity")
    return math.exp(-p.n * g.x / 2) * radial_profile(p, R, quad)


def resolvent_kernel_closed_form(nu: complex, g: GroupPoint) -> complex:
    """n = 2: (4π)^{−1} e^{−x} e^{νR}/sh R."""
    if g.n != 2:
        raise DomainError("the closed form holds for n = 2 only")
    R = radial_distance(g)
    if R == 0:
        raise DomainError("the resolvent kernel is singular at the identity")
    return math.exp(-g.x) * cmath.exp(nu * R) / (4.0 * math.pi * math.sinh(R))


def ode_residual(
    p: ResolventParams, d: float, h: float | None = None, quad: QuadSpec | None = None,
) -> float:
    """Relative residual of −n²/4 f − (n+1)d f' − (d²−1) f'' − λ f at d.

    f', f'' are Richardson-extrapolated central differences with steps h and
    h/2 (default h = 0.01·(d − 1)), so the step shrinks with the distance to
    the singular point d = 1. All evaluations share one frozen panel layout,
    so the differences see no adaptivity noise.
    """
    if h is None:
        h = 1e-2 * (d - 1.0)
    if not d - 1.0 > 10.0 * h > 0.0:
        raise DomainError(f"step {h} too large for d - 1 = {d - 1.0}")
    base = f0_integral(p, arcch(d), quad)
    f = base.value

    def differences(step):
        plus = f0_integral(p, arcch(d + step), quad, frozen=base).value
        minus = f0_integral(p, arcch(d - step), quad, frozen=base).value
        return (plus - minus) / (2.0 * step), (plus - 2.0 * f + minus) / step**2

    coarse_first, coarse_second = differences(h)
    fine_first, fine_second = differences(h / 2.0)
    first = (4.0 * fine_first - coarse_first) / 3.0
    second = (4.0 * fine_second - coarse_second) / 3.0
    lhs = -(p.n**2) / 4.0 * f - (p.n + 1) * d * first - (d**2 - 1.0) * second
    residual = abs(lhs - p.lam * f) / (abs(p.lam * f) + 1e-14)
    logger.debug("ode residual n=%s nu=%s d=%.4g: %.3g", p.n, p.nu, d, residual)
    return residual


def continuation_gap(p: ResolventParams, R: float, quad: QuadSpec | None = None) -> float:
    """Relative difference between the l and l + 1 evaluations of f0."""
    a = f0_profile(p, R, quad)
    b = f0_profile(p.with_l(p.l + 1), R, quad)
    return abs(a - b) / abs(a)


def small_r_leading(n: float, R: float) -> float:
    """Leading small-R term of f0: a power law for n ≠ 1, a log law for n = 1."""
    if n == 1:
        return math.sqrt(2.0 / math.pi) * abs(math.log(R))
    return 2.0 ** (n / 2 - 1) * math.pi**-0.5 * float(gamma((n - 1) / 2)) * R ** (1 - n)


@dataclass(frozen=True)
class L1Check:
    integral: float
    bound: float
    ratio: float
    error_estimate: float


def weighted_l1_resolvent(
    p: ResolventParams, R_max: float, quad: QuadSpec | None = None,
) -> L1Check:
    """∫_{R ≤ R_max} |k| against (1 + |ν|)^{n/2}[1 + ∫_0^{R_max} e^{Re(ν) r} r dr]."""
    quad = quad or QuadSpec()
    outer = QuadSpec(rel_tol=max(quad.rel_tol, 1e-7), abs_tol=quad.abs_tol)

    def integrand(R):
        values = np.array([abs(radial_profile(p, r, quad)) for r in np.atleast_1d(R)])
        return values * density_table(p.n, R, quad).values

    res = integrate_panels(integrand, 0.0, R_max, outer, breakpoints=np.arange(1.0, R_max))
    a = p.nu.real
    radial = (math.exp(a * R_max) * (a * R_max - 1.0) + 1.0) / a**2
    bound = (1.0 + abs(p.nu)) ** (p.n / 2) * (1.0 + radial)
    return L1Check(
        integral=float(res.value),
        bound=bound,
        ratio=float(res.value) / bound,
        error_estimate=float(res.error_estimate),
    )


def _test_function_terms(x, y):
    """φ = (1 − x² − ‖y‖²)_+^4 and L φ, for points in the unit ball."""
    n = y.shape[1]
    y_sq = np.einsum("ij,ij->i", y, y)
    u = np.clip(1.0 - x**2 - y_sq, 0.0, None)
    phi = u**4
    xx = -8.0 * u**3 + 48.0 * x**2 * u**2
    yy = -8.0 * n * u**3 + 48.0 * y_sq * u**2
    return phi, -xx - np.exp(2.0 * x) * yy


def fundamental_solution_check(
    p: ResolventParams,
    samples: int = 400_000,
    seed: int = 0,
) -> tuple[complex, float]:
    """Monte Carlo ∫ (L − λ)φ · k dx dy, which should equal φ(identity) = 1.

    n = 2 with the closed-form kernel. Radii are stratified on [0, 1] with
    weight 4πr², which cancels the 1/R singularity of k.
    Returns (estimate, standard error).
    """
    if p.n != 2:
        raise DomainError("the weak-form check uses the n = 2 closed form")
    rng = np.random.Generator(np.random.PCG64(seed))
    r = (np.arange(samples) + rng.uniform(size=samples)) / samples
    direction = rng.standard_normal((samples, 3))
    direction /= np.linalg.norm(direction, axis=1)[:, None]
    points = r[:, None] * direction
    x, y = points[:, 0], points[:, 1:]
    phi, l_phi = _test_function_terms(x, y)
    R = radial_distance_xy(x, np.einsum("ij,ij->i", y, y))
    k = np.exp(-x) * np.exp(p.nu * R) / (4.0 * math.pi * np.sinh(R))
    values = (l_phi - p.lam * phi) * k * 4.0 * math.pi * r**2
    return complex(values.mean()), float(np.abs(values).std(ddof=1) / math.sqrt(samples))
