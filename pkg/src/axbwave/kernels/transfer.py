"""Transfer of radial kernels on ℝ³ to kernels on G (n = 2).

    T f(x, y) = e^{−x} (R / sh R) f(R)

commutes with convolution, intertwines −Δ on ℝ³ with L on G and preserves
L¹ norms. Heat, resolvent and smoothed wave kernels of ℝ³ are explicit or
one-dimensional integrals, so T turns them into reference values for the
subordination formulas in kernels.spectral.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from axbwave.common.errors import DomainError
from axbwave.geometry.group import GroupPoint, laplacian_fd, radial_distance
from axbwave.geometry.radial import integrate_radial
from axbwave.kernels.profiles import MultiplierProfile
from axbwave.kernels.spectral import check_wave_profile, multiplier_sample, s_edges, wave_kernel
from axbwave.quadrature.rules import QuadSpec, integrate_panels, kronrod_grid
from axbwave.quadrature.singular import integrate_decaying, sinhc

logger = logging.getLogger(__name__)

FFT_GRID = 128
FFT_BOX = 40.0
IMAGINARY_TOLERANCE = 1e-6


@dataclass(frozen=True)
class RadialR3Kernel:
    """A radial kernel f(R) on ℝ³.

    decay_rate, when set, bounds R² |f(R)| ≲ e^{−κR}; it lets L¹ norms run
    over [0, ∞).
    """

    profile: object
    label: str
    decay_rate: float | None = None
    params: dict = field(default_factory=dict, compare=False)

    def __call__(self, R):
        return np.asarray(self.profile(np.asarray(R, dtype=float)))


def heat_r3(t: float) -> RadialR3Kernel:
    """(4πt)^{−3/2} e^{−R²/4t}."""
    if t <= 0:
        raise DomainError(f"heat time must be positive, got {t}")
    norm = (4.0 * math.pi * t) ** -1.5
    return RadialR3Kernel(
        profile=lambda R: norm * np.exp(-(R**2) / (4.0 * t)),
        label=f"heat(t={t:g})",
        decay_rate=1.0,
        params={"t": t},
    )


def resolvent_r3(nu: complex) -> RadialR3Kernel:
    """e^{νR}/(4πR), the kernel of (−Δ + ν²)^{−1} for Re ν < 0."""
    nu = complex(nu)
    if nu.real >= 0:
        raise DomainError(f"Re(nu) must be negative, got {nu}")
    return RadialR3Kernel(
        profile=lambda R: np.exp(nu * R) / (4.0 * math.pi * R),
        label=f"resolvent(nu={nu:g})",
        decay_rate=-0.5 * nu.real,
        params={"nu": nu},
    )


def _sine_transform(profile: MultiplierProfile, t: float, R: np.ndarray):
    """(2π²R)^{−1} ∫_0^∞ m(s) cos(ts) sin(sR) s ds with m = profile, and |K − G|."""
    s, kronrod, gauss = kronrod_grid(s_edges(profile, t + float(np.max(R)), symmetric=False))
    safe = np.where(R == 0.0, 1.0, R)
    # sin(sR)/R, with its limit s at R = 0
    kernel = np.where(R[None, :] == 0.0, s[:, None], np.sin(np.outer(s, R)) / safe[None, :])
    columns = (profile(s) * np.cos(t * s) * s)[:, None] * kernel
    k = kronrod @ columns
    g = gauss @ columns
    scale = 1.0 / (2.0 * math.pi**2)
    return scale * k, scale * np.abs(k - g)


def r3_smoothed_wave(lam: float, t: float, psi: MultiplierProfile, R, quad: QuadSpec | None = None):
    """Radial kernel of ψ(√−Δ/λ) cos(t√−Δ) on ℝ³ at R.

    R may be an array; R = 0 is the removable limit.
    """
    radii = np.atleast_1d(np.asarray(R, dtype=float))
    if np.any(radii < 0):
        raise DomainError("R must be nonnegative")
    values, errors = _sine_transform(psi.scaled(lam), t, radii)
    logger.debug(
        "r3 smoothed wave lam=%g t=%g: max quadrature discrepancy %.3g",
        lam, t, float(np.max(errors)),
    )
    return float(values[0]) if np.ndim(R) == 0 else values


def smoothed_wave_r3(
    lam: float, t: float, psi: MultiplierProfile, quad: QuadSpec | None = None,
) -> RadialR3Kernel:
    return RadialR3Kernel(
        profile=lambda R: r3_smoothed_wave(lam, t, psi, R, quad),
        label=f"smoothed_wave(lam={lam:g}, t={t:g}, psi={psi.kind})",
        params={"lam": lam, "t": t, "psi": psi.kind},
    )


def transfer(f: RadialR3Kernel, g: GroupPoint):
    """e^{−x} (R/sh R) f(R) at g."""
    if g.n != 2:
        raise DomainError(f"the transfer map is defined for n = 2 only, got n={g.n}")
    R = radial_distance(g)
    value = complex(np.ravel(f(R))[0])
    value = math.exp(-g.x) * float(1.0 / sinhc(R)) * value
    return value.real if value.imag == 0 else value


def r3_multiplier_kernel_fft(profile, grid: int = FFT_GRID, box: float = FFT_BOX):
    """Radial kernel of m(|ξ|) on ℝ³ by a 3-D inverse FFT.

    The kernel is sampled on a grid^3 lattice of side box and averaged over
    shells of one lattice spacing. Returns (mean shell radius, shell value).
    """
    h = box / grid
    freq = 2.0 * math.pi * np.fft.fftfreq(grid, d=h)
    kx, ky, kz = np.meshgrid(freq, freq, freq, indexing="ij", sparse=True)
    multiplier = profile(np.sqrt(kx**2 + ky**2 + kz**2))
    kernel = np.fft.fftshift(np.fft.ifftn(multiplier).real) / h**3
    axis = (np.arange(grid) - grid // 2) * h
    x, y, z = np.meshgrid(axis, axis, axis, indexing="ij", sparse=True)
    radius = np.sqrt(x**2 + y**2 + z**2).ravel()
    shell = np.floor(radius / h + 0.5).astype(int)
    counts = np.bincount(shell)
    keep = counts > 0
    mean_radius = np.bincount(shell, weights=radius)[keep] / counts[keep]
    values = np.bincount(shell, weights=kernel.ravel())[keep] / counts[keep]
    inside = mean_radius < 0.5 * box
    return mean_radius[inside], values[inside]


def cross_validate(
    lam: float, t: float, psi: MultiplierProfile, sample_points, quad: QuadSpec | None = None,
) -> float:
    """max |k_group − T f_ℝ³| / max |T f_ℝ³| over the sample points.

    The group side is wave_kernel for a wave profile and multiplier_sample
    of ψ(·/λ) for a heat profile, which is compared at t = 0 only. The ℝ³
    side is the Gaussian itself for a heat profile and the sine transform
    otherwise.
    """
    if psi.tau is None:
        check_wave_profile(psi, lam)
        reference_kernel = smoothed_wave_r3(lam, t, psi, quad)
    else:
        if lam <= 0:
            raise DomainError(f"lambda must be positive, got {lam}")
        if t != 0:
            raise DomainError("heat profiles are cross-validated at t = 0")
        reference_kernel = heat_r3(psi.tau / lam**2)
    deviation = 0.0
    scale = 0.0
    for g in sample_points:
        if psi.tau is None:
            value = wave_kernel(2, None, psi, lam, t, g, quad).value
        else:
            value = multiplier_sample(2, None, psi.scaled(lam), g, quad).value
        reference = transfer(reference_kernel, g)
        if abs(value.imag) > IMAGINARY_TOLERANCE * max(abs(value), 1e-300):
            logger.warning("non-real residual %.3g at R=%.4g", abs(value.imag), radial_distance(g))
        deviation = max(deviation, abs(value.real - reference))
        scale = max(scale, abs(reference))
    if scale == 0.0:
        return deviation
    return deviation / scale


def l1_norm_r3(f: RadialR3Kernel, quad: QuadSpec | None = None, upper: float = math.inf) -> float:
    """4π ∫_0^upper R² |f(R)| dR."""
    quad = quad or QuadSpec()

    def integrand(R):
        return 4.0 * math.pi * R**2 * np.abs(f(R))

    if not math.isinf(upper):
        result = integrate_panels(integrand, 0.0, upper, quad, breakpoints=np.arange(1.0, upper))
        return float(result.value)
    if f.decay_rate is None:
        raise DomainError(f"{f.label} has no decay rate; give a finite upper limit")
    head = integrate_panels(integrand, 0.0, 1.0, quad)
    tail = integrate_decaying(integrand, 1.0, quad.with_decay(f.decay_rate))
    return float(head.value + tail.value)


def l1_norm_group(
    f: RadialR3Kernel, quad: QuadSpec | None = None, upper: float = math.inf,
) -> float:
    """∫_G |T f| dg = ∫_0^upper (R/sh R) |f(R)| J(R) dR with n = 2."""
    quad = quad or QuadSpec()
    if math.isinf(upper):
        if f.decay_rate is None:
            raise DomainError(f"{f.label} has no decay rate; give a finite upper limit")
        quad = quad.with_decay(f.decay_rate)

    def g(R):
        return np.abs(f(R)) / sinhc(R)

    return float(integrate_radial(2, g, quad, upper=upper).value)


@dataclass(frozen=True)
class IntertwiningSample:
    R: float
    x: float
    laplacian: float
    time_derivative: float
    relative_error: float


def laplacian_intertwining_check(t: float, points, h: float = 1e-3) -> list[IntertwiningSample]:
    """Compare L(T heat_t) with −∂_t T heat_t at each point.

    L is applied by central differences along the left-invariant fields, the
    time derivative by a central difference of relative step 1e−4.
    """
    dt = 1e-4 * t

    def heat_at(time):
        kernel = heat_r3(time)

        def value(x, y):
            return transfer(kernel, GroupPoint(float(x), tuple(float(c) for c in y)))

        return value

    samples = []
    for g in points:
        if g.n != 2:
            raise DomainError(f"the transfer map is defined for n = 2 only, got n={g.n}")
        lap = laplacian_fd(heat_at(t), g, h)
        y = g.y_array()
        time_derivative = (heat_at(t + dt)(g.x, y) - heat_at(t - dt)(g.x, y)) / (2.0 * dt)
        error = abs(lap + time_derivative) / abs(time_derivative)
        samples.append(
            IntertwiningSample(
                R=radial_distance(g),
                x=g.x,
                laplacian=lap,
                time_derivative=time_derivative,
                relative_error=error,
            ),
        )
    return samples
