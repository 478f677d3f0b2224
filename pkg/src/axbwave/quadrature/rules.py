"""Panel rules and the adaptive panel engine.

Two rules are provided. Gauss-Kronrod 7/15 is used for general integrands.
The Legendre-Filon rule is used for integrands of the form a(v)·e^{iωv} with
a smooth, non-oscillating amplitude: the amplitude is interpolated at 15
Gauss-Legendre nodes and the product with e^{iωv} is integrated exactly using
the moments ∫_{-1}^{1} P_k(u) e^{iθu} du = 2 i^k j_k(θ).

The engine refines breadth-first: every generation evaluates all pending
panels in one vectorised call, accepts the panels whose error estimate is
below their width-proportional share of the tolerance, and bisects the rest.
Accepted panels are summed in order of their left endpoint, so results do not
depend on refinement history.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import spherical_jn

from axbwave.common.errors import DomainError, QuadratureError

logger = logging.getLogger(__name__)

# Kronrod abscissae (descending, last is the centre) and weights; the Gauss
# 7-point rule lives on the odd-indexed abscissae.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_KRONROD_NODES = np.concatenate([-_XGK[:7], _XGK[7::-1]])
_KRONROD_WEIGHTS = np.concatenate([_WGK[:7], _WGK[7::-1]])
_GAUSS7_WEIGHTS = np.zeros(15)
_GAUSS7_WEIGHTS[[1, 3, 5]] = _WG[:3]
_GAUSS7_WEIGHTS[7] = _WG[3]
_GAUSS7_WEIGHTS[[13, 11, 9]] = _WG[:3]

_FILON_ORDER = 15
_LEGENDRE_NODES, _LEGENDRE_WEIGHTS = np.polynomial.legendre.leggauss(_FILON_ORDER)
_LEGENDRE_VANDER = np.polynomial.legendre.legvander(_LEGENDRE_NODES, _FILON_ORDER - 1)
_LEGENDRE_NORM = (2.0 * np.arange(_FILON_ORDER) + 1.0) / 2.0
_I_POWERS = 1j ** np.arange(_FILON_ORDER)

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadSpec:
    """Accuracy targets and hints for one quadrature call.

    tail_cutoff_decades: a semi-infinite tail is truncated once the certified
        remainder is this many decades below the running total (or below
        abs_tol, whichever comes first).
    oscillation_hint: dominant frequency of the integrand, used to size the
        initial panels of rules that resolve oscillation by subdivision.
    decay_rate: caller's exponential decay bound κ, |f(v)| ≲ e^{-κv}.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    max_subdivisions: int = 20000
    tail_cutoff_decades: float = 15.0
    oscillation_hint: float | None = None
    decay_rate: float | None = None

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError(f"tolerances must be positive, got {self.rel_tol}, {self.abs_tol}")
        if self.max_subdivisions < 1:
            raise DomainError(f"max_subdivisions must be >= 1, got {self.max_subdivisions}")
        if self.tail_cutoff_decades <= 0:
            raise DomainError("tail_cutoff_decades must be positive")
        if self.decay_rate is not None and self.decay_rate <= 0:
            raise DomainError(f"decay_rate must be positive, got {self.decay_rate}")

    def refined(self, factor: float = 10.0) -> QuadSpec:
        """A copy with both tolerances divided by factor."""
        return replace(self, rel_tol=self.rel_tol / factor, abs_tol=self.abs_tol / factor)

    def with_decay(self, rate: float) -> QuadSpec:
        return replace(self, decay_rate=rate)

    def with_hint(self, frequency: float | None) -> QuadSpec:
        return replace(self, oscillation_hint=frequency)


@dataclass(frozen=True)
class PanelLayout:
    """Accepted panels of an adaptive run, reusable as a frozen mesh."""

    lo: np.ndarray
    hi: np.ndarray
    rule: str


@dataclass(frozen=True)
class QuadResult:
    """Value and claimed error bound of one integral.

    value and error_estimate are arrays when the integrand was vector valued.
    layouts holds the frozen meshes of every piece the integral was split
    into, keyed by piece name.
    """

    value: complex | np.ndarray
    error_estimate: float | np.ndarray
    subdivisions_used: int
    truncation_point: float = np.inf
    layouts: dict = field(default_factory=dict, compare=False, repr=False)


def _as_columns(values: np.ndarray, points: int) -> np.ndarray:
    values = np.asarray(values)
    if values.ndim == 0:
        values = np.full(points, values)
    return values.reshape(points, -1)


def gauss_kronrod_panels(func, lo: np.ndarray, hi: np.ndarray):
    """Apply the 7/15 pair on every panel.

    Returns (value, error) with shape (panels, components).
    """
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    nodes = centre[:, None] + half[:, None] * _KRONROD_NODES[None, :]
    f = _as_columns(func(nodes.ravel()), nodes.size).reshape(len(lo), 15, -1)
    kronrod = np.einsum("pnk,n->pk", f, _KRONROD_WEIGHTS) * half[:, None]
    gauss = np.einsum("pnk,n->pk", f, _GAUSS7_WEIGHTS) * half[:, None]
    mean = kronrod / (2.0 * half[:, None])
    resasc = np.einsum("pnk,n->pk", np.abs(f - mean[:, None, :]), _KRONROD_WEIGHTS)
    resasc = resasc * np.abs(half[:, None])
    resabs = np.einsum("pnk,n->pk", np.abs(f), _KRONROD_WEIGHTS) * np.abs(half[:, None])
    err = np.abs(kronrod - gauss)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where(resasc > 0, scaled, err)
    err = np.maximum(err, 50.0 * _EPS * resabs)
    return kronrod, err


def kronrod_grid(edges) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes and Kronrod/Gauss weights of the composite 7/15 rule on edges.

    Gauss weights are zero on the Kronrod-only nodes, so both sums run over
    the same nodes and their difference estimates the error.
    """
    edges = np.asarray(edges, dtype=float)
    centre = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = centre[:, None] + half[:, None] * _KRONROD_NODES[None, :]
    kronrod = half[:, None] * _KRONROD_WEIGHTS[None, :]
    gauss = half[:, None] * _GAUSS7_WEIGHTS[None, :]
    return nodes.ravel(), kronrod.ravel(), gauss.ravel()


def legendre_moments(theta: np.ndarray) -> np.ndarray:
    """∫_{-1}^{1} P_k(u) e^{iθu} du for k < 15, shape theta.shape + (15,)."""
    theta = np.asarray(theta, dtype=float)
    k = np.arange(_FILON_ORDER)
    magnitude = np.abs(theta)[..., None]
    jn = spherical_jn(k, magnitude)
    parity = np.where(theta[..., None] < 0, (-1.0) ** k, 1.0)
    return 2.0 * _I_POWERS * jn * parity


def filon_panels(amplitude, lo: np.ndarray, hi: np.ndarray, omega: np.ndarray):
    """Legendre-Filon rule for ∫ a(v) e^{iωv} dv on every panel.

    amplitude(v) returns shape (len(v), len(omega)). Returns (value, error)
    with shape (panels, len(omega)).
    """
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    nodes = centre[:, None] + half[:, None] * _LEGENDRE_NODES[None, :]
    a = _as_columns(amplitude(nodes.ravel()), nodes.size).reshape(len(lo), _FILON_ORDER, -1)
    coeffs = np.einsum("pnk,n,nj->pjk", a, _LEGENDRE_WEIGHTS, _LEGENDRE_VANDER)
    coeffs = coeffs * _LEGENDRE_NORM[None, :, None]
    theta = half[:, None] * omega[None, :]
    moments = np.moveaxis(legendre_moments(theta), -1, 1)
    phase = np.exp(1j * centre[:, None] * omega[None, :])
    value = half[:, None] * phase * np.einsum("pjk,pjk->pk", coeffs, moments)
    err = 2.0 * np.abs(half[:, None]) * (np.abs(coeffs[:, -2, :]) + np.abs(coeffs[:, -1, :]))
    err = np.maximum(err, 50.0 * _EPS * np.abs(half[:, None]) * np.abs(coeffs[:, 0, :]))
    return value, err


def _apply_rule(func, lo, hi, rule: str, omega):
    if rule == "filon":
        return filon_panels(func, lo, hi, omega)
    return gauss_kronrod_panels(func, lo, hi)


def adaptive_panels(
    func,
    edges,
    quad: QuadSpec,
    *,
    rule: str = "gk15",
    omega=None,
    scale: float | np.ndarray = 0.0,
):
    """Adaptively integrate func over the partition given by edges.

    func maps a 1-D array of abscissae to values of shape (m,) or (m, k).
    With rule="filon", func is the amplitude and omega the frequencies.
    scale is an externally known magnitude of the full integral, used for the
    relative tolerance when this call computes only a piece of it.

    Returns (value, error, panels_used, layout) with value/error of shape (k,).
    """
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise DomainError("edges must be a strictly increasing sequence of at least two points")
    if rule == "filon":
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
    lo, hi = edges[:-1].copy(), edges[1:].copy()
    span = edges[-1] - edges[0]
    done_lo, done_hi, done_val, done_err = [], [], [], []
    done_sum = 0.0
    used = lo.size
    while lo.size:
        val, err = _apply_rule(func, lo, hi, rule, omega)
        running = done_sum + val.sum(axis=0)
        tol = np.maximum(quad.abs_tol, quad.rel_tol * np.maximum(np.abs(running), scale))
        share = ((hi - lo) / span)[:, None]
        ok = np.all(err <= share * tol[None, :], axis=1)
        floor = (hi - lo) <= 64.0 * _EPS * np.maximum(1.0, np.abs(lo))
        if np.any(floor & ~ok):
            logger.debug("accepting %d panels at the width floor", int(np.sum(floor & ~ok)))
        ok |= floor
        done_lo.append(lo[ok])
        done_hi.append(hi[ok])
        done_val.append(val[ok])
        done_err.append(err[ok])
        done_sum = done_sum + val[ok].sum(axis=0)
        bad_lo, bad_hi = lo[~ok], hi[~ok]
        used += bad_lo.size
        if used > quad.max_subdivisions:
            raise QuadratureError(
                f"no convergence on [{edges[0]:.6g}, {edges[-1]:.6g}] "
                f"within {quad.max_subdivisions} panels",
            )
        mid = 0.5 * (bad_lo + bad_hi)
        lo = np.concatenate([bad_lo, mid])
        hi = np.concatenate([mid, bad_hi])

    all_lo = np.concatenate(done_lo)
    order = np.argsort(all_lo, kind="stable")
    values = np.concatenate(done_val)[order]
    errors = np.concatenate(done_err)[order]
    layout = PanelLayout(lo=all_lo[order], hi=np.concatenate(done_hi)[order], rule=rule)
    return values.sum(axis=0), errors.sum(axis=0), used, layout


def fixed_panels(func, layout: PanelLayout, *, omega=None):
    """Re-apply a frozen layout without adaptivity; returns (value, error)."""
    if layout.rule == "filon":
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
    val, err = _apply_rule(func, layout.lo, layout.hi, layout.rule, omega)
    return val.sum(axis=0), err.sum(axis=0)


def integrate_panels(func, a: float, b: float, quad: QuadSpec | None = None, breakpoints=()):
    """Adaptive Gauss-Kronrod integral of func over [a, b].

    Interior breakpoints (kinks, support edges) start as panel edges. When
    quad carries an oscillation_hint, the initial panels are no wider than
    π/|hint|.
    """
    quad = quad or QuadSpec()
    if not b > a:
        if b == a:
            return QuadResult(
                value=0.0, error_estimate=0.0, subdivisions_used=0, truncation_point=b,
            )
        raise DomainError(f"integration interval [{a}, {b}] is reversed")
    edges = _initial_edges(a, b, breakpoints, quad.oscillation_hint)
    value, err, used, layout = adaptive_panels(func, edges, quad)
    return QuadResult(
        value=_squeeze(value),
        error_estimate=_squeeze(err),
        subdivisions_used=used,
        truncation_point=b,
        layouts={"main": layout},
    )


def _initial_edges(a: float, b: float, breakpoints=(), hint: float | None = None) -> np.ndarray:
    inner = [p for p in breakpoints if a < p < b]
    edges = np.unique(np.concatenate([[a, b], inner]))
    if hint:
        width = np.pi / abs(hint)
        pieces = [
            np.linspace(lo, hi, int(np.ceil((hi - lo) / width)) + 1)[:-1]
            for lo, hi in zip(edges[:-1], edges[1:])
        ]
        edges = np.concatenate([*pieces, [b]])
    return edges


def _squeeze(x: np.ndarray):
    x = np.asarray(x)
    if x.size == 1:
        return x.reshape(()).item()
    return x
