"""Even multiplier profiles ψ(s), s = √L.

Built-in bumps are piecewise polynomials assembled from the smoothstep
S_N(x) = x^{N+1} Σ_k C(N+k, k) C(2N+1, N−k) (−x)^k, which rises from 0 to 1
on [0, 1] with N vanishing derivatives at both ends. The heat profile
e^{−τs²} has no compact support; it is treated as zero beyond √(37/τ).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial import Polynomial, hermite

from axbwave.common.errors import DomainError

SMOOTHSTEP_ORDER = 7
GAUSS_CUTOFF = 37.0

BUILTIN_KINDS = ("bump_low", "bump_band", "bump_wide", "gauss_heat")


def smoothstep(order: int = SMOOTHSTEP_ORDER) -> Polynomial:
    coef = np.zeros(2 * order + 2)
    for k in range(order + 1):
        coef[order + 1 + k] = (
            math.comb(order + k, k) * math.comb(2 * order + 1, order - k) * (-1) ** k
        )
    return Polynomial(coef)


@dataclass(frozen=True)
class Piece:
    lo: float
    hi: float
    poly: Polynomial


def _rising(lo: float, hi: float, order: int) -> Polynomial:
    # evaluated in the local variable (s - lo)/(hi - lo); expanding in s cancels badly
    return Polynomial(smoothstep(order).coef, domain=[lo, hi], window=[0.0, 1.0])


def _stretched(poly: Polynomial, lam: float) -> Polynomial:
    return Polynomial(poly.coef, domain=np.asarray(poly.domain) * lam, window=poly.window)


def plateau_pieces(rise, fall, order: int = SMOOTHSTEP_ORDER) -> tuple[Piece, ...]:
    """Pieces of a bump that rises on rise=(a, b) (None: starts at 1),
    equals 1 up to fall[0] and falls to 0 on fall=(c, d)."""
    pieces = []
    start = 0.0
    if rise is not None:
        pieces.append(Piece(rise[0], rise[1], _rising(rise[0], rise[1], order)))
        start = rise[1]
    if fall[0] > start:
        pieces.append(Piece(start, fall[0], Polynomial([1.0])))
    pieces.append(Piece(fall[0], fall[1], 1.0 - _rising(fall[0], fall[1], order)))
    return tuple(pieces)


@dataclass(frozen=True)
class MultiplierProfile:
    """An even profile ψ, evaluated on |s|.

    Either pieces (piecewise polynomial on [0, support]) or func is set.
    vanishes_below is the inner edge of the support (0 when ψ(0) ≠ 0).
    smoothness None means C^∞.
    """

    kind: str
    support: float
    vanishes_below: float = 0.0
    smoothness: int | None = SMOOTHSTEP_ORDER
    pieces: tuple[Piece, ...] = ()
    func: object = None
    breakpoints: tuple[float, ...] = ()
    tau: float | None = None
    even: bool = True

    def __call__(self, s):
        a = np.abs(np.asarray(s, dtype=float))
        if self.func is not None:
            out = np.asarray(self.func(a), dtype=float)
            return np.where(a <= self.support, out, 0.0)
        out = np.zeros(a.shape)
        for i, piece in enumerate(self.pieces):
            last = i == len(self.pieces) - 1
            mask = (a >= piece.lo) & ((a <= piece.hi) if last else (a < piece.hi))
            out = np.where(mask, piece.poly(a), out)
        return out

    def edges(self) -> tuple[float, ...]:
        """Positive breakpoints (kinks and support ends)."""
        if self.pieces:
            points = {p.lo for p in self.pieces} | {p.hi for p in self.pieces}
            return tuple(sorted(points))
        return tuple(sorted({*self.breakpoints, self.support}))

    def scaled(self, lam: float) -> MultiplierProfile:
        """s ↦ ψ(s/λ)."""
        if lam <= 0:
            raise DomainError(f"scale must be positive, got {lam}")
        if self.pieces:
            pieces = tuple(
                Piece(p.lo * lam, p.hi * lam, _stretched(p.poly, lam))
                for p in self.pieces
            )
            return replace(
                self,
                pieces=pieces,
                support=self.support * lam,
                vanishes_below=self.vanishes_below * lam,
            )
        if self.tau is not None:
            return gauss_heat(self.tau / lam**2)
        func = self.func
        return replace(
            self,
            func=lambda a: func(a / lam),
            support=self.support * lam,
            vanishes_below=self.vanishes_below * lam,
            breakpoints=tuple(b * lam for b in self.breakpoints),
        )

    def cn_norms(self, order: int | None = None, samples: int = 2001) -> list[float]:
        """sup |ψ^{(k)}| for k = 0..order (default: the smoothness)."""
        order = self.smoothness if order is None else order
        if order is None:
            raise DomainError("give an order for a C^∞ profile")
        norms = [0.0] * (order + 1)
        if self.pieces:
            for piece in self.pieces:
                grid = np.linspace(piece.lo, piece.hi, samples)
                for k in range(order + 1):
                    norms[k] = max(norms[k], float(np.max(np.abs(piece.poly.deriv(k)(grid)))))
            return norms
        if self.tau is not None:
            root = math.sqrt(self.tau)
            grid = np.linspace(0.0, self.support, samples)
            for k in range(order + 1):
                unit = np.zeros(k + 1)
                unit[k] = 1.0
                values = root**k * hermite.hermval(root * grid, unit) * np.exp(-self.tau * grid**2)
                norms[k] = float(np.max(np.abs(values)))
            return norms
        raise DomainError(f"no derivative norms for a {self.kind} profile")

    def verify_support(self, samples: int = 4001) -> bool:
        """Sample ψ outside its claimed support; True when it vanishes there."""
        outer = np.linspace(self.support, 2.0 * self.support + 1.0, samples)[1:]
        inner = np.linspace(0.0, self.vanishes_below, samples)[:-1] if self.vanishes_below else []
        return bool(np.all(self(outer) == 0.0) and np.all(self(np.asarray(inner)) == 0.0))


def bump_low(order: int = SMOOTHSTEP_ORDER) -> MultiplierProfile:
    """1 on [−1, 1], falls to 0 on 1 ≤ |s| ≤ 2."""
    return MultiplierProfile(
        kind="bump_low",
        support=2.0,
        smoothness=order,
        pieces=plateau_pieces(None, (1.0, 2.0), order),
    )


def bump_band(order: int = SMOOTHSTEP_ORDER) -> MultiplierProfile:
    """Supported in 1 ≤ |s| ≤ 2, peaks at |s| = 3/2."""
    return MultiplierProfile(
        kind="bump_band",
        support=2.0,
        vanishes_below=1.0,
        smoothness=order,
        pieces=plateau_pieces((1.0, 1.5), (1.5, 2.0), order),
    )


def bump_wide(order: int = SMOOTHSTEP_ORDER) -> MultiplierProfile:
    """Supported in 1/2 ≤ |s| ≤ 4 and equal to 1 on 1 ≤ |s| ≤ 2."""
    return MultiplierProfile(
        kind="bump_wide",
        support=4.0,
        vanishes_below=0.5,
        smoothness=order,
        pieces=plateau_pieces((0.5, 1.0), (2.0, 4.0), order),
    )


def band_bump(lo: float, mid: float, hi: float, order: int = SMOOTHSTEP_ORDER) -> MultiplierProfile:
    """Rises on [lo, mid], falls on [mid, hi]."""
    if not 0 <= lo < mid < hi:
        raise DomainError(f"need 0 <= lo < mid < hi, got {lo}, {mid}, {hi}")
    return MultiplierProfile(
        kind="custom",
        support=hi,
        vanishes_below=lo,
        smoothness=order,
        pieces=plateau_pieces((lo, mid), (mid, hi), order),
    )


def gauss_heat(tau: float) -> MultiplierProfile:
    """e^{−τs²}; as a function of L this is the heat semigroup at time τ."""
    if tau <= 0:
        raise DomainError(f"tau must be positive, got {tau}")
    return MultiplierProfile(
        kind="gauss_heat",
        support=math.sqrt(GAUSS_CUTOFF / tau),
        smoothness=None,
        func=lambda a: np.exp(-tau * a**2),
        tau=tau,
    )


def custom_profile(
    func, support: float, breakpoints=(), vanishes_below: float = 0.0,
) -> MultiplierProfile:
    """Wrap an even callable of |s| supported in [vanishes_below, support]."""
    return MultiplierProfile(
        kind="custom",
        support=float(support),
        vanishes_below=vanishes_below,
        smoothness=None,
        func=func,
        breakpoints=tuple(float(b) for b in breakpoints),
    )


def zero_profile() -> MultiplierProfile:
    return custom_profile(lambda a: np.zeros_like(a), support=1.0)


def profile_by_name(name: str, tau: float = 1.0) -> MultiplierProfile:
    builders = {"bump_low": bump_low, "bump_band": bump_band, "bump_wide": bump_wide}
    if name in builders:
        return builders[name]()
    if name == "gauss_heat":
        return gauss_heat(tau)
    raise DomainError(f"unknown profile {name!r}; expected one of {', '.join(BUILTIN_KINDS)}")
