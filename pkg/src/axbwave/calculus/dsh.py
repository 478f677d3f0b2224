"""The operator D_sh: g ↦ d/dv (g / sh v) and its iterates.

D^l[e^{μv}] = e^{μv} A_l(μ, v), where A_l is a polynomial in μ, coth v and
csch v. With A_0 = 1,

    A_{l+1} = csch·(μ A_l + A_l') − coth·csch·A_l,

using coth' = −csch² and csch' = −csch·coth. coth² is reduced to 1 + csch²,
so every monomial is μ^a coth^b csch^c with b ∈ {0, 1}, a ≤ l and c ≥ l.
Coefficients are integers and are built once per l.

Near v = 0 the monomials are evaluated from exact Laurent series (Bernoulli
numbers via mpmath) instead of from powers of csch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from axbwave.common.errors import DomainError

SMALL_V = 1e-3
SERIES_ORDER = 16
SIN_SERIES_V = 0.5
SIN_SERIES_PHASE = math.pi / 2
SIN_TERMS = 14
SIN_V_TERMS = 14

Monomial = tuple[int, int, int]


def _add(poly: dict, key, coef) -> None:
    total = poly.get(key, 0) + coef
    if total:
        poly[key] = total
    else:
        poly.pop(key, None)


def _derivative(poly: dict) -> dict:
    out: dict = {}
    for (a, b, c), coef in poly.items():
        if b == 0:
            if c:
                _add(out, (a, 1, c), -c * coef)
        else:
            _add(out, (a, 0, c + 2), -(c + 1) * coef)
            if c:
                _add(out, (a, 0, c), -c * coef)
    return out


def _step(poly: dict) -> dict:
    out: dict = {}
    for (a, b, c), coef in poly.items():
        _add(out, (a + 1, b, c + 1), coef)
        if b == 0:
            _add(out, (a, 1, c + 1), -coef)
        else:
            _add(out, (a, 0, c + 1), -coef)
            _add(out, (a, 0, c + 3), -coef)
    for (a, b, c), coef in _derivative(poly).items():
        _add(out, (a, b, c + 1), coef)
    return out


@lru_cache(maxsize=None)
def dsh_coefficients(l: int) -> tuple[tuple[Monomial, int], ...]:
    """Monomials ((a, b, c), coefficient) of A_l, sorted."""
    if l < 0:
        raise DomainError(f"l must be nonnegative here, got {l}")
    if l == 0:
        return (((0, 0, 0), 1),)
    return tuple(sorted(_step(dict(dsh_coefficients(l - 1))).items()))


def _hyperbolic(v):
    """(coth v, csch v) for v > 0 without overflow."""
    v = np.asarray(v, dtype=float)
    denom = -np.expm1(-2.0 * v)
    csch = 2.0 * np.exp(-v) / denom
    coth = 1.0 + 2.0 * np.exp(-2.0 * v) / denom
    return coth, csch


# Laurent series are dicts {power: Fraction}, truncated above a given power.


def _series_mul(p: dict, q: dict, top: int) -> dict:
    out: dict = {}
    for i, a in p.items():
        for j, b in q.items():
            if i + j <= top:
                _add(out, i + j, a * b)
    return out


def _series_derivative(p: dict) -> dict:
    return {k - 1: k * c for k, c in p.items() if k != 0}


@lru_cache(maxsize=None)
def _bernoulli(k: int) -> Fraction:
    num, den = mpmath.bernfrac(k)
    return Fraction(int(num), int(den))


def _coth_series(top: int) -> dict:
    out = {}
    for k in range(0, top // 2 + 2):
        power = 2 * k - 1
        if power <= top:
            out[power] = Fraction(2 ** (2 * k)) * _bernoulli(2 * k) / math.factorial(2 * k)
    return out


def _csch_series(top: int) -> dict:
    out = {}
    for k in range(0, top // 2 + 2):
        power = 2 * k - 1
        if power <= top:
            factor = 2 * (Fraction(2) ** (2 * k - 1) - 1)
            out[power] = -factor * _bernoulli(2 * k) / math.factorial(2 * k)
    return out


@lru_cache(maxsize=None)
def _monomial_series(b: int, c: int, top: int) -> tuple[tuple[int, Fraction], ...]:
    # each extra factor starts at v^{-1}; pad so truncation errs only above top
    pad = top + b + c
    coth, csch = _coth_series(pad), _csch_series(pad)
    series = {0: Fraction(1)}
    for factor in [coth] * b + [csch] * c:
        series = _series_mul(series, factor, pad)
    return tuple(sorted((k, v) for k, v in series.items() if k <= top))


@lru_cache(maxsize=None)
def small_v_series(l: int, order: int = SERIES_ORDER) -> tuple[tuple[int, int, Fraction], ...]:
    """A_l(μ, v) = Σ coef μ^a v^p for small v, as (a, p, coef) with p ≤ order."""
    out: dict = {}
    for (a, b, c), coef in dsh_coefficients(l):
        for p, value in _monomial_series(b, c, order):
            _add(out, (a, p), coef * value)
    return tuple((a, p, value) for (a, p), value in sorted(out.items()))


def _broadcast(mu, v):
    mu = np.asarray(mu, dtype=complex)
    v = np.asarray(v, dtype=float)
    if np.any(v <= 0):
        raise DomainError("v must be positive")
    return mu, v


def dsh_amplitude(l: int, mu, v):
    """A_l(μ, v) = e^{−μv} D^l[e^{μv}]; mu and v broadcast together."""
    if l < -1:
        raise DomainError(f"l must be at least -1, got {l}")
    mu, v = _broadcast(mu, v)
    if l == -1:
        if np.any(mu.real >= 0):
            raise DomainError("D^{-1}[e^{mu v}] needs Re(mu) < 0")
        return np.sinh(v) / mu
    if l == 0:
        return np.ones(np.broadcast(mu, v).shape, dtype=complex)
    mu_b, v_b = np.broadcast_arrays(mu, v)
    out = np.zeros(mu_b.shape, dtype=complex)
    small = v_b < SMALL_V
    if np.any(~small):
        coth, csch = _hyperbolic(v_b[~small])
        m = mu_b[~small]
        total = np.zeros(m.shape, dtype=complex)
        for (a, b, c), coef in dsh_coefficients(l):
            total += coef * m**a * coth**b * csch**c
        out[~small] = total
    if np.any(small):
        m, vs = mu_b[small], v_b[small]
        total = np.zeros(m.shape, dtype=complex)
        for a, p, coef in small_v_series(l):
            total += float(coef) * m**a * vs**p
        out[small] = total
    return out


def dsh_apply_exp(l: int, mu, v):
    """D^l_sh[e^{μv}] at v, for l ≥ −1 (l = −1 needs Re μ < 0)."""
    mu_arr, v_arr = _broadcast(mu, v)
    result = dsh_amplitude(l, mu_arr, v_arr) * np.exp(mu_arr * v_arr)
    return complex(result) if result.ndim == 0 else result


@lru_cache(maxsize=None)
def _power_image(l: int, j: int, top: int) -> tuple[tuple[int, Fraction], ...]:
    """Laurent series of D^l[v^j], exact up to v^top."""
    pad = top + 2 * l + 2
    csch = _csch_series(pad)
    series = {j: Fraction(1)}
    for _ in range(l):
        series = _series_derivative(_series_mul(series, csch, pad))
    return tuple(sorted((k, c) for k, c in series.items() if k <= top))


@lru_cache(maxsize=None)
def dsh_sin_series(l: int) -> tuple[tuple[int, int, int, Fraction], ...]:
    """D^l[sin(sv)] near v = 0 as terms (k, m, n, a) of a·s^{2k}(sv)^{2m+1}v^{2n}.

    Built from sin(sv) = Σ (−1)^m (sv)^{2m+1}/(2m+1)! and the exact images
    D^l[v^{2m+1}]. Always k ≤ l; no negative powers of v occur.
    """
    if l < 0:
        raise DomainError(f"l must be nonnegative, got {l}")
    out: dict = {}
    for m in range(SIN_TERMS + 1):
        j = 2 * m + 1
        lead = Fraction((-1) ** m, math.factorial(j))
        for p, coef in _power_image(l, j, j + 2 * SIN_V_TERMS):
            assert p >= 1 and p % 2 == 1, f"unexpected power v^{p} in D^{l}[v^{j}]"
            k = max(0, (j - p) // 2)
            n = (p - j + 2 * k) // 2
            if n <= SIN_V_TERMS:
                _add(out, (k, m - k, n), lead * coef)
    return tuple((k, m, n, a) for (k, m, n), a in sorted(out.items()))


def _sin_closed(l: int, s, v):
    coth, csch = _hyperbolic(v)
    phase = s * v
    trig = (np.sin(phase), np.cos(phase), -np.sin(phase), -np.cos(phase))
    total = np.zeros(np.broadcast(s, v).shape)
    for (a, b, c), coef in dsh_coefficients(l):
        total = total + coef * s**a * trig[a % 4] * coth**b * csch**c
    return total


def _sin_series(l: int, s, v):
    total = np.zeros(np.broadcast(s, v).shape)
    phase = s * v
    for k, m, n, a in dsh_sin_series(l):
        total = total + float(a) * s ** (2 * k) * phase ** (2 * m + 1) * v ** (2 * n)
    return total


def dsh_apply_sin(l: int, s, v):
    """D^l_sh[sin(sv)] for real s and v > 0; equals Im D^l[e^{isv}]."""
    if l < 0:
        raise DomainError(f"l must be nonnegative, got {l}")
    s_b, v_b = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(v, dtype=float))
    if np.any(v_b <= 0):
        raise DomainError("v must be positive")
    if l == 0:
        out = np.sin(s_b * v_b)
    else:
        near = (v_b <= SIN_SERIES_V) & (np.abs(s_b * v_b) <= SIN_SERIES_PHASE)
        out = np.zeros(s_b.shape)
        if np.any(near):
            out[near] = _sin_series(l, s_b[near], v_b[near])
        if np.any(~near):
            out[~near] = _sin_closed(l, s_b[~near], v_b[~near])
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class DshTerm:
    """One term s^k·q_k(v)·factor of an expansion."""

    k: int
    exponent: int
    coefficients: tuple


@dataclass(frozen=True)
class DshExpansion:
    """D^l[e^{isv}] = e^{isv} Σ_k s^k q_k(v)·factor_k(v).

    large_v: factor e^{−lv} for every k, with q_k = i^k e^{lv}·[μ^k]A_l.
    small_v: factor v^{k−2l}, with q_k a polynomial valid for v ≲ 1.
    """

    l: int
    regime: str
    terms: tuple[DshTerm, ...]

    def powers(self) -> list[tuple[int, int]]:
        """(k, exponent) per term: exponent of e^{−v} (large_v) or of v (small_v)."""
        return [(term.k, term.exponent) for term in self.terms]

    def q(self, k: int, v):
        term = next(t for t in self.terms if t.k == k)
        v = np.asarray(v, dtype=float)
        total = np.zeros(v.shape, dtype=complex)
        if self.regime == "large_v":
            denom = -np.expm1(-2.0 * v)
            for (b, c), coef in term.coefficients:
                # e^{lv} csch^c = (2/(1 − e^{−2v}))^c e^{−(c−l)v}
                scaled = (2.0 / denom) ** c * np.exp(-(c - self.l) * v)
                coth = 1.0 + 2.0 * np.exp(-2.0 * v) / denom
                total += coef * coth**b * scaled
        else:
            for p, coef in term.coefficients:
                total += float(coef) * v ** (p - term.exponent)
        return (1j**k) * total

    def evaluate(self, s, v):
        s = np.asarray(s, dtype=float)
        v = np.asarray(v, dtype=float)
        total = np.zeros(np.broadcast(s, v).shape, dtype=complex)
        for term in self.terms:
            if self.regime == "large_v":
                factor = np.exp(-self.l * v)
            else:
                factor = v ** float(term.exponent)
            total = total + s**term.k * self.q(term.k, v) * factor
        result = np.exp(1j * s * v) * total
        return complex(result) if result.ndim == 0 else result


def dsh_expansion(l: int, regime: str) -> DshExpansion:
    if l < 0:
        raise DomainError(f"l must be nonnegative, got {l}")
    terms = []
    if regime == "large_v":
        for k in range(l + 1):
            coefficients = tuple(
                ((b, c), coef) for (a, b, c), coef in dsh_coefficients(l) if a == k
            )
            terms.append(DshTerm(k=k, exponent=l, coefficients=coefficients))
    elif regime == "small_v":
        for k in range(l + 1):
            coefficients = tuple((p, coef) for a, p, coef in small_v_series(l) if a == k)
            terms.append(DshTerm(k=k, exponent=k - 2 * l, coefficients=coefficients))
    else:
        raise DomainError(f"unknown regime {regime!r}")
    return DshExpansion(l=l, regime=regime, terms=tuple(terms))
