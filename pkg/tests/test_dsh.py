"""Tests for calculus/dsh.py — iterates of g ↦ d/dv (g / sh v)."""

import math

import numpy as np
import pytest

from axbwave.calculus.dsh import (
    SMALL_V,
    dsh_amplitude,
    dsh_apply_exp,
    dsh_apply_sin,
    dsh_coefficients,
    dsh_expansion,
    small_v_series,
)
from axbwave.common.errors import DomainError


def _numeric_dsh(func, v, h=1e-5):
    """One application of D by a central difference."""
    return (func(v + h) / math.sinh(v + h) - func(v - h) / math.sinh(v - h)) / (2.0 * h)


def test_first_iterate_coefficients():
    # D[e^{μv}] = e^{μv}(μ csch − coth csch)
    assert dict(dsh_coefficients(1)) == {(1, 0, 1): 1, (0, 1, 1): -1}


def test_zeroth_iterate_is_identity():
    assert dsh_apply_exp(0, 0.3 + 2j, 1.2) == pytest.approx(np.exp((0.3 + 2j) * 1.2))


def test_first_iterate_matches_difference_quotient():
    mu = -0.5 + 3j
    v = 0.9
    expected = _numeric_dsh(lambda w: np.exp(mu * w), v)
    assert dsh_apply_exp(1, mu, v) == pytest.approx(expected, rel=1e-8)


def test_second_iterate_matches_difference_quotient():
    mu = -1.0 + 1j
    v = 1.3

    def first(w):
        return dsh_apply_exp(1, mu, w)

    expected = _numeric_dsh(first, v)
    assert dsh_apply_exp(2, mu, v) == pytest.approx(expected, rel=1e-6)


def test_inverse_iterate():
    mu, v = -2.0 + 0.5j, 0.7
    value = dsh_apply_exp(-1, mu, v)
    assert value == pytest.approx(np.sinh(v) * np.exp(mu * v) / mu)


def test_inverse_iterate_needs_negative_real_part():
    with pytest.raises(DomainError):
        dsh_apply_exp(-1, 1.0, 0.5)


def test_rejects_nonpositive_v():
    with pytest.raises(DomainError):
        dsh_amplitude(1, 1j, 0.0)


@pytest.mark.parametrize("l", [1, 2, 3])
def test_series_continuous_across_switch(l):
    mu = 2j - 0.5
    below = dsh_amplitude(l, mu, SMALL_V * (1 - 1e-9))
    above = dsh_amplitude(l, mu, SMALL_V * (1 + 1e-9))
    assert below == pytest.approx(above, rel=1e-6)


def test_small_v_series_has_leading_pole():
    # A_1 = μ csch − coth csch ∼ −v^{−2} as v → 0
    terms = {(a, p): c for a, p, c in small_v_series(1)}
    assert terms[(0, -2)] == -1


@pytest.mark.parametrize("l", [1, 2])
@pytest.mark.parametrize("v", [0.05, 0.4, 2.0])
def test_sin_is_imaginary_part_of_exp(l, v):
    s = 3.0
    expected = dsh_apply_exp(l, 1j * s, v).imag
    assert dsh_apply_sin(l, s, v) == pytest.approx(expected, rel=1e-8, abs=1e-9)


def test_sin_series_at_tiny_v():
    # D[sin(sv)] = (s cos(sv) − coth v sin(sv)) csch v, about −s(s² + 1)v/3 here
    s, v = 2.0, 1e-4
    closed = (s * math.cos(s * v) - math.sin(s * v) / math.tanh(v)) / math.sinh(v)
    assert dsh_apply_sin(1, s, v) == pytest.approx(closed, rel=1e-5)


@pytest.mark.parametrize("regime", ["large_v", "small_v"])
def test_expansion_reproduces_exponential_image(regime):
    l, s = 2, 1.7
    v = 2.5 if regime == "large_v" else 0.3
    expansion = dsh_expansion(l, regime)
    assert expansion.evaluate(s, v) == pytest.approx(dsh_apply_exp(l, 1j * s, v), rel=1e-9)
    assert [k for k, _ in expansion.powers()] == [0, 1, 2]


def test_expansion_unknown_regime():
    with pytest.raises(DomainError):
        dsh_expansion(1, "medium_v")
