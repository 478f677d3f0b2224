"""Tests for geometry/radial.py — density J(R), ball volumes, radial integrals."""

import math

import numpy as np
import pytest

from axbwave.common.errors import DomainError
from axbwave.geometry.radial import (
    ball_volume,
    cosh_gap_integral,
    density_table,
    integrate_radial,
    monte_carlo_radial,
    radial_density,
    unit_ball_volume,
)
from axbwave.quadrature.rules import QuadSpec


def test_unit_ball_volume():
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0)


def test_cosh_gap_integral_beta_one():
    R = np.array([0.5, 2.0])
    values, _ = cosh_gap_integral(R, 1.0)
    np.testing.assert_allclose(values, R * np.cosh(R) - np.sinh(R), rtol=1e-10)


def test_density_n2_closed_form():
    # n = 2: J(R) = 4πR sh R
    table = density_table(2, [0.0, 0.3, 1.0, 4.0])
    expected = 4.0 * math.pi * table.R * np.sinh(table.R)
    np.testing.assert_allclose(table.values, expected, rtol=1e-9)
    assert table.values[0] == 0.0


def test_density_small_r_power_law():
    # J(R) ∼ (n+1) V_{n+1} Rⁿ near 0
    for n in (1, 3):
        R = 1e-3
        expected = (n + 1) * unit_ball_volume(n + 1) * R**n
        assert radial_density(n, R).value == pytest.approx(expected, rel=1e-3)


def test_density_rejects_negative_radius():
    with pytest.raises(DomainError):
        density_table(2, [-1.0])


def test_ball_volume_n2():
    r = 1.5
    expected = 4.0 * math.pi * (r * math.cosh(r) - math.sinh(r))
    assert ball_volume(2, r) == pytest.approx(expected, rel=1e-9)
    assert ball_volume(2, 0.0) == 0.0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_density_integrates_to_ball_volume(n):
    r = 2.0
    res = integrate_radial(n, np.ones_like, upper=r)
    assert res.value == pytest.approx(ball_volume(n, r), rel=1e-8)


def test_integrate_radial_infinite_needs_decay():
    with pytest.raises(DomainError):
        integrate_radial(2, lambda R: np.exp(-3.0 * R))


def test_integrate_radial_infinite():
    # ∫ e^{−3R} 4πR sh R dR = 4π · 6/64
    res = integrate_radial(2, lambda R: np.exp(-3.0 * R), QuadSpec(decay_rate=1.5))
    assert res.value == pytest.approx(4.0 * math.pi * 6.0 / 64.0, rel=1e-8)


@pytest.mark.slow
def test_monte_carlo_agrees_with_quadrature():
    def g(R):
        return np.exp(-2.0 * R**2)

    estimate, stderr = monte_carlo_radial(2, g, box=(4.0, 8.0), samples=400_000)
    exact = integrate_radial(2, g, upper=6.0).value
    assert abs(estimate - exact) < 5.0 * stderr + 1e-3
