"""Tests for lab/ — estimate reports, envelopes and the verification checks."""

import math

import numpy as np
import pytest
from scipy import integrate

from axbwave.common.errors import DomainError
from axbwave.geometry.group import radial_distance
from axbwave.kernels.profiles import band_bump, gauss_heat, zero_profile
from axbwave.lab.elementary import (
    elementary_bounds,
    elementary_bounds_grid,
    envelope_I0,
    envelope_Iinf,
)
from axbwave.lab.envelopes import (
    EnvelopeSpec,
    check_envelope,
    check_transfer_conjecture,
    default_wave_profile,
    normalise_regime,
)
from axbwave.lab.growth import WeightedL1, check_l1_growth, predicted_exponent
from axbwave.lab.hebisch import (
    check_hebisch_steger,
    f_hat,
    hs_family,
    sobolev_norm,
    squared_profile,
)
from axbwave.lab.report import (
    EstimateReport,
    drift,
    fit_constant,
    fit_exponent,
    refine_grid,
    to_plain,
)
from axbwave.lab.suites import check_oracle, check_resolvent, oracle_points, random_points
from axbwave.lab.supnorm import check_supnorm, ray_grid, supnorm_envelope


def _report(**overrides):
    defaults = {"name": "sample", "grid": {"n": 2}, "checks": {"a": True, "b": True}}
    defaults.update(overrides)
    return EstimateReport(**defaults)


# --- report ---


def test_report_passes_when_all_checks_pass():
    report = _report()
    assert report.passed
    assert report.failures == []


def test_report_lists_failures_in_order():
    report = _report(checks={"a": False, "b": True, "c": False})
    assert not report.passed
    assert report.failures == ["a", "c"]


def test_report_without_checks_passes():
    assert _report(checks={}).passed


def test_to_dict_is_json_safe():
    report = _report(
        grid={"R": np.array([1.0, 2.0]), "n": np.int64(2)},
        notes={"value": 1 + 2j, "flag": np.bool_(True)},
    )
    data = report.to_dict()
    assert data["fitted_constant"] == "nan"
    assert data["grid"] == {"R": [1.0, 2.0], "n": 2}
    assert data["notes"]["value"] == {"re": 1.0, "im": 2.0}
    assert data["notes"]["flag"] is True
    assert data["growth_exponent_fit"] is None
    assert data["passed"] is True


def test_to_plain_infinity():
    assert to_plain([math.inf, 1.5]) == ["inf", 1.5]


def test_fit_constant():
    assert fit_constant([1.0, -3.0], [2.0, 2.0]) == pytest.approx(1.5)
    assert fit_constant([], []) == math.inf
    assert fit_constant([1.0], [0.0]) == math.inf


def test_drift():
    assert drift(2.0, 2.2) == pytest.approx(0.1)
    assert drift(0.0, 1.0) == math.inf
    assert drift(math.inf, 1.0) == math.inf


def test_fit_exponent_recovers_power():
    t = np.array([0.5, 1.0, 2.0, 4.0, 8.0])
    slope, (lo, hi) = fit_exponent(t, 3.0 * (1.0 + t) ** 1.5)
    assert slope == pytest.approx(1.5)
    assert lo <= slope <= hi
    assert hi - lo < 1e-6


def test_refine_grid_arithmetic():
    np.testing.assert_allclose(refine_grid([1.0, 2.0, 3.0]), [1.0, 1.5, 2.0, 2.5, 3.0])


def test_refine_grid_geometric():
    np.testing.assert_allclose(refine_grid([1.0, 10.0]), [1.0, math.sqrt(10.0), 10.0])


def test_refine_grid_single_point():
    np.testing.assert_array_equal(refine_grid(2.0), [2.0])


# --- elementary ---


def test_elementary_alpha_zero():
    b = elementary_bounds(0.0, 1.0, 0.0, 3.0)
    assert b.I0 == pytest.approx(3.0 / 8.0, rel=1e-9)
    assert b.Iinf == pytest.approx(1.0 / 8.0, rel=1e-9)
    assert b.bound0 == pytest.approx(0.5)
    assert b.bound_inf == pytest.approx(0.25)
    assert b.ratio0 == pytest.approx(0.75)
    assert b.ratio_inf == pytest.approx(0.5)


def test_elementary_with_kink():
    # α = 0, λ = 2, t = 1: kink at R = 1/2, ∫_0^1 (1+|2R−1|)^{−2} dR = 1/2
    b = elementary_bounds(0.0, 2.0, 1.0, 2.0)
    assert b.I0 == pytest.approx(0.5, rel=1e-9)


def test_envelope_branches():
    assert envelope_I0(1.0, 1.0, 1.0, 4.0) == pytest.approx(0.5)
    assert envelope_I0(1.0, 1.0, 3.0, 4.0) == pytest.approx(4.0**-4)
    assert envelope_Iinf(0.0, 4.0, 1.0, 3.0) == pytest.approx(0.25 * 5.0**-2)
    assert envelope_Iinf(1.0, 2.0, 3.0, 4.0) == pytest.approx(0.25 * 4.0)


@pytest.mark.parametrize(
    ("alpha", "lam", "t", "N"),
    [(0.0, 0.0, 1.0, 3.0), (-1.0, 1.0, 1.0, 3.0), (0.0, 1.0, -1.0, 3.0), (2.0, 1.0, 1.0, 3.0)],
)
def test_elementary_domain(alpha, lam, t, N):
    with pytest.raises(DomainError):
        elementary_bounds(alpha, lam, t, N)


def test_elementary_grid_report():
    report = elementary_bounds_grid([0.0, 1.0], [1.0, 4.0], [0.0, 2.0], 4.0)
    assert report.name == "elementary"
    assert set(report.checks) == {
        "finite[alpha=0,N=4]",
        "stable[alpha=0,N=4]",
        "finite[alpha=1,N=4]",
        "stable[alpha=1,N=4]",
    }
    assert report.checks["finite[alpha=0,N=4]"]
    assert len(report.details) == 8
    assert math.isfinite(report.fitted_constant)


# --- envelopes ---


@pytest.mark.parametrize(
    ("name", "regime"),
    [
        ("large_R", "large_R"),
        ("Large-R", "large_R"),
        ("SMALL_R", "small_R"),
        ("r<=1", "small_R"),
        ("improved", "small_R_improved"),
    ],
)
def test_normalise_regime(name, regime):
    assert normalise_regime(name) == regime


def test_normalise_regime_unknown():
    with pytest.raises(DomainError):
        normalise_regime("medium")


def test_envelope_spec_large_r():
    spec = EnvelopeSpec(2, "large-r")
    assert spec.regime == "large_R"
    assert spec.predicted(2.0, 0.0, 4.0) == pytest.approx(16.0)
    assert spec.predicted(2.0, 0.0, 0.5) == pytest.approx(0.25)
    assert spec.predicted(2.0, 1.0, 4.0) == pytest.approx(16.0 * 5.0**-4)
    assert spec.covers(1.0)
    assert not spec.covers(0.5)


def test_envelope_spec_small_r():
    spec = EnvelopeSpec(2, "small_R")
    assert spec.predicted(0.5, 0.0, 4.0) == pytest.approx(2.0 * 16.0 / 0.5)
    assert spec.predicted(0.5, 0.0, 0.5) == pytest.approx(0.25 / 0.5)
    assert not spec.covers(0.0)
    one = EnvelopeSpec(1, "small_R")
    assert one.predicted(0.25, 0.0, 4.0) == pytest.approx(2.0 * 8.0)


def test_envelope_spec_improved():
    spec = EnvelopeSpec(3, "improved", N=2)
    assert spec.predicted(0.5, 0.0, 2.0) == pytest.approx(16.0)
    assert spec.predicted(0.5, 0.0, 0.5) == pytest.approx(0.25)


def test_envelope_spec_validation():
    with pytest.raises(DomainError):
        EnvelopeSpec(2, "large_R", N=-1)
    with pytest.raises(DomainError):
        EnvelopeSpec(0, "large_R")


def test_default_wave_profile():
    assert default_wave_profile(4.0).kind == "bump_band"
    assert default_wave_profile(1.0).kind == "bump_band"
    assert default_wave_profile(0.5).kind == "bump_low"


def test_check_envelope_rejects_radii_outside_regime():
    with pytest.raises(DomainError):
        check_envelope(EnvelopeSpec(2, "large_R"), [0.5, 2.0], [0.0], [4.0])


@pytest.mark.slow
@pytest.mark.parametrize(
    ("n", "regime", "R_grid", "lam_grid"),
    [
        (2, "large_R", [1.0, 2.0, 4.0], [2.0, 8.0]),
        (1, "large_R", [1.0, 2.0, 4.0], [2.0, 8.0]),
        (2, "small_R", [0.1, 0.25, 0.5, 1.0], [0.5, 4.0]),
        (3, "small_R", [0.1, 0.25, 0.5, 1.0], [4.0]),
        (2, "small_R_improved", [0.1, 0.25, 0.5, 1.0], [0.5, 4.0]),
    ],
)
def test_check_envelope_regimes(n, regime, R_grid, lam_grid):
    rho_grid = np.linspace(-4.0, 4.0, 9)
    report = check_envelope(EnvelopeSpec(n, regime), R_grid, rho_grid, lam_grid)
    assert report.name == f"envelope[{regime}]"
    assert len(report.details) == len(R_grid) * len(rho_grid) * len(lam_grid)
    assert report.checks["stable_grid"]
    assert report.passed, report.failures


def test_transfer_conjecture_records_peak_size():
    report = check_transfer_conjecture(2, 0.5, [1.0], [0.5, 1.0])
    assert report.checks == {}
    assert report.passed
    assert len(report.details) == 2
    (peak,) = report.notes["size_at_R_equals_t"]
    assert peak["over_lambda_squared"] == pytest.approx(peak["size"] / 0.25)


# --- growth ---


def test_predicted_exponent():
    assert predicted_exponent(3, 4.0, 0.1, [1.0, 2.0, 4.0]) == pytest.approx(1.6)
    assert predicted_exponent(3, 4.0, 0.1, [1.0, 8.0]) == pytest.approx(1.1)
    assert predicted_exponent(3, 0.5, 0.0, [0.1]) == pytest.approx(1.0)


def test_l1_growth_rejects_bad_profile():
    with pytest.raises(DomainError):
        check_l1_growth(2, band_bump(0.5, 1.0, 1.5), 4.0, 0.1, [1.0, 2.0])


def test_weighted_l1_tail_ratio():
    assert WeightedL1(value=2.0, error_estimate=1e-6, tail=1e-4).tail_ratio == pytest.approx(5e-5)
    assert WeightedL1(value=0.0, error_estimate=0.0, tail=0.0).tail_ratio == math.inf


@pytest.mark.slow
@pytest.mark.parametrize(
    ("lam", "eps", "t_grid", "expected"),
    [
        (8.0, 0.0, [0.4, 1.0, 2.0, 4.0], 1.0),
        (2.0, 0.0, [3.0, 8.0, 16.0, 32.0], 1.0),
        (0.5, 0.0, [3.0, 10.0, 30.0], 1.0),
        (2.0, 0.5, [3.0, 8.0, 16.0, 32.0], 1.5),
    ],
)
def test_l1_growth_recovers_exponent(lam, eps, t_grid, expected):
    report = check_l1_growth(2, None, lam, eps, t_grid)
    assert report.notes["predicted_exponent"] == pytest.approx(expected)
    assert report.growth_exponent_fit == pytest.approx(expected, abs=0.3)
    assert report.checks["recovered"]
    assert report.checks["truncation"]
    assert report.passed, report.failures


# --- sup norm ---


def test_supnorm_envelope():
    assert supnorm_envelope(2, 4.0, 1.0) == pytest.approx(32.0)
    assert supnorm_envelope(2, 1.0, 4.0) == pytest.approx(1.25)


def test_ray_grid():
    grid = ray_grid(4.0, 2.0)
    assert grid[0] == pytest.approx(1e-3)
    assert np.all(np.diff(grid) > 0)
    assert np.any(np.isclose(grid, 2.0))
    assert len(ray_grid(4.0, 2.0, density=2.0)) > len(grid)


def test_supnorm_needs_large_lambda():
    with pytest.raises(DomainError):
        check_supnorm(2, [0.5, 2.0], [1.0])


@pytest.mark.slow
def test_supnorm_report():
    report = check_supnorm(2, [1.0], [1.0])
    assert report.checks["finite"]
    assert report.notes["expected_scaling"] == pytest.approx(4.0)
    assert report.details[0]["ratio"] == pytest.approx(report.fitted_constant)


@pytest.mark.slow
def test_supnorm_scaling_and_stability():
    report = check_supnorm(2, [4.0, 16.0], [0.5, 2.0])
    assert len(report.details) == 4
    assert 2.0 <= report.notes["scaling_ratio"] <= 8.0
    assert report.checks["lambda_scaling"]
    assert report.checks["stable_grid"]
    assert report.passed, report.failures


# --- Sobolev ratios ---


def test_hs_family_supported_in_unit_band():
    for F in hs_family():
        assert F.vanishes_below >= 1.0
        assert F.support <= 2.0


def test_squared_profile():
    F = band_bump(1.0, 1.5, 2.0)
    psi = squared_profile(F)
    assert psi.support == pytest.approx(math.sqrt(2.0))
    assert psi(math.sqrt(1.5)) == pytest.approx(1.0)
    assert psi(0.9) == 0.0


def test_f_hat_at_zero_is_integral():
    F = band_bump(1.0, 1.5, 2.0)
    kink = [math.sqrt(1.5)]
    value, _ = integrate.quad(lambda v: float(F(v * v)), 1.0, math.sqrt(2.0), points=kink)
    expected = 2.0 * value
    assert f_hat(F, 0.0)[0] == pytest.approx(expected, rel=1e-6)


def test_sobolev_norm_grows_with_order():
    F = band_bump(1.0, 1.5, 2.0)
    assert 0 < sobolev_norm(F, 2.0) < sobolev_norm(F, 3.0)


@pytest.mark.parametrize(("s_order", "lam"), [(2.0, 0.5), (2.5, 4.0)])
def test_hebisch_order_too_small(s_order, lam):
    # n = 3, ε = 0.5: need s > 2 always and s > 2.5 when λ ≥ 1
    with pytest.raises(DomainError):
        check_hebisch_steger(3, hs_family(), lam, 0.5, s_order)


def test_hebisch_zero_profile_has_zero_ratio():
    report = check_hebisch_steger(2, [zero_profile()], 4.0, 0.5, 3.0)
    assert report.name == "hs[lambda=4]"
    assert report.details[0]["ratio"] == 0.0
    assert report.fitted_constant == 0.0
    assert report.checks == {"finite": True}


def test_hebisch_rejects_profile_outside_band():
    with pytest.raises(DomainError):
        check_hebisch_steger(2, [band_bump(0.5, 1.0, 1.5)], 4.0, 0.5, 3.0)


@pytest.mark.slow
def test_hebisch_ratio_finite():
    report = check_hebisch_steger(2, hs_family()[:1], 2.0, 0.5, 3.0)
    assert report.passed
    assert report.fitted_constant > 0


# --- suites ---


def test_random_points_are_seeded():
    a = random_points(2, 3, seed=5)
    b = random_points(2, 3, seed=5)
    assert a == b
    assert all(g.n == 2 for g in a)


def test_oracle_points_keep_distance():
    for R, g in zip([0.5, 1.0, 3.0], oracle_points([0.5, 1.0, 3.0], seed=1)):
        assert radial_distance(g) == pytest.approx(R, rel=1e-9)
        assert abs(g.x) <= R / 2


@pytest.mark.slow
def test_resolvent_suite_n2():
    report = check_resolvent(2, [-1.0], points=4)
    assert report.name == "resolvent-suite"
    assert set(report.checks) == {
        "closed_form[nu=-1+0j]",
        "ode[nu=-1+0j]",
        "continuation[nu=-1+0j]",
        "small_R[nu=-1+0j]",
    }
    assert report.passed, report.failures


@pytest.mark.slow
def test_oracle_heat():
    report = check_oracle([(1.0, 0.0)], [0.5, 1.0, 2.0], psi=gauss_heat(1.0))
    assert report.checks == {"oracle[lambda=1,t=0]": True}


@pytest.mark.slow
def test_oracle_wave_pairs():
    report = check_oracle([(0.5, 2.0), (16.0, 0.5)], [0.5, 1.5, 3.0])
    assert set(report.checks) == {"oracle[lambda=0.5,t=2]", "oracle[lambda=16,t=0.5]"}
    assert [d["psi"] for d in report.details] == ["bump_low", "bump_band"]
    assert report.passed, report.failures
    assert report.fitted_constant <= 1e-4


@pytest.mark.slow
@pytest.mark.parametrize("n", [1, 3])
def test_resolvent_suite_passes_without_closed_form(n):
    report = check_resolvent(n, [-1.0, -0.5 - 0.5j], points=8)
    assert "closed_form[nu=-1+0j]" not in report.checks
    assert report.passed, report.failures
