"""Testing the verify module"""
import numpy as np
import pytest

from growthlab.closed_form import SingleIntegralBGP
from growthlab.dynamics import Trajectory
from growthlab.errors import SigmaOneError
from growthlab.params import Family
from growthlab.verify import (
    check_transversality,
    compare_families,
    convergence_report,
    I2_scale,
    eval_I1,
    eval_I2,
    integral_drift,
    residuals,
    verify_family,
    VerifyThresholds,
)

GRID = np.linspace(0.0, 20.0, 11)


class CorruptedH:
    """A closed-form family whose h is scaled by a constant factor."""

    def __init__(self, family, factor):
        self.family = family
        self.factor = factor
        self.params = family.params

    def trajectory(self, times):
        good = self.family.trajectory(times)
        return Trajectory(
            params=good.params,
            t=good.t,
            c=good.c,
            k=good.k,
            h=good.h * self.factor,
            u=good.u,
            lam=good.lam,
            mu=good.mu,
            provenance="corrupted",
        )


class TiltedH(CorruptedH):
    """h drifts away by exp(factor t^2), so its growth error widens with t."""

    def trajectory(self, times):
        good = self.family.trajectory(times)
        return Trajectory(
            params=good.params,
            t=good.t,
            c=good.c,
            k=good.k,
            h=good.h * np.exp(self.factor * good.t ** 2),
            u=good.u,
            lam=good.lam,
            mu=good.mu,
            provenance="tilted",
        )


def test_bgp_residuals_vanish(bgp):
    worst = residuals(bgp, GRID).max_by_equation()
    assert set(worst) == {"c", "k", "h", "u", "lambda", "mu"}
    assert max(worst.values()) <= 1e-8


@pytest.mark.parametrize("name", ["two", "one"])
def test_closed_forms_solve_the_system(request, name):
    series = residuals(request.getfixturevalue(name), GRID)
    assert series.worst() <= 1e-6


def test_corrupted_h_is_caught(two):
    worst = residuals(CorruptedH(two, 1.01), GRID).max_by_equation()
    assert max(worst["c"], worst["k"]) > 1e-4
    # h' = delta (1-u) h does not see a constant factor
    assert worst["h"] <= 1e-6


def test_first_integrals_constant_on_closed_forms(bgp, two, one):
    grid = np.linspace(0.0, 30.0, 31)
    for fam in (bgp, two, one):
        drift = integral_drift(fam.trajectory(grid))
        assert drift["I1"] <= 1e-9
        assert drift["I2"] <= 1e-9


def test_I2_vanishes_on_the_saddle_path(two, one):
    for fam in (two, one):
        state = fam.trajectory([0.0]).state_at(0)
        assert abs(eval_I2(fam.params, 0.0, state)) <= 1e-9 * I2_scale(fam.params, 0.0, state)


def test_I2_needs_sigma_not_one(params, bgp):
    state = bgp.trajectory([0.0]).state_at(0)
    with pytest.raises(SigmaOneError):
        eval_I2(params.replace(sigma=1.0), 0.0, state)


@pytest.mark.parametrize("name", ["bgp", "two", "one"])
def test_transversality_holds_for_pinned_families(request, name):
    result = check_transversality(request.getfixturevalue(name))
    assert result.passed
    assert result.lambda_k[0] == 1.0
    assert all(r < 1.0 for r in result.mu_h_ratios)


def test_free_constant_variant_fails_transversality(bgp):
    result = check_transversality(SingleIntegralBGP(bgp, 0.5))
    assert result.lambda_k_passed
    assert not result.mu_h_passed
    assert result.mu_h[-1] > 0.05


def test_checkpoints_must_increase(bgp):
    with pytest.raises(ValueError):
        check_transversality(bgp, [20.0, 10.0])


def test_family_comparison(params, z0, steady):
    result = compare_families(params, 1.0, z0, GRID)
    for value in result.max_rel_gap.values():
        assert value <= 1e-8
    for value in result.u_limit_gap.values():
        assert value < 1e-4
    assert result.terminal_time == pytest.approx(200.0 / steady.g_star)
    assert len(result.per_time) == len(GRID)


@pytest.mark.parametrize("name", ["bgp", "two"])
def test_asymptotic_growth_rates(request, name, steady):
    horizon = 50.0 / steady.g_star
    report = convergence_report(request.getfixturevalue(name), [horizon / 2.0, horizon])
    errors = report.last.errors
    for var in ("c", "k", "h", "u"):
        assert errors[var] <= 1e-4
    assert errors["mu"] <= 1e-8
    assert report.targets["u"] == 0.0


def test_growth_targets_on_the_balanced_path(bgp, params):
    report = convergence_report(bgp, [10.0, 20.0])
    assert report.targets["mu"] == params.rho - params.delta
    assert all(report.shrinking.values())


def test_verify_bgp_passes(params):
    report = verify_family(params, Family.BGP)
    assert report.passed, report.failed_checks()
    assert report.family_comparison is None
    assert report.integral_drift["I1_numeric"] <= 1e-8


def test_verify_one_integral_passes(params, z0):
    report = verify_family(params, Family.ONE_INTEGRAL, 1.0, z0)
    assert report.passed, report.failed_checks()
    assert report.family_comparison is not None
    names = {check.name for check in report.checks}
    assert {"drift_I1_numeric", "oracle_u", "transversality_mu_h", "family_gap_c"} <= names


def test_I1_constant_on_the_balanced_path(bgp):
    p = bgp.params
    early = eval_I1(p, 0.0, bgp.trajectory([0.0]).state_at(0))
    late = eval_I1(p, 40.0, bgp.trajectory([40.0]).state_at(0))
    assert late == pytest.approx(early, rel=1e-12)


def test_widening_growth_error_is_not_shrinking(bgp):
    report = convergence_report(TiltedH(bgp, 1e-4), [10.0, 20.0])
    assert report.points[-1].errors["h"] > report.points[0].errors["h"] > 1e-3
    assert report.shrinking["h"] is False
    assert report.shrinking["c"] is True


def test_terminal_gap_against_half_time(params, z0):
    result = compare_families(params, 1.0, z0, GRID)
    assert result.half_time_u_gap >= 0.0
    assert result.terminal_gap_shrinking


def test_verify_checks_limits_do_not_worsen(params, z0):
    report = verify_family(params, Family.ONE_INTEGRAL, 1.0, z0)
    by_name = {check.name: check for check in report.checks}
    for name in ("c", "k", "h", "u", "lambda", "mu", "gap"):
        key = "terminal_gap_shrinking" if name == "gap" else f"growth_shrinking_{name}"
        assert by_name[key].passed, key


def test_numeric_drift_allows_a_hundred_tolerances(params):
    assert VerifyThresholds().numeric_drift_factor == 100.0
    report = verify_family(params, Family.BGP, ode_tol=1e-10)
    by_name = {check.name: check for check in report.checks}
    assert by_name["drift_I1_numeric"].threshold == pytest.approx(1e-8)
    assert by_name["drift_I2_numeric"].threshold == pytest.approx(1e-8)
    assert report.ode_tol == 1e-10
