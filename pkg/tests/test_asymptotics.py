"""Tests for tail exponent fits, shape checks and verification reports."""

import json
import math

import numpy as np
import pytest

from conewalk.asymptotics import (
    CriterionResult,
    ExponentFit,
    StartFits,
    VerificationReport,
    endpoint_density_distance,
    estimate_kappa,
    fit_tail_exponent,
    global_tail_bound,
    near_boundary_bound,
    near_boundary_profile,
    proportionality_check,
    ratio_exponent,
    relative_drift,
    target_cell_masses,
    truncated_h_growth,
)
from conewalk.exceptions import MissingHorizonError, ZeroSurvivalMassError
from conewalk.models import FitMethod, SurvivalMethod
from conewalk.oracle import dp_conditional_endpoint, dp_survival_prob
from conewalk.walk import SurvivalCurve


def power_curve(p, kappa=0.8, horizons=(16, 32, 64, 128, 256), start=(1.0,)):
    """An exact curve kappa * n^(-p/2)."""
    estimates = [kappa * n ** (-p / 2.0) for n in horizons]
    return SurvivalCurve(
        start, horizons, estimates, [0.0] * len(horizons), SurvivalMethod.DP_EXACT, 0
    )


@pytest.mark.unit
class TestExponentFits:
    """Log-log and doubling-ratio estimators."""

    @pytest.mark.parametrize("p", [1, 2, 4])
    def test_loglog_recovers_power(self, p):
        fit = fit_tail_exponent(power_curve(p))
        assert fit.slope == pytest.approx(-p / 2.0, abs=1e-9)
        assert fit.p_hat == pytest.approx(p, abs=1e-9)
        assert fit.deviation(p) < 1e-9
        assert fit.method is FitMethod.LOGLOG_FIT

    def test_min_horizon_limits_points(self):
        fit = fit_tail_exponent(power_curve(2), min_horizon=64)
        assert fit.horizons_used == [64, 128, 256]

    def test_too_few_points(self):
        with pytest.raises(MissingHorizonError):
            fit_tail_exponent(power_curve(2), min_horizon=128)

    def test_zero_estimate(self):
        curve = SurvivalCurve(
            (1.0,), (1, 2, 4), (0.5, 0.0, 0.0), (0.0, 0.0, 0.0), SurvivalMethod.DP_EXACT, 0
        )
        with pytest.raises(ZeroSurvivalMassError):
            fit_tail_exponent(curve)

    @pytest.mark.parametrize("p", [1, 4])
    def test_ratio_recovers_power(self, p):
        ratios = ratio_exponent(power_curve(p))
        assert ratios.p_hat == pytest.approx(p, abs=1e-9)
        assert all(r == pytest.approx(2.0 ** (-p / 2.0)) for _, r in ratios.pairs)
        fit = ratios.to_fit()
        assert fit.method is FitMethod.RATIO
        assert fit.horizons_used == [128, 256]

    def test_ratio_without_doubled_horizon(self):
        curve = power_curve(2, horizons=(10, 30, 70))
        with pytest.raises(MissingHorizonError):
            ratio_exponent(curve)

    def test_ratio_error_from_monte_carlo(self):
        curve = SurvivalCurve(
            (1.0,), (8, 16), (0.2, 0.14), (0.004, 0.003), SurvivalMethod.MC, 10_000
        )
        assert ratio_exponent(curve).p_hat_stderr > 0

    def test_halfline_dp_exponent(self, halfline, rademacher):
        """The half-line has p = 1, so the slope tends to -1/2."""
        curve = dp_survival_prob(halfline, [1.0], rademacher, [256, 512, 1024, 2048, 4096])
        assert fit_tail_exponent(curve).deviation(1) < 0.02
        assert ratio_exponent(curve).p_hat == pytest.approx(1.0, abs=0.05)

    def test_loglog_model_needs_three_horizons(self):
        with pytest.raises(ValueError):
            ExponentFit(
                slope=-1.0,
                slope_stderr=0.0,
                intercept=0.0,
                horizons_used=[2, 4],
                method=FitMethod.LOGLOG_FIT,
            )


@pytest.mark.unit
class TestProportionality:
    """n^(p/2) P / V across starts."""

    def test_exact_proportionality(self):
        curves = [power_curve(2, kappa=0.1 * v, start=(v,)) for v in (1.0, 2.0, 3.0)]
        check = proportionality_check(curves, [1.0, 2.0, 3.0], p=2)
        assert check.horizon == 256
        assert check.spread == pytest.approx(0.0, abs=1e-12)
        assert check.kappa == pytest.approx(0.1)

    def test_explicit_horizon(self):
        curves = [power_curve(2, start=(v,)) for v in (1.0, 2.0)]
        check = proportionality_check(curves, [1.0, 2.0], p=2, horizon=64)
        assert check.normalized == pytest.approx((0.8, 0.4))
        assert check.spread == pytest.approx(2 / 3)

    def test_missing_horizon(self):
        curves = [power_curve(2), power_curve(2, horizons=(16, 32, 64))]
        with pytest.raises(MissingHorizonError):
            proportionality_check(curves, [1.0, 1.0], p=2, horizon=256)

    def test_non_positive_V(self):
        with pytest.raises(ValueError):
            proportionality_check([power_curve(2)], [0.0], p=2)

    def test_halfline_dp_kappa(self, halfline, rademacher):
        """kappa = sqrt(2 / pi) on the half-line with V(x) = x."""
        curves = [dp_survival_prob(halfline, [x], rademacher, [4096]) for x in (1.0, 3.0)]
        check = proportionality_check(curves, [1.0, 3.0], p=1)
        assert check.spread < 0.01
        assert check.kappa == pytest.approx(math.sqrt(2 / math.pi), rel=0.01)

    def test_estimate_kappa(self):
        assert estimate_kappa(power_curve(4, kappa=0.6), 2.0, 4) == pytest.approx(0.3)
        with pytest.raises(ValueError):
            estimate_kappa(power_curve(4), -1.0, 4)


@pytest.mark.unit
class TestEndpointLaw:
    """Distance of the conditional endpoint law to the h-Gaussian."""

    def test_target_is_normalized(self, weyl_c2):
        masses = target_cell_masses(weyl_c2, np.eye(2), cell=0.5)
        assert masses.shape == (28, 28)
        assert masses.sum() == pytest.approx(1.0)
        assert masses.min() >= 0.0

    def test_halfline_distance_shrinks(self, halfline, rademacher):
        short = dp_conditional_endpoint(halfline, [1.0], rademacher, 16)
        long = dp_conditional_endpoint(halfline, [1.0], rademacher, 1024)
        near = endpoint_density_distance(long, halfline)
        assert near < endpoint_density_distance(short, halfline)
        assert near < 0.1

    def test_precomputed_target(self, halfline, rademacher):
        law = dp_conditional_endpoint(halfline, [1.0], rademacher, 256)
        target = target_cell_masses(halfline, law.basis)
        assert endpoint_density_distance(law, halfline, target=target) == pytest.approx(
            endpoint_density_distance(law, halfline)
        )


@pytest.mark.unit
class TestBoundedness:
    """Near-boundary and global normalizations."""

    def test_relative_drift(self):
        assert relative_drift([1.0, 2.0]) == pytest.approx(0.5)
        assert relative_drift({4: 3.0, 8: 3.0}) == 0.0

    def test_global_bound_on_power_curve(self, halfline):
        """h(x + R x0) = 2 for x = 1 and R = 1."""
        bound = global_tail_bound(halfline, power_curve(1, kappa=0.8))
        assert set(bound) == {16, 32, 64, 128, 256}
        assert all(v == pytest.approx(0.4) for v in bound.values())

    def test_near_boundary_profile_is_bounded(self, halfline, rademacher):
        profile = near_boundary_profile(halfline, rademacher, [[1.0], [2.0]], [64, 256, 1024])
        assert list(profile) == [64, 256, 1024]
        assert relative_drift(profile) < 0.05

    def test_near_boundary_bound_matches_profile(self, halfline, rademacher):
        xs = [[1.0], [3.0]]
        bound = near_boundary_bound(halfline, rademacher, xs, 128)
        assert bound == pytest.approx(near_boundary_profile(halfline, rademacher, xs, [128])[128])
        assert bound > 0

    def test_truncated_h_growth_is_flat(self, halfline, rademacher):
        growth = truncated_h_growth(halfline, rademacher, [2.0], [8, 64], trials=40_000)
        assert abs(growth.slope) < 0.05
        assert len(growth.values) == 2


@pytest.mark.unit
class TestVerificationReport:
    """PASS/FAIL summaries."""

    def make_report(self, second_passes=True):
        return VerificationReport(
            version="0.1.0",
            config_hash="abc",
            cone_label="halfline",
            distribution="rademacher",
            target_p=1,
            criteria=[
                CriterionResult(name="exponent", passed=True, detail="slope -0.5"),
                CriterionResult(name="proportionality", passed=second_passes, detail="spread"),
                CriterionResult(name="endpoint_tv", passed=True, skipped=True, detail="n/a"),
            ],
            starts=[StartFits(x=[1.0], kappa=0.8)],
        )

    def test_passed(self):
        report = self.make_report()
        assert report.passed
        assert report.failed() == []
        assert report.summary_lines()[-1] == "PASSED"
        assert "[SKIP] endpoint_tv: n/a" in "\n".join(report.summary_lines())

    def test_failed(self):
        report = self.make_report(second_passes=False)
        assert not report.passed
        assert report.failed() == ["proportionality"]
        assert report.summary_lines()[-1] == "FAILED: proportionality"

    def test_criterion_lookup(self):
        report = self.make_report()
        assert report.criterion("exponent").detail == "slope -0.5"
        with pytest.raises(KeyError):
            report.criterion("missing")

    def test_save(self, temp_dir):
        path = temp_dir / "report.json"
        self.make_report().save(path)
        data = json.loads(path.read_text())
        assert data["passed"] is True
        assert data["starts"][0]["kappa"] == 0.8
        assert not path.with_suffix(".json.bak").exists()
