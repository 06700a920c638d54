"""Tests for the Monte Carlo engine and splitting."""

import numpy as np
import pytest

from conewalk.exceptions import InvalidBudgetError, MissingHorizonError, OutsideConeError
from conewalk.increments import make_distribution, rng_stream
from conewalk.models import SurvivalMethod
from conewalk.oracle import dp_survival_prob
from conewalk.walk import (
    SurvivalCurve,
    Walker,
    estimate_free_h,
    estimate_survival,
    estimate_survival_splitting,
    estimate_truncated_h,
    simulate_exit,
    splitting_levels,
    translation_monotonicity,
)


@pytest.mark.unit
class TestSurvivalCurve:
    """Validation of survival curves."""

    def test_increasing_estimates_rejected(self):
        with pytest.raises(ValueError):
            SurvivalCurve((1.0,), (1, 2), (0.4, 0.5), (0.0, 0.0), SurvivalMethod.MC, 10)

    def test_unsorted_horizons_rejected(self):
        with pytest.raises(ValueError):
            SurvivalCurve((1.0,), (2, 1), (0.5, 0.4), (0.0, 0.0), SurvivalMethod.MC, 10)

    def test_exact_curve_without_errors(self):
        with pytest.raises(ValueError):
            SurvivalCurve((1.0,), (1,), (0.5,), (0.1,), SurvivalMethod.DP_EXACT, 0)

    def test_at_and_restricted(self):
        curve = SurvivalCurve(
            (1.0,), (1, 2, 4), (0.5, 0.5, 0.3), (0.0, 0.0, 0.0), SurvivalMethod.DP_EXACT, 0
        )
        assert curve.at(4) == (0.3, 0.0)
        assert curve.restricted([1, 4]).horizons == (1, 4)
        with pytest.raises(KeyError):
            curve.at(3)

    def test_rows(self):
        curve = SurvivalCurve((1.0, 2.0), (4,), (0.25,), (0.01,), SurvivalMethod.MC, 100, seed=3)
        (row,) = curve.to_rows()
        assert row["x"] == (1.0, 2.0)
        assert row["seed"] == 3


@pytest.mark.unit
class TestMonteCarlo:
    """Plain Monte Carlo estimates."""

    def test_agrees_with_dp(self, weyl_c2, asymmetric):
        horizons = [4, 8, 16]
        exact = dp_survival_prob(weyl_c2, [1.0, 3.0], asymmetric, horizons)
        curve = estimate_survival(weyl_c2, [1.0, 3.0], asymmetric, horizons, 40_000, 17)
        for n in horizons:
            estimate, error = curve.at(n)
            assert abs(estimate - exact.at(n)[0]) < 5 * error

    def test_reproducible(self, halfline, rademacher):
        first = estimate_survival(halfline, [2.0], rademacher, [8, 16], 5000, 3)
        second = estimate_survival(halfline, [2.0], rademacher, [8, 16], 5000, 3)
        assert first == second

    def test_independent_of_worker_count(self, halfline, rademacher):
        one = estimate_survival(halfline, [2.0], rademacher, [8, 16], 10_000, 3, workers=1)
        three = estimate_survival(halfline, [2.0], rademacher, [8, 16], 10_000, 3, workers=3)
        assert one.estimates == three.estimates

    def test_streams_are_independent(self, halfline, rademacher):
        first = estimate_survival(halfline, [2.0], rademacher, [16], 5000, 3, stream=0)
        second = estimate_survival(halfline, [2.0], rademacher, [16], 5000, 3, stream=1)
        assert first.estimates != second.estimates

    def test_curve_is_monotone(self, weyl_a2):
        dist = make_distribution("uniform_std")
        curve = estimate_survival(weyl_a2, [0.0, 1.0], dist, [1, 2, 4, 8, 16], 5000, 5)
        assert all(b <= a for a, b in zip(curve.estimates, curve.estimates[1:]))

    def test_bad_budget(self, halfline, rademacher):
        with pytest.raises(InvalidBudgetError):
            estimate_survival(halfline, [2.0], rademacher, [8], 0, 3)
        with pytest.raises(InvalidBudgetError):
            estimate_survival(halfline, [2.0], rademacher, [8], 10, 3, workers=0)

    @pytest.mark.parametrize("horizons", [[], [8, 4], [-1, 4]])
    def test_bad_horizons(self, halfline, rademacher, horizons):
        with pytest.raises(MissingHorizonError):
            estimate_survival(halfline, [1.0], rademacher, horizons, 100, 1)
        with pytest.raises(MissingHorizonError):
            estimate_survival_splitting(halfline, [1.0], rademacher, horizons, 100, 1)

    def test_rows_are_coupled_across_starts(self, halfline, rademacher):
        """A row draws the same steps whichever start it runs from and whoever exits."""
        near, far = Walker(halfline, [1.0], rademacher), Walker(halfline, [9.0], rademacher)
        near_steps, far_steps = near.zeros(300), far.zeros(300)
        _, near_alive = near.advance(near_steps, 0, 30, rng_stream(3))
        _, far_alive = far.advance(far_steps, 0, 30, rng_stream(3))
        assert near_alive.sum() < far_alive.sum()
        assert far_alive[near_alive].all()
        np.testing.assert_array_equal(near_steps[near_alive], far_steps[near_alive])

    def test_start_outside(self, halfline, rademacher):
        with pytest.raises(OutsideConeError):
            estimate_survival(halfline, [-1.0], rademacher, [8], 10, 3)

    def test_simulate_exit(self, halfline, rademacher):
        record = simulate_exit(halfline, [1.0], rademacher, 1000, rng_stream(2))
        if record.survived:
            assert record.exit_time == 1000
            assert record.final_position[0] > 0
        else:
            assert record.final_position[0] == 0.0
        with pytest.raises(InvalidBudgetError):
            simulate_exit(halfline, [1.0], rademacher, 0, rng_stream(2))


@pytest.mark.unit
class TestTruncatedExpectations:
    """Monte Carlo expectations of h."""

    def test_truncated_h_on_halfline_is_h(self, halfline, rademacher):
        """E[x + S(n); tau > n] = x for the simple walk."""
        value, error = estimate_truncated_h(halfline, [3.0], rademacher, 32, 40_000, 8)
        assert abs(value - 3.0) < 5 * error

    def test_truncated_h_at_zero_steps(self, weyl_a2, rademacher):
        assert estimate_truncated_h(weyl_a2, [0.0, 2.0], rademacher, 0, 10, 1) == (2.0, 0.0)

    def test_free_h_is_martingale_for_type_a(self, weyl_a2):
        dist = make_distribution("exp_centered")
        value, error = estimate_free_h(weyl_a2, [0.0, 2.0], dist, 10, 40_000, 4)
        assert abs(value - 2.0) < 5 * error

    def test_translation_monotonicity(self, weyl_c2, asymmetric):
        rows = translation_monotonicity(weyl_c2, [1.0, 3.0], asymmetric, 16, [0, 1, 2], 4000, 6)
        estimates = [p for _, p, _ in rows]
        assert estimates == sorted(estimates)


@pytest.mark.unit
class TestSplitting:
    """Multilevel splitting."""

    def test_levels(self):
        assert splitting_levels([3, 8]) == [1, 2, 3, 4, 8]

    def test_agrees_with_dp(self, halfline, rademacher):
        horizons = [16, 64, 256]
        exact = dp_survival_prob(halfline, [1.0], rademacher, horizons)
        curve = estimate_survival_splitting(halfline, [1.0], rademacher, horizons, 20_000, 9)
        assert curve.method is SurvivalMethod.SPLITTING
        for n in horizons:
            estimate, error = curve.at(n)
            assert abs(estimate - exact.at(n)[0]) < 5 * error

    def test_agrees_with_dp_on_weyl_c2_lazy(self, weyl_c2):
        lazy = make_distribution("lazy_rademacher", q="1/2")
        horizons = [64, 256]
        exact = dp_survival_prob(weyl_c2, [1.0, 3.0], lazy, horizons)
        curve = estimate_survival_splitting(weyl_c2, [1.0, 3.0], lazy, horizons, 20_000, 17)
        for n in horizons:
            estimate, error = curve.at(n)
            assert error > 0
            assert abs(estimate - exact.at(n)[0]) < 4 * error

    def test_too_few_particles(self, halfline, rademacher):
        with pytest.raises(InvalidBudgetError):
            estimate_survival_splitting(halfline, [1.0], rademacher, [8], 99, 1)

    def test_reproducible(self, weyl_a2, rademacher):
        first = estimate_survival_splitting(weyl_a2, [0.0, 2.0], rademacher, [8, 32], 500, 2)
        second = estimate_survival_splitting(weyl_a2, [0.0, 2.0], rademacher, [8, 32], 500, 2)
        assert first.estimates == second.estimates

    def test_non_lattice_law(self, weyl_a2):
        dist = make_distribution("uniform_std")
        curve = estimate_survival_splitting(weyl_a2, [0.0, 2.0], dist, [4, 16], 2000, 2)
        assert 0 < curve.estimates[-1] < curve.estimates[0] <= 1
