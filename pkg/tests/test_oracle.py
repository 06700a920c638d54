"""Tests for the lattice DP, brute-force enumeration and the measure cache."""

from fractions import Fraction

import numpy as np
import pytest
import sympy

from conewalk.exceptions import (
    BudgetExceededError,
    NonLatticeDistributionError,
    OutsideConeError,
    ZeroSurvivalMassError,
)
from conewalk.harmonic import DefectModel
from conewalk.increments import make_distribution, rng_stream
from conewalk.io.tables import OutputMeta, read_csv
from conewalk.models import SurvivalMethod
from conewalk.oracle import (
    BruteForceResult,
    LatticeDP,
    MeasureCache,
    brute_force_enumerate,
    complement_basis,
    dp_conditional_endpoint,
    dp_exit_h,
    dp_survival_measure,
    dp_survival_prob,
    dp_truncated_h,
    dp_truncated_h_sequence,
    endpoint_law_from_measure,
    estimate_dp_bytes,
    exact_expectation,
    sample_conditioned_paths,
    write_measure_csv,
)


@pytest.mark.unit
class TestSurvivalProbabilities:
    """Small cases checked by hand."""

    def test_halfline_from_one(self, halfline, rademacher):
        """From x = 1: P(tau > 1, 2, 3) = 1/2, 1/2, 3/8."""
        curve = dp_survival_prob(halfline, [1.0], rademacher, [1, 2, 3])
        assert curve.estimates == pytest.approx((0.5, 0.5, 0.375))
        assert curve.method is SurvivalMethod.DP_EXACT
        assert curve.std_errors == (0.0, 0.0, 0.0)

    def test_halfline_measure_after_three_steps(self, halfline, rademacher):
        """mu_3 puts 1/4 on 2 and 1/8 on 4."""
        measure = dp_survival_measure(halfline, [1.0], rademacher, 3)
        np.testing.assert_allclose(measure.points()[:, 0], [2.0, 4.0])
        np.testing.assert_allclose(measure.weights(), [0.25, 0.125])
        assert measure.total == pytest.approx(0.375)

    def test_halfline_exact_masses(self, halfline, rademacher):
        measure = dp_survival_measure(halfline, [1.0], rademacher, 3, exact=True)
        assert measure.exact_masses == {(1,): Fraction(1, 4), (3,): Fraction(1, 8)}

    def test_weyl_a2_one_step(self, weyl_a2, rademacher):
        """From (0, 2) only the step (+1, -1) hits the boundary."""
        curve = dp_survival_prob(weyl_a2, [0.0, 2.0], rademacher, [1])
        assert curve.estimates[0] == pytest.approx(0.75)

    def test_reduced_and_full_states_agree(self, weyl_a2, asymmetric):
        reduced = dp_survival_measure(weyl_a2, [0.0, 2.0], asymmetric, 20)
        full = dp_survival_measure(weyl_a2, [0.0, 2.0], asymmetric, 20, reduce=False)
        assert reduced.reduced and not full.reduced
        assert reduced.total == pytest.approx(full.total, rel=1e-12)

    def test_curve_is_non_increasing(self, weyl_c2, asymmetric):
        curve = dp_survival_prob(weyl_c2, [1.0, 3.0], asymmetric, list(range(1, 41)))
        assert all(b <= a for a, b in zip(curve.estimates, curve.estimates[1:]))

    def test_start_outside_rejected(self, halfline, rademacher):
        with pytest.raises(OutsideConeError):
            dp_survival_prob(halfline, [0.0], rademacher, [1])

    def test_non_lattice_rejected(self, halfline):
        with pytest.raises(NonLatticeDistributionError):
            dp_survival_prob(halfline, [1.0], make_distribution("uniform_std"), [1])

    def test_exact_mode_step_cap(self, halfline, rademacher):
        with pytest.raises(BudgetExceededError):
            dp_survival_measure(halfline, [1.0], rademacher, 65, exact=True)

    def test_exact_mode_dimension_cap(self, rademacher):
        from conewalk.algebra import make_weyl_chamber

        with pytest.raises(BudgetExceededError):
            LatticeDP(make_weyl_chamber("A", 3), [0.0, 1.0, 2.0], rademacher, exact=True)

    def test_memory_estimate_grows_with_n(self, weyl_c2, rademacher):
        assert estimate_dp_bytes(weyl_c2, rademacher, 200) > estimate_dp_bytes(
            weyl_c2, rademacher, 100
        )


@pytest.mark.unit
class TestBruteForce:
    """Enumeration of every step sequence."""

    @pytest.mark.parametrize("n", [1, 2, 4])
    def test_matches_exact_dp(self, weyl_c2, asymmetric, n):
        brute = brute_force_enumerate(weyl_c2, [1.0, 3.0], asymmetric, n)
        exact = dp_survival_measure(weyl_c2, [1.0, 3.0], asymmetric, n, exact=True)
        assert brute.measure == exact.exact_masses
        assert brute.survival == sum(exact.exact_masses.values(), Fraction(0))

    def test_halfline(self, halfline, rademacher):
        brute = brute_force_enumerate(halfline, [1.0], rademacher, 3)
        assert brute.survival == Fraction(3, 8)
        assert brute.paths == 8
        assert brute.endpoint_law == {(1,): Fraction(2, 3), (3,): Fraction(1, 3)}

    def test_truncated_h_is_exact(self, halfline, rademacher):
        """E[S_3 + 1; tau > 3] = 2/4 + 4/8 = 1."""
        brute = brute_force_enumerate(halfline, [1.0], rademacher, 3)
        assert brute.truncated_h == 1

    def test_budget(self, weyl_c2, asymmetric):
        with pytest.raises(BudgetExceededError):
            brute_force_enumerate(weyl_c2, [1.0, 3.0], asymmetric, 12)

    def test_extinct_endpoint_law(self):
        brute = BruteForceResult(
            n=1, survival=Fraction(0), truncated_h=sympy.Integer(0), measure={}, paths=2
        )
        with pytest.raises(ZeroSurvivalMassError):
            brute.endpoint_law


@pytest.mark.unit
class TestTruncatedH:
    """Telescoping identities for E[h(x + S(n)); tau > n]."""

    @pytest.mark.parametrize("x", [[1.0], [2.0], [5.0]])
    def test_symmetric_law_conserves_h_on_halfline(self, halfline, rademacher, x):
        n = 50
        total = dp_truncated_h(halfline, x, rademacher, n) + dp_exit_h(halfline, x, rademacher, n)
        assert total == pytest.approx(x[0], rel=1e-10)

    def test_symmetric_law_conserves_h_on_weyl_c2(self, weyl_c2, rademacher):
        x = [1.0, 3.0]
        n = 30
        total = dp_truncated_h(weyl_c2, x, rademacher, n) + dp_exit_h(weyl_c2, x, rademacher, n)
        assert total == pytest.approx(float(weyl_c2.h(np.asarray(x))), rel=1e-9)

    def test_asymmetric_law_accumulates_drift(self, weyl_c2, asymmetric):
        """truncated + exit - h(x) = sum_{k<n} E[g1(x + S(k)); tau > k]."""
        x = np.array([1.0, 3.0])
        model = DefectModel(weyl_c2, asymmetric)
        assert not model.drift_vanishes

        dp = LatticeDP(weyl_c2, x, asymmetric)
        drift = 0.0
        exit_mass = 0.0
        for _ in range(12):
            drift += dp.measure().expectation(model.g1)
            exit_mass += dp.step().exit_expectation(weyl_c2.h)
        truncated = dp.measure().expectation(weyl_c2.h)
        residual = truncated + exit_mass - float(weyl_c2.h(x))
        assert residual == pytest.approx(drift, rel=1e-9, abs=1e-9)

    def test_exact_truncated_h_matches_float(self, weyl_c2, asymmetric):
        exact = dp_truncated_h(weyl_c2, [1.0, 3.0], asymmetric, 6, exact=True)
        approx = dp_truncated_h(weyl_c2, [1.0, 3.0], asymmetric, 6)
        assert float(exact) == pytest.approx(approx, rel=1e-12)

    def test_sequence_starts_at_h(self, halfline, rademacher):
        values = dp_truncated_h_sequence(halfline, [3.0], rademacher, 10)
        assert len(values) == 11
        assert values[0] == pytest.approx(3.0)
        np.testing.assert_allclose(values, 3.0, rtol=1e-12)


@pytest.mark.unit
class TestConditionedLaws:
    """Endpoint laws and conditioned paths."""

    def test_endpoint_law_is_normalized(self, weyl_c2, rademacher):
        law = dp_conditional_endpoint(weyl_c2, [1.0, 3.0], rademacher, 16)
        assert law.weights.sum() == pytest.approx(1.0)
        assert law.scale == pytest.approx(4.0)
        assert not law.projected

    def test_translation_invariant_law_is_projected(self, weyl_a2, rademacher):
        law = dp_conditional_endpoint(weyl_a2, [0.0, 2.0], rademacher, 16)
        assert law.projected
        assert law.coordinates.shape[1] == 1

    def test_endpoint_law_from_measure(self, weyl_c2, rademacher):
        measure = dp_survival_measure(weyl_c2, [1.0, 3.0], rademacher, 9)
        law = endpoint_law_from_measure(weyl_c2, measure)
        assert law.weights.sum() == pytest.approx(1.0)
        assert law.scale == pytest.approx(3.0)
        assert len(law.weights) == len(law.coordinates)

    def test_exact_expectation_of_h_is_conserved(self, halfline, rademacher):
        """h is harmonic for the killed walk, so E[h(S_n); tau > n] = h(x)."""
        measure = dp_survival_measure(halfline, [1.0], rademacher, 3, exact=True)
        assert exact_expectation(halfline, rademacher, measure) == 1

    def test_exact_expectation_needs_exact_masses(self, halfline, rademacher):
        measure = dp_survival_measure(halfline, [1.0], rademacher, 3)
        with pytest.raises(ValueError):
            exact_expectation(halfline, rademacher, measure)

    def test_complement_basis_is_orthonormal(self):
        basis = complement_basis(3)
        np.testing.assert_allclose(basis @ basis.T, np.eye(2), atol=1e-12)
        np.testing.assert_allclose(basis @ np.ones(3), 0.0, atol=1e-12)

    def test_conditioned_paths_stay_inside(self, weyl_c2, asymmetric):
        paths = sample_conditioned_paths(weyl_c2, [1.0, 3.0], asymmetric, 10, 25, rng_stream(4))
        assert paths.shape == (25, 11, 2)
        np.testing.assert_allclose(paths[:, 0], [[1.0, 3.0]] * 25)
        assert weyl_c2.inside(paths[:, 1:].reshape(-1, 2)).all()

    def test_conditioned_path_steps_are_in_support(self, halfline, asymmetric):
        paths = sample_conditioned_paths(halfline, [1.0], asymmetric, 8, 10, rng_stream(2))
        steps = np.diff(paths[..., 0], axis=1)
        assert set(np.unique(steps)) <= {-1.0, 0.0, 2.0}

    def test_conditioned_paths_are_reproducible(self, weyl_a2, rademacher):
        first = sample_conditioned_paths(weyl_a2, [0.0, 2.0], rademacher, 6, 5, rng_stream(8))
        second = sample_conditioned_paths(weyl_a2, [0.0, 2.0], rademacher, 6, 5, rng_stream(8))
        np.testing.assert_array_equal(first, second)


@pytest.mark.unit
class TestMeasureCache:
    """On-disk reuse of float measures."""

    def test_round_trip_through_cache(self, temp_dir, weyl_c2, rademacher):
        cache = MeasureCache(temp_dir / ".cache")
        calls = []

        def compute():
            calls.append(1)
            return dp_survival_measure(weyl_c2, [1.0, 3.0], rademacher, 12)

        first = cache.get_or_compute(weyl_c2, [1.0, 3.0], rademacher, 12, compute)
        second = cache.get_or_compute(weyl_c2, [1.0, 3.0], rademacher, 12, compute)
        assert len(calls) == 1
        assert second.total == pytest.approx(first.total)
        np.testing.assert_array_equal(second.masses, first.masses)

    def test_unreadable_entry_is_recomputed(self, temp_dir, halfline, rademacher):
        cache = MeasureCache(temp_dir)
        measure = dp_survival_measure(halfline, [1.0], rademacher, 4)
        path = cache.store("key", measure)
        path.write_bytes(b"not an archive")
        assert cache.load("key") is None

    def test_measure_csv(self, temp_dir, halfline, rademacher):
        measure = dp_survival_measure(halfline, [1.0], rademacher, 3)
        count = write_measure_csv(temp_dir / "endpoint.csv", OutputMeta("0.1.0", "abc"), measure)
        assert count == 2
        meta, rows = read_csv(temp_dir / "endpoint.csv")
        assert meta["config_hash"] == "abc"
        assert [r["y1"] for _, r in rows] == ["2.0", "4.0"]
