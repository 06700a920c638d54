"""Tests for the one-step defect, estimators of V and the h-transform."""

import math

import numpy as np
import pytest
from scipy.special import zeta

from conewalk.algebra import make_weyl_chamber
from conewalk.exceptions import (
    HarmonicValueUnavailableError,
    InvalidDistributionError,
    NonLatticeDistributionError,
    OutsideConeError,
)
from conewalk.harmonic import (
    DefectModel,
    HarmonicTable,
    boundary_defect_g2,
    corrected_V,
    estimate_V,
    extrapolate_tail,
    free_drift_g1,
    harmonic_grid,
    harmonicity_residual,
    one_step_defect_f,
    sample_h_transform,
    shifted_truncated_h,
)
from conewalk.increments import make_distribution, rng_stream
from conewalk.io.tables import OutputMeta
from conewalk.models import HarmonicMethod
from conewalk.oracle import dp_survival_measure, dp_truncated_h_sequence


def identity_V(points):
    """V(x) = x on the half-line."""
    return np.asarray(points, dtype=np.float64)[..., 0]


@pytest.mark.unit
class TestDefect:
    """Drift and boundary parts of E[h(x + X); x + X in K] - h(x)."""

    @pytest.mark.parametrize("d", [2, 3])
    def test_drift_vanishes_for_type_a(self, asymmetric, d):
        assert DefectModel(make_weyl_chamber("A", d), asymmetric).drift_vanishes

    def test_drift_vanishes_for_symmetric_law(self, weyl_c2, rademacher):
        assert DefectModel(weyl_c2, rademacher).drift_vanishes

    def test_drift_on_weyl_c2(self, weyl_c2, asymmetric):
        """With third moment 1 the drift of x y (y^2 - x^2) is x - y."""
        assert free_drift_g1(weyl_c2, asymmetric, (1, 3)) == -2
        model = DefectModel(weyl_c2, asymmetric)
        np.testing.assert_allclose(model.g1(np.array([[1.0, 3.0], [2.0, 5.0]])), [-2.0, -3.0])

    def test_boundary_part_for_rademacher(self, halfline, rademacher):
        """From 1/2 the step -1 lands at -1/2."""
        decomposition = one_step_defect_f(halfline, rademacher, (0.5,))
        assert decomposition.boundary_exact == pytest.approx(-0.25)
        assert decomposition.f_value == pytest.approx(0.25)
        assert decomposition.boundary_std_error == 0.0

    @pytest.mark.slow
    def test_exponential_defect(self, halfline):
        """f(1/2) = e^(-1/2) - 1/2 for centred exponential steps."""
        dist = make_distribution("exp_centered")
        decomposition = one_step_defect_f(halfline, dist, (0.5,), budget=400_000, master_seed=3)
        target = math.exp(-0.5) - 0.5
        assert abs(decomposition.f_value - target) < 5 * decomposition.boundary_std_error + 1e-4

    def test_vectorised_matches_exact(self, weyl_c2, asymmetric):
        model = DefectModel(weyl_c2, asymmetric)
        points = np.array([[1.0, 3.0], [0.5, 1.0], [2.0, 2.5]])
        exact = [float(model.g2_exact(p)) for p in points]
        np.testing.assert_allclose(model.g2(points), exact, rtol=1e-12, atol=1e-12)

    def test_g2_needs_finite_law(self, halfline):
        model = DefectModel(halfline, make_distribution("uniform_std"))
        with pytest.raises(ValueError):
            model.g2(np.array([[1.0]]))

    def test_monte_carlo_g2_is_reproducible(self, halfline):
        dist = make_distribution("uniform_std")
        assert boundary_defect_g2(halfline, dist, (1.0,), 1000, 4) == boundary_defect_g2(
            halfline, dist, (1.0,), 1000, 4
        )

    def test_outside_point_rejected(self, halfline, rademacher):
        with pytest.raises(OutsideConeError):
            one_step_defect_f(halfline, rademacher, (-1.0,))


@pytest.mark.unit
class TestTailExtrapolation:
    """Tail sums of power-law sequences."""

    def test_exact_power_law(self):
        terms = [k**-2.0 for k in range(1, 201)]
        tail = extrapolate_tail(terms, 2.0, first_k=1)
        assert tail == pytest.approx(float(zeta(2.0, 201)), rel=1e-6)

    def test_alternating_parities(self):
        """Even and odd terms on different curves are fitted separately."""
        terms = [(2.0 if k % 2 else 1.0) * k**-1.5 for k in range(1, 401)]
        tail = extrapolate_tail(terms, 1.5, first_k=1)
        # odd k >= 401 carry weight 2, even k >= 402 weight 1
        expected = 2.0**-1.5 * (2.0 * float(zeta(1.5, 200.5)) + float(zeta(1.5, 201.0)))
        assert tail == pytest.approx(expected, rel=1e-2)

    def test_too_few_terms(self):
        assert extrapolate_tail([1.0, 0.5, 0.25], 2.0) == 0.0

    def test_non_summable_exponent(self):
        with pytest.raises(ValueError):
            extrapolate_tail([1.0] * 20, 1.0)


@pytest.mark.unit
class TestEstimators:
    """V on the half-line under the simple walk is V(x) = x."""

    @pytest.mark.parametrize("x", [1.0, 3.0])
    def test_truncated_limit(self, halfline, rademacher, x):
        estimate = estimate_V(halfline, rademacher, (x,), cap=1024)
        assert estimate.value == pytest.approx(x, rel=1e-6)
        assert estimate.converged
        assert estimate.method is HarmonicMethod.TRUNCATED_LIMIT

    def test_corrected_representation(self, halfline, rademacher):
        estimate = corrected_V(halfline, rademacher, (3.0,), cap=4096)
        assert estimate.value == pytest.approx(3.0, rel=2e-3)
        assert estimate.method is HarmonicMethod.CORRECTED_REPRESENTATION
        assert estimate.shift_R == pytest.approx(1.0)

    def test_shifted_truncated_h_by_hand(self, halfline, rademacher):
        """E[h(1 + R + S(3)); tau > 3] = h(1) + R P(tau > 3) with P(tau > 3) = 3/8."""
        assert shifted_truncated_h(halfline, rademacher, [1.0], 3) == pytest.approx(1.375)
        assert shifted_truncated_h(halfline, rademacher, [1.0], 3, R=2.0) == pytest.approx(1.75)

    def test_shift_radius_does_not_matter(self, weyl_c2, rademacher):
        small = corrected_V(weyl_c2, rademacher, (1.0, 3.0), cap=512, rel_tol=1e-5)
        large = corrected_V(weyl_c2, rademacher, (1.0, 3.0), R=4.0, cap=512, rel_tol=1e-5)
        assert small.value == pytest.approx(large.value, rel=1e-3)

    def test_truncated_h_increments_are_the_defect(self, weyl_c2, asymmetric):
        """E[h(S(k+1)); tau > k+1] - E[h(S(k)); tau > k] = E[f(S(k)); tau > k]."""
        x = [1.0, 3.0]
        model = DefectModel(weyl_c2, asymmetric)
        values = dp_truncated_h_sequence(weyl_c2, x, asymmetric, 10)
        for k in (1, 4, 9):
            measure = dp_survival_measure(weyl_c2, x, asymmetric, k)
            assert measure.expectation(model.g1) != 0.0
            assert values[k + 1] - values[k] == pytest.approx(
                measure.expectation(model.f), rel=1e-10, abs=1e-10
            )

    @pytest.mark.parametrize("x", [1.0, 2.0, 5.0])
    def test_representations_agree_without_overshoot(self, halfline, asymmetric, x):
        """Steps of -1 exit exactly at 0, so V(x) = x for the three-point law."""
        truncated = estimate_V(halfline, asymmetric, (x,), cap=4096)
        corrected = corrected_V(halfline, asymmetric, (x,), cap=4096)
        assert truncated.value == pytest.approx(x, rel=1e-6)
        assert corrected.value == pytest.approx(truncated.value, rel=1e-3)

    def test_representations_agree_with_drift(self, weyl_c2, asymmetric):
        """g1 is non-zero here, so the corrected series carries the drift terms."""
        assert not DefectModel(weyl_c2, asymmetric).drift_vanishes
        truncated = estimate_V(weyl_c2, asymmetric, (1.0, 3.0), cap=256, rel_tol=1e-6)
        corrected = corrected_V(weyl_c2, asymmetric, (1.0, 3.0), cap=256, rel_tol=1e-6)
        assert corrected.value > 0
        assert corrected.value == pytest.approx(truncated.value, rel=1e-2)

    def test_corrected_needs_lattice(self, halfline):
        with pytest.raises(NonLatticeDistributionError):
            corrected_V(halfline, make_distribution("uniform_std"), (1.0,))

    def test_monte_carlo_truncated_limit(self, halfline):
        dist = make_distribution("uniform_std")
        estimate = estimate_V(halfline, dist, (2.0,), n0=8, cap=64, trials=20_000)
        assert estimate.std_error > 0
        assert estimate.value > 2.0

    def test_outside_point(self, halfline, rademacher):
        with pytest.raises(OutsideConeError):
            estimate_V(halfline, rademacher, (0.0,))

    def test_harmonicity_residual_of_exact_V(self, halfline, rademacher):
        for x in (1.0, 2.0, 5.0):
            assert harmonicity_residual(halfline, rademacher, (x,), identity_V) < 1e-12

    def test_harmonicity_residual_detects_wrong_V(self, halfline, rademacher):
        """h + 1 is not harmonic for the killed walk at 1."""
        residual = harmonicity_residual(halfline, rademacher, (1.0,), lambda p: identity_V(p) + 1)
        assert residual == pytest.approx(0.25)


@pytest.mark.unit
class TestHarmonicTable:
    """Cached V values."""

    def test_values_are_cached(self, halfline, rademacher):
        table = HarmonicTable(halfline, rademacher, cap=1024)
        first = table.estimate((2.0,))
        assert table.estimate((2.0,)) is first
        assert len(table) == 1
        assert (2.0,) in table

    def test_zero_outside(self, halfline, rademacher):
        table = HarmonicTable(halfline, rademacher, cap=1024)
        values = table(np.array([[-1.0], [0.0], [2.0]]))
        assert values[0] == 0.0 and values[1] == 0.0
        assert values[2] == pytest.approx(2.0, rel=1e-2)

    def test_non_lattice_falls_back_to_monte_carlo(self, halfline):
        table = HarmonicTable(halfline, make_distribution("uniform_std"))
        assert table.method is HarmonicMethod.TRUNCATED_LIMIT

    def test_csv_round_trip(self, temp_dir, halfline, rademacher):
        table = harmonic_grid(halfline, rademacher, [(1.0,), (2.0,)], ray=[4.0], cap=512)
        table.write_csv(temp_dir / "harmonic.csv", OutputMeta("0.1.0", "abc"))
        loaded = HarmonicTable.from_csv(temp_dir / "harmonic.csv", halfline, rademacher)
        assert len(loaded) == 3
        assert loaded.value((4.0,)) == pytest.approx(table.value((4.0,)))
        with pytest.raises(HarmonicValueUnavailableError):
            loaded.value((7.0,))


@pytest.mark.unit
class TestHTransform:
    """Rejection sampling of the conditioned walk."""

    def test_paths_stay_inside(self, halfline, rademacher):
        path = sample_h_transform(halfline, rademacher, (1.0,), identity_V, 50, rng_stream(3))
        assert path.points.shape == (51, 1)
        assert np.all(path.points[1:, 0] > 0)
        assert set(np.unique(np.diff(path.points[:, 0]))) <= {-1.0, 1.0}
        assert 0 < path.acceptance_rate <= 1

    def test_reproducible(self, halfline, rademacher):
        first = sample_h_transform(halfline, rademacher, (2.0,), identity_V, 20, rng_stream(7))
        second = sample_h_transform(halfline, rademacher, (2.0,), identity_V, 20, rng_stream(7))
        np.testing.assert_array_equal(first.points, second.points)

    def test_infinite_support_needs_envelope(self, halfline):
        with pytest.raises(InvalidDistributionError):
            sample_h_transform(
                halfline, make_distribution("uniform_std"), (1.0,), identity_V, 5, rng_stream(1)
            )

    def test_missing_V(self, halfline, rademacher):
        with pytest.raises(HarmonicValueUnavailableError):
            sample_h_transform(
                halfline, rademacher, (1.0,), lambda p: np.zeros(len(p)), 5, rng_stream(1)
            )
