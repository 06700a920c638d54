"""Tests for step laws, exact moments and random streams."""

from fractions import Fraction

import numpy as np
import pytest
import sympy

from conewalk.exceptions import (
    InvalidDistributionError,
    MomentUnavailableError,
    NonLatticeDistributionError,
)
from conewalk.increments import (
    joint_support,
    make_distribution,
    moment,
    rng_stream,
    sample,
    sample_array,
    sample_steps,
    validate_moment_assumption,
)
from conewalk.models import DistributionSpec


@pytest.mark.unit
class TestFiniteLaws:
    """Exact finite supports and their lattices."""

    def test_rademacher(self, rademacher):
        assert rademacher.support.values == (-1, 1)
        assert rademacher.support.probabilities == (Fraction(1, 2), Fraction(1, 2))
        assert rademacher.lattice.mesh == 1
        assert rademacher.is_symmetric

    def test_asymmetric_three_point(self, asymmetric):
        """{-1, 0, 2} is already standardized and has third moment 1."""
        assert asymmetric.support.values == (-1, 0, 2)
        assert asymmetric.support.probabilities == (
            Fraction(1, 3),
            Fraction(1, 2),
            Fraction(1, 6),
        )
        assert moment(asymmetric, 1) == 0
        assert moment(asymmetric, 2) == 1
        assert moment(asymmetric, 3) == 1
        assert not asymmetric.is_symmetric

    def test_lazy_rademacher_is_rescaled(self):
        """q = 1/2 puts mass on +-sqrt(2) and 0, on the lattice sqrt(2) Z."""
        lazy = make_distribution("lazy_rademacher", q="1/2")
        root2 = sympy.sqrt(2)
        assert lazy.support.values == (-root2, 0, root2)
        assert lazy.lattice.mesh == root2
        assert lazy.support.steps == (-1, 0, 1)
        assert moment(lazy, 2) == 1

    def test_discrete_is_standardized(self):
        dist = make_distribution("discrete", table={"0": "1/2", "2": "1/2"})
        assert dist.support.values == (-1, 1)

    def test_discrete_without_lattice(self):
        dist = make_distribution("discrete", table={"0": "1/2", "1": "1/4", "sqrt(2)": "1/4"})
        assert dist.is_finite
        assert not dist.is_lattice
        with pytest.raises(NonLatticeDistributionError):
            dist.require_lattice("DP survival")

    def test_probabilities_must_sum_to_one(self):
        with pytest.raises(InvalidDistributionError):
            make_distribution("discrete", table={"0": "1/2", "1": "1/4"})

    def test_point_mass_rejected(self):
        with pytest.raises(InvalidDistributionError):
            make_distribution("discrete", table={"3": "1"})

    def test_lazy_without_q_rejected(self):
        with pytest.raises(InvalidDistributionError):
            make_distribution("lazy_rademacher")

    def test_unknown_kind_rejected(self):
        with pytest.raises(InvalidDistributionError):
            make_distribution("cauchy")

    def test_from_spec(self):
        dist = make_distribution(DistributionSpec(kind="pareto_std", a=3.5))
        assert dist.heavy_tail_index == 3.5
        assert not dist.is_finite


@pytest.mark.unit
class TestMoments:
    """Exact moments of the continuous laws."""

    def test_exp_centered(self):
        dist = make_distribution("exp_centered")
        assert moment(dist, 2) == 1
        assert moment(dist, 3) == 2
        assert moment(dist, 4) == 9

    def test_uniform_std(self):
        dist = make_distribution("uniform_std")
        assert moment(dist, 2) == 1
        assert moment(dist, 3) == 0
        assert moment(dist, 4) == sympy.Rational(9, 5)

    def test_pareto_variance_is_one(self):
        dist = make_distribution("pareto_std", a="9/2")
        assert moment(dist, 2) == 1
        assert moment(dist, 3) == 0

    def test_pareto_missing_moment(self):
        dist = make_distribution("pareto_std", a="9/2")
        with pytest.raises(MomentUnavailableError):
            moment(dist, 5)

    def test_moment_table_stops_at_tail_index(self):
        dist = make_distribution("pareto_std", a="7/2")
        assert sorted(dist.moment_table) == [0, 1, 2, 3]

    def test_negative_order_rejected(self, rademacher):
        with pytest.raises(ValueError):
            moment(rademacher, -1)


@pytest.mark.unit
class TestMomentAssumption:
    """The moment condition of a law against a cone."""

    def test_light_tails_always_pass(self, rademacher, weyl_c2):
        report = validate_moment_assumption(rademacher, weyl_c2)
        assert report.satisfied
        assert report.required_order == 3

    def test_heavy_tail_fails_above_index(self, weyl_c2):
        report = validate_moment_assumption(make_distribution("pareto_std", a="5/2"), weyl_c2)
        assert not report.satisfied
        assert not report.absolute_moment_finite

    def test_heavy_tail_passes_below_index(self, weyl_c2):
        report = validate_moment_assumption(make_distribution("pareto_std", a="7/2"), weyl_c2)
        assert report.satisfied

    def test_log_condition_for_small_r(self, weyl_a2):
        report = validate_moment_assumption(make_distribution("pareto_std", a="5/2"), weyl_a2)
        assert report.log_condition is True
        assert report.satisfied


@pytest.mark.unit
class TestSampling:
    """Reproducible draws."""

    def test_same_seed_same_draws(self, asymmetric):
        first = sample_array(asymmetric, rng_stream(5, 1), (100, 2))
        second = sample_array(asymmetric, rng_stream(5, 1), (100, 2))
        np.testing.assert_array_equal(first, second)

    def test_streams_differ(self, rademacher):
        first = sample_array(rademacher, rng_stream(5, 1), 200)
        second = sample_array(rademacher, rng_stream(5, 2), 200)
        assert not np.array_equal(first, second)

    def test_lattice_draws_stay_on_support(self, asymmetric):
        draws = sample_array(asymmetric, rng_stream(3), 1000)
        assert set(np.unique(draws)) <= {-1.0, 0.0, 2.0}

    def test_steps(self, asymmetric):
        steps = sample_steps(asymmetric, rng_stream(3), 1000)
        assert set(np.unique(steps)) <= {-1, 0, 2}

    def test_continuous_sample_mean(self):
        dist = make_distribution("exp_centered")
        draws = sample_array(dist, rng_stream(9), 200_000)
        assert abs(draws.mean()) < 0.02
        assert draws.var() == pytest.approx(1.0, abs=0.03)

    def test_single_sample_is_float(self, rademacher):
        assert sample(rademacher, rng_stream(1)) in (-1.0, 1.0)

    def test_joint_support(self, rademacher):
        joint = joint_support(rademacher, 2)
        assert len(joint) == 4
        assert sum(joint.exact) == 1
        assert joint.steps.shape == (4, 2)
