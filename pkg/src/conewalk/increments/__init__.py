"""Standardized step laws, exact moments and reproducible random streams."""

from .distribution import (
    ASYMMETRIC_THREE_POINT_TABLE,
    FiniteSupport,
    IncrementDistribution,
    JointSupport,
    LatticeSpec,
    MomentReport,
    joint_support,
    make_distribution,
    moment,
    sample,
    sample_array,
    sample_steps,
    validate_moment_assumption,
)
from .rng import rng_stream

__all__ = [
    "ASYMMETRIC_THREE_POINT_TABLE",
    "FiniteSupport",
    "IncrementDistribution",
    "JointSupport",
    "LatticeSpec",
    "MomentReport",
    "joint_support",
    "make_distribution",
    "moment",
    "rng_stream",
    "sample",
    "sample_array",
    "sample_steps",
    "validate_moment_assumption",
]
