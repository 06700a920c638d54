"""Enumerations shared by the engines and the configuration models."""

from enum import Enum


class WeylFamily(str, Enum):
    """Weyl chamber families."""

    A = "A"  # x_1 < ... < x_d
    C = "C"  # 0 < x_1 < ... < x_d
    D = "D"  # |x_1| < x_2 < ... < x_d


class DistributionKind(str, Enum):
    """Registered standardized step laws."""

    RADEMACHER = "rademacher"
    LAZY_RADEMACHER = "lazy_rademacher"
    UNIFORM_STD = "uniform_std"
    EXP_CENTERED = "exp_centered"
    PARETO_STD = "pareto_std"
    DISCRETE = "discrete"
    ASYMMETRIC_THREE_POINT = "asymmetric_three_point"  # {-1, 0, 2} w.p. 1/3, 1/2, 1/6


class SurvivalMethod(str, Enum):
    """How a survival curve was produced."""

    MC = "mc"
    SPLITTING = "splitting"
    DP_EXACT = "dp_exact"


class RunMethod(str, Enum):
    """Engine selected by a run configuration."""

    MC = "mc"
    SPLITTING = "splitting"
    DP = "dp"


class HarmonicMethod(str, Enum):
    """Estimator used for V."""

    TRUNCATED_LIMIT = "truncated_limit"
    CORRECTED_REPRESENTATION = "corrected_representation"


class FitMethod(str, Enum):
    """Tail exponent estimator."""

    LOGLOG_FIT = "loglog_fit"
    RATIO = "ratio"


class SamplerKind(str, Enum):
    """Path samplers available to `conewalk sample`."""

    CONDITIONED = "conditioned"  # exact, conditioned on survival to n
    H_TRANSFORM = "h_transform"  # conditioned to survive forever
