"""Exact dynamic programming over lattice walks and brute-force enumeration."""

from .brute_force import PATH_BUDGET, BruteForceResult, brute_force_enumerate
from .cache import MeasureCache, measure_key, write_measure_csv
from .lattice import (
    EXACT_MAX_DIMENSION,
    EXACT_MAX_STEPS,
    LatticeDP,
    LatticeGeometry,
    LatticeMeasure,
    StepResult,
    estimate_dp_bytes,
)
from .queries import (
    EndpointLaw,
    complement_basis,
    dp_conditional_endpoint,
    dp_exit_h,
    dp_survival_measure,
    dp_survival_prob,
    dp_truncated_h,
    dp_truncated_h_sequence,
    endpoint_law_from_measure,
    exact_expectation,
    sample_conditioned_path,
    sample_conditioned_paths,
)

__all__ = [
    "EXACT_MAX_DIMENSION",
    "EXACT_MAX_STEPS",
    "PATH_BUDGET",
    "BruteForceResult",
    "EndpointLaw",
    "LatticeDP",
    "LatticeGeometry",
    "LatticeMeasure",
    "MeasureCache",
    "StepResult",
    "brute_force_enumerate",
    "complement_basis",
    "dp_conditional_endpoint",
    "dp_exit_h",
    "dp_survival_measure",
    "dp_survival_prob",
    "dp_truncated_h",
    "dp_truncated_h_sequence",
    "endpoint_law_from_measure",
    "estimate_dp_bytes",
    "exact_expectation",
    "measure_key",
    "sample_conditioned_path",
    "sample_conditioned_paths",
    "write_measure_csv",
]
