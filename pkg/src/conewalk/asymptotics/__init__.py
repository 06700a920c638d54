"""Tail exponent fits, proportionality and endpoint-law checks, verification reports."""

from .checks import (
    TV_BOX_RADIUS,
    ProportionalityCheck,
    TruncatedHGrowth,
    endpoint_density_distance,
    estimate_kappa,
    global_tail_bound,
    near_boundary_bound,
    near_boundary_profile,
    proportionality_check,
    relative_drift,
    target_cell_masses,
    truncated_h_growth,
)
from .fits import ExponentFit, RatioSequence, fit_tail_exponent, ratio_exponent
from .report import CriterionResult, StartFits, VerificationReport

__all__ = [
    "TV_BOX_RADIUS",
    "CriterionResult",
    "ExponentFit",
    "ProportionalityCheck",
    "RatioSequence",
    "StartFits",
    "TruncatedHGrowth",
    "VerificationReport",
    "endpoint_density_distance",
    "estimate_kappa",
    "fit_tail_exponent",
    "global_tail_bound",
    "near_boundary_bound",
    "near_boundary_profile",
    "proportionality_check",
    "ratio_exponent",
    "relative_drift",
    "target_cell_masses",
    "truncated_h_growth",
]
