"""The one-step defect, estimators of V and the h-transform sampler."""

from .defect import (
    DefectDecomposition,
    DefectModel,
    boundary_defect_g2,
    free_drift_g1,
    one_step_defect_f,
    support_combinations,
)
from .estimators import (
    DEFAULT_CAP,
    DP_REL_TOL,
    MC_REL_TOL,
    HarmonicEstimate,
    corrected_V,
    estimate_V,
    harmonicity_residual,
    interior_point,
    shifted_truncated_h,
)
from .h_transform import HTransformPath, sample_h_transform
from .series import extrapolate_tail
from .table import HarmonicTable, harmonic_grid

__all__ = [
    "DEFAULT_CAP",
    "DP_REL_TOL",
    "MC_REL_TOL",
    "DefectDecomposition",
    "DefectModel",
    "HTransformPath",
    "HarmonicEstimate",
    "HarmonicTable",
    "boundary_defect_g2",
    "corrected_V",
    "estimate_V",
    "extrapolate_tail",
    "free_drift_g1",
    "harmonic_grid",
    "harmonicity_residual",
    "interior_point",
    "one_step_defect_f",
    "sample_h_transform",
    "shifted_truncated_h",
    "support_combinations",
]
