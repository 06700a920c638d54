"""Exact cone algebra: linear forms, sparse polynomials and harmonic cones."""

from .cone import (
    HarmonicCone,
    WeylFamily,
    boundary_distance,
    contains,
    evaluate_h,
    make_cone,
    make_polynomial_cone,
    make_weyl_chamber,
    with_shift,
)
from .forms import LinearForm
from .polynomial import (
    MultiIndex,
    SparsePolynomial,
    laplacian,
    multi_factorial,
    multi_indices,
    partial_derivative,
)
from .properties import (
    DerivativeProfile,
    boundary_constant,
    derivative_bound_profile,
    ray_profile,
    sample_interior,
)

__all__ = [
    "DerivativeProfile",
    "HarmonicCone",
    "LinearForm",
    "MultiIndex",
    "SparsePolynomial",
    "WeylFamily",
    "boundary_constant",
    "boundary_distance",
    "contains",
    "derivative_bound_profile",
    "evaluate_h",
    "laplacian",
    "make_cone",
    "make_polynomial_cone",
    "make_weyl_chamber",
    "multi_factorial",
    "multi_indices",
    "partial_derivative",
    "ray_profile",
    "sample_interior",
    "with_shift",
]
