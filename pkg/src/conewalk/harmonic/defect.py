"""The one-step defect f(x) = E[h(x + X); x + X in K] - h(x).

It splits into the free drift g1(x) = E[h(x + X)] - h(x) and the boundary part
g2(x) = E[h(x + X); x + X not in K], with f = g1 - g2.

Because h is a polynomial of degree at most r in each variable and the coordinates
of X are independent, the Taylor expansion of E[h(x + X)] terminates:

    g1 = sum over alpha != 0 with alpha_j <= r of d^alpha h(x) * prod_j m_{alpha_j} / alpha!

so g1 is itself a polynomial, the drift polynomial G, built once with exact
coefficients. g2 is exact by support enumeration for finite laws and Monte Carlo
otherwise.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import sympy

from ..algebra import HarmonicCone, SparsePolynomial, multi_factorial, multi_indices
from ..exceptions import InvalidBudgetError, OutsideConeError
from ..increments import IncrementDistribution, joint_support, moment, rng_stream, sample_array
from ..utils import canonical, to_exact

logger = logging.getLogger(__name__)

# points per chunk when enumerating the joint support for many points at once
_CHUNK_CELLS = 2**22


@dataclass(frozen=True, slots=True)
class DefectDecomposition:
    """f(x) = drift_part - boundary_part, with the boundary part's standard error."""

    x: tuple[float, ...]
    drift_part: sympy.Expr
    boundary_part: float
    boundary_std_error: float
    f_value: float
    normalized_decay: float
    boundary_exact: sympy.Expr | None = None


class DefectModel:
    """
    Drift polynomial and defect evaluation for one (cone, law).

    Example:
        ```python
        model = DefectModel(cone, dist)
        model.f(points)            # vectorised, finite laws
        model.g1_exact((2, 1))     # exact sympy number
        ```

    Raises:
        MomentUnavailableError: if a moment of order <= r does not exist
    """

    def __init__(self, cone: HarmonicCone, dist: IncrementDistribution):
        self.cone = cone
        self.dist = dist
        self.drift = _drift_polynomial(cone, dist)
        self._joint = joint_support(dist, cone.dimension) if dist.is_finite else None
        if self._joint is not None:
            values = np.asarray(dist.support.values_float)
            combos = support_combinations(len(dist.support), cone.dimension)
            self._jumps = values[combos]
            self._jump_probs = self._joint.probabilities
        logger.debug(
            f"Drift polynomial on {cone.label} under {dist.label}: "
            f"{'zero' if self.drift.is_zero else f'{len(self.drift.terms)} terms'}"
        )

    @property
    def drift_vanishes(self) -> bool:
        """True when g1 is identically zero, e.g. for type A or symmetric laws."""
        return self.drift.is_zero

    # -------------------------------------------------------------------- g1

    def g1(self, points: npt.ArrayLike) -> npt.NDArray[np.float64]:
        pts = np.asarray(points, dtype=np.float64)
        if self.drift.is_zero:
            return np.zeros(pts.shape[:-1])
        return np.asarray(self.drift.evaluate(pts))

    def g1_exact(self, x: npt.ArrayLike) -> sympy.Expr:
        return self.drift.evaluate_exact(list(_exact_point(x)))

    # -------------------------------------------------------------------- g2

    def g2(self, points: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """E[h(y + X); y + X not in K] for every row y (finite laws only)."""
        if self._joint is None:
            raise ValueError("vectorised g2 needs a finite law; use boundary_defect_g2")
        pts = np.asarray(points, dtype=np.float64)
        flat = pts.reshape(-1, self.cone.dimension)
        out = np.empty(len(flat))
        chunk = max(1, _CHUNK_CELLS // len(self._jump_probs))
        for start in range(0, len(flat), chunk):
            block = flat[start : start + chunk]
            moved = block[:, None, :] + self._jumps[None, :, :]
            values = self.cone.form_values(moved)
            outside = ~np.all(values > 0.0, axis=-1)
            h = np.prod(values, axis=-1)
            out[start : start + len(block)] = np.where(outside, h, 0.0) @ self._jump_probs
        return out.reshape(pts.shape[:-1])

    def g2_exact(self, x: npt.ArrayLike) -> sympy.Expr:
        """Exact boundary part by enumerating the joint support at an exact point."""
        if self._joint is None:
            raise ValueError("exact g2 needs a finite law")
        point = _exact_point(x)
        values = self.dist.support.values
        total = sympy.Integer(0)
        for combo, p in zip(
            support_combinations(len(values), self.cone.dimension), self._joint.exact, strict=True
        ):
            moved = [c + values[i] for c, i in zip(point, combo, strict=True)]
            forms = [f.as_polynomial().evaluate_exact(moved) for f in self.cone.forms]
            if all(v > 0 for v in forms):
                continue
            total += sympy.Rational(p.numerator, p.denominator) * sympy.Mul(*forms)
        return canonical(total)

    # --------------------------------------------------------------------- f

    def f(self, points: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """g1 - g2 at every row (finite laws only)."""
        return self.g1(points) - self.g2(points)


def _drift_polynomial(cone: HarmonicCone, dist: IncrementDistribution) -> SparsePolynomial:
    r = cone.degree_r
    moments = [moment(dist, k) for k in range(r + 1)]
    drift = SparsePolynomial.zero(cone.dimension)
    for alpha in multi_indices(cone.dimension, r):
        if not any(alpha):
            continue
        weight = sympy.Mul(*(moments[a] for a in alpha))
        if weight == 0:
            continue
        derivative = cone.h_expanded.partial_derivative(alpha)
        if derivative.is_zero:
            continue
        drift = drift + derivative.scale(canonical(weight / multi_factorial(alpha)))
    return drift


def support_combinations(m: int, d: int) -> npt.NDArray[np.intp]:
    """Index tuples of the d-fold product support, in the order of joint_support."""
    return np.indices((m,) * d).reshape(d, -1).T


def _exact_point(x: npt.ArrayLike) -> tuple[sympy.Expr, ...]:
    if isinstance(x, np.ndarray):
        return tuple(to_exact(float(c)) for c in x)
    return tuple(to_exact(c) for c in x)


# ---------------------------------------------------------------------------- operations


def free_drift_g1(cone: HarmonicCone, dist: IncrementDistribution, x: npt.ArrayLike) -> sympy.Expr:
    """
    E[h(x + X)] - h(x), exactly.

    Raises:
        MomentUnavailableError: if the law lacks a moment of order <= r
    """
    return DefectModel(cone, dist).g1_exact(x)


def boundary_defect_g2(
    cone: HarmonicCone,
    dist: IncrementDistribution,
    x: npt.ArrayLike,
    budget: int = 100_000,
    master_seed: int = 0,
) -> tuple[float, float]:
    """
    (value, std_error) of the signed E[h(x + X); x + X not in K].

    Exact (zero error) for finite laws; a sample mean over `budget` draws otherwise.
    """
    if budget < 1:
        raise InvalidBudgetError("budget", budget, 1)
    if dist.is_finite:
        return float(DefectModel(cone, dist).g2_exact(x)), 0.0

    point = np.asarray(x, dtype=np.float64)
    moved = point + sample_array(dist, rng_stream(master_seed), (budget, cone.dimension))
    values = np.where(cone.inside(moved), 0.0, cone.h(moved))
    mean = float(np.mean(values))
    error = float(np.std(values, ddof=1) / math.sqrt(budget)) if budget > 1 else 0.0
    return mean, error


def one_step_defect_f(
    cone: HarmonicCone,
    dist: IncrementDistribution,
    x: npt.ArrayLike,
    budget: int = 100_000,
    master_seed: int = 0,
    model: DefectModel | None = None,
) -> DefectDecomposition:
    """
    Drift and boundary parts of f at an interior point.

    Raises:
        OutsideConeError: if x is not strictly inside the cone
        MomentUnavailableError: if the drift polynomial needs a missing moment
    """
    point = np.asarray(x, dtype=np.float64)
    if not cone.inside(point):
        raise OutsideConeError(point, cone.label)
    model = model or DefectModel(cone, dist)
    drift = model.g1_exact(x)

    boundary_exact = None
    if dist.is_finite:
        boundary_exact = model.g2_exact(x)
        boundary, error = float(boundary_exact), 0.0
    else:
        boundary, error = boundary_defect_g2(cone, dist, x, budget, master_seed)

    f_value = float(drift) - boundary
    delta = float(cone.distances(point))
    decay = abs(f_value) * delta**2 / float(cone.h(point))
    return DefectDecomposition(
        x=tuple(float(c) for c in point),
        drift_part=drift,
        boundary_part=boundary,
        boundary_std_error=error,
        f_value=f_value,
        normalized_decay=decay,
        boundary_exact=boundary_exact,
    )
