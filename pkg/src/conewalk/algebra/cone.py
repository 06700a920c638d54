"""Polynomial cones K = {x : <x, alpha_i> > 0 for all i} and their harmonic polynomials.

The harmonic polynomial of a cone is the product of its forms, h(x) = prod_i <x, alpha_i>.
Construction expands h exactly and checks that its Laplacian vanishes; simulation code
only sees the float form matrices cached on the cone.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from functools import reduce

import numpy as np
import numpy.typing as npt

from ..exceptions import ConeConstructionError, NotHarmonicError, OutsideConeError
from ..models.enums import WeylFamily
from ..models.specs import ConeSpec
from .forms import LinearForm
from .polynomial import SparsePolynomial

logger = logging.getLogger(__name__)

Point = npt.ArrayLike


@dataclass(frozen=True, slots=True)
class HarmonicCone:
    """
    A cone cut out by linear forms together with its harmonic polynomial.

    Immutable after construction, so one instance can be shared by every worker.
    Build through `make_weyl_chamber` or `make_polynomial_cone`, which enforce the
    invariants (exact zero Laplacian, positive interior direction, admissible R).
    """

    dimension: int
    forms: tuple[LinearForm, ...]
    h_expanded: SparsePolynomial
    degree_p: int
    degree_r: int
    interior_direction_x0: tuple[float, ...]
    shift_R: float
    label: str
    form_matrix: npt.NDArray[np.float64] = field(init=False, repr=False, compare=False)
    unit_form_matrix: npt.NDArray[np.float64] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        matrix = np.vstack([f.as_array() for f in self.forms])
        norms = np.array([f.norm for f in self.forms])
        object.__setattr__(self, "form_matrix", matrix)
        object.__setattr__(self, "unit_form_matrix", matrix / norms[:, None])

    @property
    def x0(self) -> npt.NDArray[np.float64]:
        return np.asarray(self.interior_direction_x0, dtype=np.float64)

    @property
    def is_translation_invariant(self) -> bool:
        """True when every form is orthogonal to (1, ..., 1), as for type A."""
        return bool(self.dimension > 1 and all(sum(f.coefficients) == 0 for f in self.forms))

    def form_values(self, points: Point) -> npt.NDArray[np.float64]:
        """<x, alpha_i> for every form, shape (..., p)."""
        return np.asarray(points, dtype=np.float64) @ self.form_matrix.T

    def h(self, points: Point) -> npt.NDArray[np.float64]:
        """Factored-form evaluation of h, vectorised over (..., d)."""
        return np.prod(self.form_values(points), axis=-1)

    def inside(self, points: Point) -> npt.NDArray[np.bool_]:
        return np.all(self.form_values(points) > 0.0, axis=-1)

    def positive_part(self, points: Point) -> npt.NDArray[np.float64]:
        """h * 1_K, which is zero outside the cone even when h itself is positive there."""
        values = self.form_values(points)
        return np.where(np.all(values > 0.0, axis=-1), np.prod(values, axis=-1), 0.0)

    def distances(self, points: Point) -> npt.NDArray[np.float64]:
        """Minimum normalized form value, without the interior check."""
        return np.min(np.asarray(points, dtype=np.float64) @ self.unit_form_matrix.T, axis=-1)

    def shifted(self, points: Point) -> npt.NDArray[np.float64]:
        """x + R * x0."""
        return np.asarray(points, dtype=np.float64) + self.shift_R * self.x0


def evaluate_h(cone: HarmonicCone, x: Point) -> float:
    """Product of <x, alpha_i>; positive iff x is inside the cone up to an even sign count."""
    return float(cone.h(_point(cone, x)))


def contains(cone: HarmonicCone, x: Point) -> bool:
    """Strict membership through the forms, never through the sign of h."""
    return bool(cone.inside(_point(cone, x)))


def boundary_distance(cone: HarmonicCone, x: Point) -> float:
    """delta(x) = min_i <x, alpha_i>/|alpha_i|.

    Exact Euclidean distance to the boundary for Weyl chambers, a lower bound in general.

    Raises:
        OutsideConeError: if x is not strictly inside the cone
    """
    point = _point(cone, x)
    if not cone.inside(point):
        raise OutsideConeError(point, cone.label)
    return float(cone.distances(point))


def _point(cone: HarmonicCone, x: Point) -> npt.NDArray[np.float64]:
    point = np.asarray(x, dtype=np.float64)
    if point.shape != (cone.dimension,):
        raise ValueError(f"Expected a point of dimension {cone.dimension}, got shape {point.shape}")
    return point


# ---------------------------------------------------------------------------- builders


def make_weyl_chamber(
    family: WeylFamily | str, d: int, x0: Sequence[float] | None = None, R: float | None = None
) -> HarmonicCone:
    """Weyl chamber of type A, C or D in dimension d with its product harmonic polynomial."""
    try:
        family = WeylFamily(str(family).upper())
    except ValueError:
        raise ConeConstructionError(f"unknown Weyl family {family!r}, expected A, C or D")

    minimum = 1 if family is WeylFamily.C else 2
    if d < minimum:
        raise ConeConstructionError(f"type {family.value} needs d >= {minimum}, got {d}")

    def unit(j: int, sign: int = 1) -> list[int]:
        row = [0] * d
        row[j] = sign
        return row

    rows: list[list[int]] = []
    for j in range(d):
        for i in range(j):
            # x_j - x_i
            rows.append([a + b for a, b in zip(unit(j), unit(i, -1), strict=True)])
            if family is not WeylFamily.A:
                rows.append([a + b for a, b in zip(unit(j), unit(i), strict=True)])
    if family is WeylFamily.C:
        rows.extend(unit(i) for i in range(d))

    if x0 is None:
        ramp = np.arange(1, d + 1, dtype=np.float64)
        if family is WeylFamily.A:
            ramp = ramp - ramp.mean()
        elif family is WeylFamily.D:
            ramp = ramp - 1.0
        x0 = ramp / np.linalg.norm(ramp)

    return make_polynomial_cone(
        [LinearForm.from_values(r) for r in rows],
        label=f"Weyl{family.value}({d})",
        x0=x0,
        R=R,
    )


def make_polynomial_cone(
    forms: Sequence[LinearForm],
    label: str | None = None,
    x0: Sequence[float] | None = None,
    R: float | None = None,
) -> HarmonicCone:
    """
    Build a cone from arbitrary linear forms.

    The product of the forms is expanded exactly and must have zero Laplacian.
    Without an explicit x0 the interior direction maximises min_i <u, alpha_i/|alpha_i|>
    over unit vectors u. R defaults to the smallest value with
    <R x0, alpha_i/|alpha_i|> >= 1 for every form.

    Raises:
        ConeConstructionError: empty or mixed-dimension forms, empty interior, bad x0 or R
        NotHarmonicError: Laplacian of the product is not identically zero
    """
    forms = tuple(forms)
    if not forms:
        raise ConeConstructionError("at least one linear form is required", label)
    dims = {f.dimension for f in forms}
    if len(dims) != 1:
        raise ConeConstructionError(f"forms have mixed dimensions {sorted(dims)}", label)
    d = dims.pop()
    label = label or f"cone(d={d}, p={len(forms)})"

    h = reduce(lambda acc, f: acc * f.as_polynomial(), forms, SparsePolynomial.constant(d, 1))
    residual = h.laplacian()
    if not residual.is_zero:
        raise NotHarmonicError(residual, label)

    unit_forms = np.vstack([f.as_array() / f.norm for f in forms])
    if x0 is None:
        direction = _maximin_direction(unit_forms)
    else:
        direction = np.asarray(x0, dtype=np.float64)
        if direction.shape != (d,) or not np.linalg.norm(direction) > 0:
            raise ConeConstructionError(f"x0 must be a nonzero vector of length {d}", label)
        direction = direction / np.linalg.norm(direction)

    margin = float(np.min(unit_forms @ direction))
    if margin <= 0:
        reason = "cone has empty interior" if x0 is None else "x0 is not an interior direction"
        raise ConeConstructionError(reason, label)

    minimal_R = 1.0 / margin
    if R is None:
        R = minimal_R
    elif R * margin < 1.0 - 1e-12:
        raise ConeConstructionError(f"R={R} is below the admissible minimum {minimal_R:.6g}", label)

    cone = HarmonicCone(
        dimension=d,
        forms=forms,
        h_expanded=h,
        degree_p=len(forms),
        degree_r=h.max_variable_degree,
        interior_direction_x0=tuple(float(c) for c in direction),
        shift_R=float(R),
        label=label,
    )
    logger.debug(f"Built {label}: p={cone.degree_p}, r={cone.degree_r}, R={cone.shift_R:.6g}")
    return cone


def with_shift(cone: HarmonicCone, R: float) -> HarmonicCone:
    """Same cone with another admissible shift radius."""
    margin = float(np.min(cone.unit_form_matrix @ cone.x0))
    if R * margin < 1.0 - 1e-12:
        raise ConeConstructionError(
            f"R={R} is below the admissible minimum {1.0 / margin:.6g}", cone.label
        )
    return replace(cone, shift_R=float(R))


def _maximin_direction(
    unit_forms: npt.NDArray[np.float64], iterations: int = 4000
) -> npt.NDArray[np.float64]:
    """Projected subgradient ascent of u -> min_i <u, a_i> on the unit sphere."""
    u = unit_forms.sum(axis=0)
    if np.linalg.norm(u) < 1e-12:
        u = unit_forms[0].copy()
    u = u / np.linalg.norm(u)
    best, best_value = u, float(np.min(unit_forms @ u))

    for it in range(iterations):
        values = unit_forms @ u
        active = int(np.argmin(values))
        grad = unit_forms[active] - values[active] * u
        u = u + grad * (0.5 / np.sqrt(it + 1.0))
        u = u / np.linalg.norm(u)
        value = float(np.min(unit_forms @ u))
        if value > best_value:
            best, best_value = u, value
    return best


def make_cone(spec: ConeSpec) -> HarmonicCone:
    """Build the cone a config describes."""
    if spec.family is not None:
        assert spec.dimension is not None
        cone = make_weyl_chamber(spec.family, spec.dimension, x0=spec.x0, R=spec.R)
        return replace(cone, label=spec.label) if spec.label else cone
    assert spec.forms is not None
    forms = [LinearForm.from_values(row) for row in spec.forms]
    return make_polynomial_cone(forms, label=spec.label, x0=spec.x0, R=spec.R)
