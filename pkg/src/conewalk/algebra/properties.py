"""Empirical geometric constants of a cone.

These report quantities whose existence is known but whose values are not:
the constant C in h(x) <= C |x|^(p-1) delta(x), and the Harnack-type ratio
|d^alpha h| delta^|alpha| / h. Values are measured over samples, never certified.
"""

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .cone import HarmonicCone
from .polynomial import MultiIndex


def sample_interior(
    cone: HarmonicCone, count: int, rng: np.random.Generator, spread: float = 2.0
) -> npt.NDArray[np.float64]:
    """Random interior points: Gaussian clouds pushed along x0, rejected outside K."""
    accepted: list[npt.NDArray[np.float64]] = []
    total = 0
    while total < count:
        batch = max(2 * (count - total), 64)
        points = rng.standard_normal((batch, cone.dimension))
        points += rng.exponential(spread, size=(batch, 1)) * cone.x0
        points = points[cone.inside(points)]
        accepted.append(points)
        total += len(points)
    return np.concatenate(accepted)[:count]


def boundary_constant(cone: HarmonicCone, samples: npt.ArrayLike) -> float:
    """sup over samples of h(x) / (|x|^(p-1) delta(x))."""
    points = np.asarray(samples, dtype=np.float64)
    points = points[cone.inside(points)]
    if len(points) == 0:
        raise ValueError("No interior samples given")
    norms = np.linalg.norm(points, axis=-1)
    ratios = cone.h(points) / (norms ** (cone.degree_p - 1) * cone.distances(points))
    return float(np.max(ratios))


@dataclass(frozen=True, slots=True)
class DerivativeProfile:
    """sup of |d^alpha h| delta^k / h over a sample set, with the per-point values."""

    multi_index: MultiIndex
    supremum: float
    values: npt.NDArray[np.float64]


def derivative_bound_profile(
    cone: HarmonicCone, multi_index: MultiIndex, samples: npt.ArrayLike
) -> DerivativeProfile:
    points = np.asarray(samples, dtype=np.float64)
    points = points[cone.inside(points)]
    order = sum(multi_index)
    derivative = cone.h_expanded.partial_derivative(multi_index)
    values = (
        np.abs(derivative.evaluate(points)) * cone.distances(points) ** order / cone.h(points)
    )
    return DerivativeProfile(tuple(multi_index), float(np.max(values)), values)


def ray_profile(
    cone: HarmonicCone,
    multi_index: MultiIndex,
    ts: npt.ArrayLike,
    base: npt.ArrayLike | None = None,
) -> npt.NDArray[np.float64]:
    """|d^alpha h| delta^k / h at base + t x0 for each t."""
    ts = np.asarray(ts, dtype=np.float64)
    origin = np.zeros(cone.dimension) if base is None else np.asarray(base, dtype=np.float64)
    points = origin + ts[:, None] * cone.x0
    return derivative_bound_profile(cone, multi_index, points).values
