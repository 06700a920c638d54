"""Shape checks of the survival asymptotics.

P(tau_x > n) ~ kappa V(x) n^(-p/2) with unknown kappa, so every check here is a
ratio or a shape: the spread of n^(p/2) P / V across starts, the distance of the
conditional endpoint law to h(z) exp(-|z|^2 / 2), and the boundedness of the
near-boundary and global normalizations.
"""

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from ..algebra import HarmonicCone
from ..exceptions import MissingHorizonError, ZeroSurvivalMassError
from ..increments import IncrementDistribution
from ..oracle import EndpointLaw, dp_survival_prob
from ..walk import SurvivalCurve, estimate_survival, estimate_truncated_h

logger = logging.getLogger(__name__)

TV_BOX_RADIUS = 7.0
TV_POOL_BELOW = 1e-6


# ------------------------------------------------------------------- proportionality


@dataclass(frozen=True, slots=True)
class ProportionalityCheck:
    """n^(p/2) P(tau_x > n) / V(x) per start at one horizon, and their spread."""

    horizon: int
    normalized: tuple[float, ...]
    spread: float

    @property
    def kappa(self) -> float:
        """Mean of the normalized values, the empirical kappa."""
        return float(np.mean(self.normalized))


def proportionality_check(
    curves: Sequence[SurvivalCurve],
    V_values: Sequence[float],
    p: int,
    horizon: int | None = None,
) -> ProportionalityCheck:
    """
    (max - min) / mean of n^(p/2) P(tau_x > n) / V(x) across starts.

    The horizon defaults to the largest one every curve shares.

    Raises:
        MissingHorizonError: if the curves share no horizon or lack the requested one
    """
    if len(curves) != len(V_values) or not curves:
        raise ValueError("need one V value per curve")
    common = set(curves[0].horizons).intersection(*(c.horizons for c in curves[1:]))
    if horizon is None:
        if not common:
            raise MissingHorizonError("the curves share no horizon")
        horizon = max(common)
    elif horizon not in common:
        raise MissingHorizonError(f"horizon {horizon} is not in every curve")

    normalized = []
    for curve, v in zip(curves, V_values, strict=True):
        if not v > 0:
            raise ValueError(f"V must be positive, got {v!r} at {curve.start}")
        estimate, _ = curve.at(horizon)
        normalized.append(horizon ** (p / 2.0) * estimate / v)

    mean = float(np.mean(normalized))
    spread = (max(normalized) - min(normalized)) / mean if mean > 0 else math.inf
    logger.info(
        f"Proportionality at n={horizon} over {len(curves)} starts: spread {spread:.4g}"
    )
    return ProportionalityCheck(horizon, tuple(normalized), spread)


def estimate_kappa(curve: SurvivalCurve, V: float, p: int) -> float:
    """n^(p/2) P(tau_x > n) / V(x) at the curve's largest horizon."""
    if not V > 0:
        raise ValueError(f"V must be positive, got {V!r}")
    n = curve.horizons[-1]
    return n ** (p / 2.0) * curve.estimates[-1] / V


# -------------------------------------------------------------------- endpoint law


def _subdivisions(dimension: int) -> int:
    if dimension <= 2:
        return 4
    if dimension == 3:
        return 2
    return 1


def target_cell_masses(
    cone: HarmonicCone,
    basis: npt.NDArray[np.float64],
    cell: float = 0.25,
    radius: float = TV_BOX_RADIUS,
) -> npt.NDArray[np.float64]:
    """
    Normalized masses of h(z) exp(-|u|^2 / 2) 1_K(z), z = basis^T u, on a cubic grid.

    Cells of side `cell` tile [-radius, radius)^D in the coordinates u; each cell
    is integrated by the midpoint rule on a regular subgrid. The normalization is
    the same quadrature summed over the box.
    """
    dimension = basis.shape[0]
    cells = int(round(2 * radius / cell))
    sub = _subdivisions(dimension)
    offsets = (np.arange(sub) + 0.5) / sub * cell
    midpoints = (-radius + cell * np.arange(cells)[:, None] + offsets[None, :]).ravel()

    # one slab of the first axis at a time
    if dimension == 1:
        rest = np.empty((1, 0))
    else:
        rest = np.stack(np.meshgrid(*([midpoints] * (dimension - 1)), indexing="ij"), axis=-1)
        rest = rest.reshape(-1, dimension - 1)
    masses = np.empty((cells,) + (cells,) * (dimension - 1))
    for i in range(cells):
        first = midpoints[i * sub : (i + 1) * sub]
        u = np.concatenate(
            [np.repeat(first, len(rest))[:, None], np.tile(rest, (sub, 1))], axis=1
        )
        z = u @ basis
        density = cone.positive_part(z) * np.exp(-0.5 * np.sum(u * u, axis=1))
        block = density.reshape((sub,) + (cells, sub) * (dimension - 1))
        masses[i] = block.sum(axis=tuple([0] + [2 * k + 2 for k in range(dimension - 1)]))

    total = masses.sum()
    if not total > 0:
        raise ValueError("target density has no mass inside the box")
    return masses / total


def endpoint_density_distance(
    law: EndpointLaw,
    cone: HarmonicCone,
    cell: float = 0.25,
    target: npt.NDArray[np.float64] | None = None,
) -> float:
    """
    Total variation between a conditional endpoint law and the normalized h-Gaussian.

    The law is binned on the grid of `target_cell_masses`; cells whose target mass
    is below 1e-6, together with anything outside the box, form one pooled cell.

    Raises:
        ZeroSurvivalMassError: if the law carries no mass
    """
    weights = np.asarray(law.weights, dtype=np.float64)
    total = float(weights.sum())
    if len(weights) == 0 or not total > 0:
        raise ZeroSurvivalMassError(law.n)
    weights = weights / total

    if target is None:
        target = target_cell_masses(cone, law.basis, cell)
    cells = target.shape[0]
    index = np.floor((law.coordinates + TV_BOX_RADIUS) / cell).astype(np.int64)
    in_box = np.all((index >= 0) & (index < cells), axis=1)
    flat = np.ravel_multi_index(tuple(index[in_box].T), target.shape)
    binned = np.bincount(flat, weights=weights[in_box], minlength=target.size)

    target = target.ravel()
    pooled = target < TV_POOL_BELOW
    outside = float(weights[~in_box].sum())
    kept = np.abs(binned[~pooled] - target[~pooled]).sum()
    pool = abs(binned[pooled].sum() + outside - target[pooled].sum())
    tv = 0.5 * float(kept + pool)
    logger.info(f"Endpoint TV on {cone.label} at n={law.n}: {tv:.4g}")
    return tv


# -------------------------------------------------------------------- boundedness


def _survival_curve(
    cone: HarmonicCone,
    dist: IncrementDistribution,
    x: npt.ArrayLike,
    horizons: Sequence[int],
    trials: int,
    master_seed: int,
    workers: int,
    stream: int,
) -> SurvivalCurve:
    if dist.is_lattice:
        return dp_survival_prob(cone, x, dist, horizons)
    return estimate_survival(cone, x, dist, horizons, trials, master_seed, workers, stream)


def near_boundary_profile(
    cone: HarmonicCone,
    dist: IncrementDistribution,
    xs: Sequence[npt.ArrayLike],
    horizons: Sequence[int],
    trials: int = 100_000,
    master_seed: int = 0,
    workers: int = 1,
) -> dict[int, float]:
    """sup over xs of sqrt(n) P(tau_x > n) / delta(x + x0), for each horizon."""
    horizons = sorted(int(n) for n in horizons)
    sups = dict.fromkeys(horizons, 0.0)
    for stream, x in enumerate(xs):
        point = np.asarray(x, dtype=np.float64)
        delta = float(cone.distances(point + cone.x0))
        curve = _survival_curve(
            cone, dist, point, horizons, trials, master_seed, workers, stream
        )
        for n, estimate in zip(curve.horizons, curve.estimates, strict=True):
            sups[n] = max(sups[n], math.sqrt(n) * estimate / delta)
    logger.info(
        f"Near-boundary bound on {cone.label}: "
        + ", ".join(f"n={n}: {s:.4g}" for n, s in sups.items())
    )
    return sups


def near_boundary_bound(
    cone: HarmonicCone,
    dist: IncrementDistribution,
    xs: Sequence[npt.ArrayLike],
    n: int,
    trials: int = 100_000,
    master_seed: int = 0,
    workers: int = 1,
) -> float:
    """sup over xs of sqrt(n) P(tau_x > n) / delta(x + x0); DP for lattice laws, else MC."""
    return near_boundary_profile(cone, dist, xs, [n], trials, master_seed, workers)[n]


def relative_drift(values: Mapping[int, float] | Sequence[float]) -> float:
    """(max - min) / max of a sequence of positive values."""
    seq = list(values.values()) if isinstance(values, Mapping) else list(values)
    top = max(seq)
    return (top - min(seq)) / top if top > 0 else math.inf


def global_tail_bound(cone: HarmonicCone, curve: SurvivalCurve) -> dict[int, float]:
    """n^(p/2) P(tau_x > n) / h(x + R x0) at every positive horizon of the curve."""
    shifted = float(cone.h(cone.shifted(np.asarray(curve.start))))
    half_p = cone.degree_p / 2.0
    return {
        n: n**half_p * p / shifted
        for n, p in zip(curve.horizons, curve.estimates, strict=True)
        if n > 0
    }


# -------------------------------------------------------------------- moment check


@dataclass(frozen=True, slots=True)
class TruncatedHGrowth:
    """Monte Carlo E[h(x + S(n)); tau_x > n] over horizons, with its log-log slope."""

    horizons: tuple[int, ...]
    values: tuple[float, ...]
    std_errors: tuple[float, ...]
    slope: float


def truncated_h_growth(
    cone: HarmonicCone,
    dist: IncrementDistribution,
    x: npt.ArrayLike,
    horizons: Sequence[int],
    trials: int = 100_000,
    master_seed: int = 0,
    workers: int = 1,
) -> TruncatedHGrowth:
    """
    Growth of the truncated expectation of h, reported for the moment-optimality check.

    A bounded sequence (slope near 0) is what a finite V needs; heavy-tailed laws
    with too few moments show a positive slope. The slope is NaN if a value is not
    positive.
    """
    horizons = [int(n) for n in horizons]
    values, errors = [], []
    for n in horizons:
        value, error = estimate_truncated_h(cone, x, dist, n, trials, master_seed, workers)
        values.append(value)
        errors.append(error)

    slope = math.nan
    if len(horizons) >= 2 and all(v > 0 for v in values) and all(n > 0 for n in horizons):
        slope = float(np.polyfit(np.log(horizons), np.log(values), 1)[0])
    logger.info(f"Truncated h growth on {cone.label} under {dist.label}: slope {slope:.4g}")
    return TruncatedHGrowth(tuple(horizons), tuple(values), tuple(errors), slope)
