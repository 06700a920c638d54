"""Estimators of the harmonic function V of the killed walk.

Two routes lead to V(x):

- truncated limit: V(x) = lim_n E[h(x + S(n)); tau_x > n], followed along a
  doubling schedule by the DP (lattice laws) or Monte Carlo (otherwise);
- shifted representation: with Y(k) = x + R x0 + S(k) and the killed walk's exit
  time tau = tau_x,

      V(x) = h(Y(0)) - sum_{k>=1} E[h+(Y(k)); tau = k] + sum_{k>=0} E[f(Y(k)); tau > k]

  where h+ = h 1_K. The partial sum up to n equals E[h+(Y(n)); tau > n] exactly,
  which `shifted_truncated_h` computes directly.

Both series have power-law terms, so the part beyond the last computed step is
extrapolated (see `series.extrapolate_tail`) and reported as `tail_estimate`.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from ..algebra import HarmonicCone, with_shift
from ..exceptions import HarmonicValueUnavailableError, OutsideConeError
from ..increments import IncrementDistribution, joint_support, rng_stream, sample_array
from ..models.enums import HarmonicMethod
from ..oracle import LatticeDP, dp_survival_measure
from ..walk import estimate_truncated_h
from .defect import DefectModel, support_combinations
from .series import extrapolate_tail

logger = logging.getLogger(__name__)

DP_REL_TOL = 1e-6
MC_REL_TOL = 1e-3
DEFAULT_CAP = 2**14
# relative size of a term below which the shifted series counts as summed
TERM_FLOOR = 1e-12
# summands of both V series decay like k^-SERIES_DECAY for every degree p: an exit
# carries |grad h| ~ n^((p-1)/2) times the overshoot at rate P(tau = n) ~ n^-(p/2+1),
# and drift terms E[G(S(n)); tau > n] decay no slower because deg G <= p - 3
SERIES_DECAY = 1.5

VLookup = Callable[[npt.NDArray[np.float64]], npt.NDArray[np.float64]]


@dataclass(frozen=True, slots=True)
class HarmonicEstimate:
    """V(x) with the history of the schedule that produced it."""

    x: tuple[float, ...]
    value: float
    std_error: float
    method: HarmonicMethod
    truncation_n: int
    convergence_history: tuple[tuple[int, float], ...]
    converged: bool
    tail_estimate: float = 0.0
    shift_R: float | None = None

    def to_row(self, cone: HarmonicCone) -> dict[str, object]:
        """Row for the V-table CSV."""
        h = float(cone.h(np.asarray(self.x)))
        return {
            "x": self.x,
            "value": self.value,
            "std_error": self.std_error,
            "method": self.method.value,
            "truncation_n": self.truncation_n,
            "converged": self.converged,
            "h": h,
            "ratio_to_h": self.value / h if h != 0 else math.nan,
        }


def _schedule(n0: int, cap: int) -> list[int]:
    points = []
    n = max(1, n0)
    while n < cap:
        points.append(n)
        n *= 2
    points.append(cap)
    return points


def _finish(
    cone: HarmonicCone,
    x: npt.NDArray[np.float64],
    method: HarmonicMethod,
    history: list[tuple[int, float]],
    converged: bool,
    std_error: float = 0.0,
    tail: float = 0.0,
    shift_R: float | None = None,
) -> HarmonicEstimate:
    n, value = history[-1]
    if not converged:
        logger.warning(
            f"V({tuple(float(c) for c in x)}) on {cone.label} unconverged at n={n} "
            f"({method.value}): last value {value:.10g}"
        )
    elif value <= 0:
        logger.warning(f"Converged V estimate at {tuple(x)} is not positive: {value!r}")
    return HarmonicEstimate(
        x=tuple(float(c) for c in x),
        value=value,
        std_error=std_error,
        method=method,
        truncation_n=n,
        convergence_history=tuple(history),
        converged=converged,
        tail_estimate=tail,
        shift_R=shift_R,
    )


def interior_point(cone: HarmonicCone, x: npt.ArrayLike) -> npt.NDArray[np.float64]:
    point = np.asarray(x, dtype=np.float64)
    if point.shape != (cone.dimension,) or not cone.inside(point):
        raise OutsideConeError(point, cone.label)
    return point


# ---------------------------------------------------------------------- truncated limit


def estimate_V(
    cone: HarmonicCone,
    dist: IncrementDistribution,
    x: npt.ArrayLike,
    n0: int = 16,
    cap: int = DEFAULT_CAP,
    rel_tol: float | None = None,
    trials: int = 20_000,
    master_seed: int = 0,
    workers: int = 1,
) -> HarmonicEstimate:
    """
    Truncated-limit estimate of V(x) on the schedule n0, 2 n0, ... up to cap.

    Lattice laws use one DP pass and extrapolate the increments of the sequence,
    which decay like k^-SERIES_DECAY. Other laws use Monte Carlo at each horizon
    with the same seed, so successive horizons share their paths; there, two
    successive values that differ by less than two standard errors also count as
    converged. An estimate that never converges is returned with converged=False.
    """
    point = interior_point(cone, x)
    if dist.is_lattice:
        return _estimate_V_dp(cone, dist, point, n0, cap, rel_tol or DP_REL_TOL)
    return _estimate_V_mc(
        cone, dist, point, n0, cap, rel_tol or MC_REL_TOL, trials, master_seed, workers
    )


def _estimate_V_dp(
    cone: HarmonicCone,
    dist: IncrementDistribution,
    x: npt.NDArray[np.float64],
    n0: int,
    cap: int,
    rel_tol: float,
) -> HarmonicEstimate:
    dp = LatticeDP(cone, x, dist)
    values = [dp.measure().expectation(cone.h)]
    history: list[tuple[int, float]] = []
    tail = 0.0
    for checkpoint in _schedule(n0, cap):
        for result in dp.iterate(checkpoint):
            values.append(result.measure.expectation(cone.h))
        tail = extrapolate_tail(np.diff(values), SERIES_DECAY)
        estimate = values[-1] + tail
        if history and abs(estimate - history[-1][1]) <= rel_tol * abs(estimate):
            history.append((checkpoint, estimate))
            return _finish(cone, x, HarmonicMethod.TRUNCATED_LIMIT, history, True, tail=tail)
        history.append((checkpoint, estimate))
    return _finish(cone, x, HarmonicMethod.TRUNCATED_LIMIT, history, False, tail=tail)


def _estimate_V_mc(
    cone: HarmonicCone,
    dist: IncrementDistribution,
    x: npt.NDArray[np.float64],
    n0: int,
    cap: int,
    rel_tol: float,
    trials: int,
    master_seed: int,
    workers: int,
) -> HarmonicEstimate:
    history: list[tuple[int, float]] = []
    previous_error = 0.0
    error = 0.0
    for checkpoint in _schedule(n0, cap):
        value, error = estimate_truncated_h(cone, x, dist, checkpoint, trials, master_seed, workers)
        if history:
            gap = abs(value - history[-1][1])
            noise = 2.0 * math.hypot(error, previous_error)
            if gap <= max(rel_tol * abs(value), noise):
                history.append((checkpoint, value))
                return _finish(cone, x, HarmonicMethod.TRUNCATED_LIMIT, history, True, error)
        history.append((checkpoint, value))
        previous_error = error
    return _finish(cone, x, HarmonicMethod.TRUNCATED_LIMIT, history, False, error)


# ------------------------------------------------------------------ shifted representation


def _shift_vector(cone: HarmonicCone, R: float | None) -> tuple[float, npt.NDArray[np.float64]]:
    if R is not None:
        cone = with_shift(cone, R)
    return cone.shift_R, cone.shift_R * cone.x0


def shifted_truncated_h(
    cone: HarmonicCone,
    dist: IncrementDistribution,
    x: npt.ArrayLike,
    n: int,
    R: float | None = None,
) -> float:
    """E[h+(x + R x0 + S(n)); tau_x > n] from the DP."""
    _, shift = _shift_vector(cone, R)
    return dp_survival_measure(cone, x, dist, n).expectation(cone.positive_part, shift)


def corrected_V(
    cone: HarmonicCone,
    dist: IncrementDistribution,
    x: npt.ArrayLike,
    R: float | None = None,
    n0: int = 16,
    cap: int = DEFAULT_CAP,
    rel_tol: float | None = None,
) -> HarmonicEstimate:
    """
    V(x) through the shifted representation, for lattice laws.

    The series stops at the first checkpoint where the extrapolated value moved by
    less than rel_tol, or where the last two terms are below 1e-12 h(x + R x0).
    Reaching the cap first gives converged=False.

    Raises:
        NonLatticeDistributionError: for laws without lattice metadata
        ConeConstructionError: for an inadmissible R
    """
    point = interior_point(cone, x)
    dist.require_lattice("corrected representation of V")
    rel_tol = rel_tol or DP_REL_TOL
    shift_R, shift = _shift_vector(cone, R)
    model = DefectModel(cone, dist)
    dp = LatticeDP(cone, point, dist)

    start_value = float(cone.positive_part(point + shift))
    floor = TERM_FLOOR * start_value
    terms: list[float] = []
    history: list[tuple[int, float]] = []
    tail = 0.0

    for checkpoint in _schedule(n0, cap):
        while dp.n < checkpoint:
            occupation = dp.measure().expectation(model.f, shift)
            result = dp.step()
            terms.append(occupation - result.exit_expectation(cone.positive_part, shift))
        partial = start_value + math.fsum(terms)
        tail = extrapolate_tail(terms, SERIES_DECAY)
        estimate = partial + tail
        summed = len(terms) >= 2 and max(abs(terms[-1]), abs(terms[-2])) < floor
        settled = bool(history) and abs(estimate - history[-1][1]) <= rel_tol * abs(estimate)
        history.append((checkpoint, estimate))
        if summed or settled:
            return _finish(
                cone,
                point,
                HarmonicMethod.CORRECTED_REPRESENTATION,
                history,
                True,
                tail=tail,
                shift_R=shift_R,
            )
    return _finish(
        cone,
        point,
        HarmonicMethod.CORRECTED_REPRESENTATION,
        history,
        False,
        tail=tail,
        shift_R=shift_R,
    )


# ---------------------------------------------------------------------------- residual


def harmonicity_residual(
    cone: HarmonicCone,
    dist: IncrementDistribution,
    x: npt.ArrayLike,
    V: VLookup,
    trials: int = 20_000,
    master_seed: int = 0,
) -> float:
    """
    |E[V(x + X); x + X in K] - V(x)| / V(x).

    Finite laws enumerate every one-step neighbour; other laws average over
    `trials` draws from a fixed stream.

    Raises:
        HarmonicValueUnavailableError: if V is missing at x or a reachable point
    """
    point = interior_point(cone, x)
    center = float(np.asarray(V(point[None, :]))[0])
    if not center > 0:
        raise HarmonicValueUnavailableError(point)

    if dist.is_finite:
        values = np.asarray(dist.support.values_float)
        jumps = values[support_combinations(len(values), cone.dimension)]
        probs = joint_support(dist, cone.dimension).probabilities
    else:
        jumps = sample_array(dist, rng_stream(master_seed), (trials, cone.dimension))
        probs = np.full(trials, 1.0 / trials)

    neighbours = point + jumps
    inside = cone.inside(neighbours)
    v = np.zeros(len(neighbours))
    if np.any(inside):
        v[inside] = np.asarray(V(neighbours[inside]))
    return abs(float(v @ probs) - center) / center
