"""Monte Carlo simulation of x + S(n) killed at the boundary of a cone.

Trajectories run in vectorised batches of BATCH_SIZE. Batch b of stream s always
draws from rng_stream(seed, s, b), and batches are merged in batch order, so the
output does not depend on how many worker threads ran them. Each trajectory's
exit time is recorded once and reused for every horizon, which makes survival
curves monotone by construction.

Lattice laws accumulate integer step counts and rebuild positions as
x + n * offset + mesh * K, so boundary hits are detected exactly as in the DP.
"""

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from ..algebra import HarmonicCone
from ..exceptions import InvalidBudgetError, MissingHorizonError, OutsideConeError
from ..increments import IncrementDistribution, rng_stream, sample_array, sample_steps
from ..models.enums import SurvivalMethod
from .records import ExitRecord, SurvivalCurve

logger = logging.getLogger(__name__)

BATCH_SIZE = 4096


class Walker:
    """Step drawing and position reconstruction for one start and one law."""

    def __init__(self, cone: HarmonicCone, x: npt.ArrayLike, dist: IncrementDistribution):
        self.cone = cone
        self.dist = dist
        self.origin = np.asarray(x, dtype=np.float64)
        if self.origin.shape != (cone.dimension,):
            raise ValueError(
                f"Expected a start of dimension {cone.dimension}, got {self.origin.shape}"
            )
        if not cone.inside(self.origin):
            raise OutsideConeError(self.origin, cone.label)
        self.lattice = dist.lattice if dist.is_lattice else None

    @property
    def dimension(self) -> int:
        return self.cone.dimension

    def zeros(self, count: int) -> npt.NDArray:
        dtype = np.int64 if self.lattice is not None else np.float64
        return np.zeros((count, self.dimension), dtype=dtype)

    def draw(self, rng: np.random.Generator, count: int) -> npt.NDArray:
        shape = (count, self.dimension)
        if self.lattice is not None:
            return sample_steps(self.dist, rng, shape)
        return sample_array(self.dist, rng, shape)

    def positions(self, displacement: npt.NDArray, n: int | npt.NDArray) -> npt.NDArray[np.float64]:
        if self.lattice is None:
            return self.origin + displacement
        n = np.asarray(n, dtype=np.float64)
        if n.ndim == 1:
            n = n[:, None]
        return self.origin + n * self.lattice.offset_float + self.lattice.mesh_float * displacement

    def advance(
        self,
        displacement: npt.NDArray,
        start_step: int,
        steps: int,
        rng: np.random.Generator,
    ) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.bool_]]:
        """
        Run `steps` more steps in place; return (exit step or final step, alive mask).

        Every step draws increments for all rows, dead ones included, so row i
        consumes the same slice of the stream whatever the other rows do. Paths from
        different starts on one stream are therefore coupled row by row, which
        `translation_monotonicity` relies on, and a batch result does not depend
        on which rows exit first. The loop ends early once every row has exited.
        """
        count = len(displacement)
        exit_time = np.full(count, start_step + steps, dtype=np.int64)
        alive = np.ones(count, dtype=bool)
        for n in range(start_step + 1, start_step + steps + 1):
            idx = np.flatnonzero(alive)
            if idx.size == 0:
                break
            draws = self.draw(rng, count)
            displacement[idx] += draws[idx]
            out = ~self.cone.inside(self.positions(displacement[idx], n))
            exited = idx[out]
            exit_time[exited] = n
            alive[exited] = False
        return exit_time, alive


@dataclass(frozen=True, slots=True)
class BatchResult:
    exit_times: npt.NDArray[np.int64]
    survived: npt.NDArray[np.bool_]
    final_positions: npt.NDArray[np.float64]


def _simulate_batch(
    walker: Walker, horizon: int, size: int, rng: np.random.Generator
) -> BatchResult:
    displacement = walker.zeros(size)
    exit_times, survived = walker.advance(displacement, 0, horizon, rng)
    return BatchResult(exit_times, survived, walker.positions(displacement, exit_times))


def _batch_sizes(trials: int) -> list[int]:
    full, rest = divmod(trials, BATCH_SIZE)
    return [BATCH_SIZE] * full + ([rest] if rest else [])


def _run_batches(
    job: Callable[[int, int], BatchResult], trials: int, workers: int
) -> list[BatchResult]:
    sizes = _batch_sizes(trials)
    if workers <= 1 or len(sizes) == 1:
        return [job(b, size) for b, size in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, range(len(sizes)), sizes))


def _check_budget(trials: int, workers: int) -> None:
    if trials < 1:
        raise InvalidBudgetError("trials", trials, 1)
    if workers < 1:
        raise InvalidBudgetError("workers", workers, 1)


def check_horizons(horizons: Sequence[int]) -> list[int]:
    """Horizons as ints; they must be non-empty, non-negative and strictly increasing."""
    values = [int(n) for n in horizons]
    if not values:
        raise MissingHorizonError("no horizons given")
    if values[0] < 0 or any(b <= a for a, b in zip(values, values[1:], strict=False)):
        raise MissingHorizonError(f"need non-negative, strictly increasing horizons, got {values}")
    return values


# --------------------------------------------------------------------------- operations


def simulate_exit(
    cone: HarmonicCone,
    x: npt.ArrayLike,
    dist: IncrementDistribution,
    horizon: int,
    rng: np.random.Generator,
) -> ExitRecord:
    """
    Walk until the first n >= 1 with some form value <= 0, or until the horizon.

    Raises:
        OutsideConeError: if x is not strictly inside the cone
        InvalidBudgetError: if horizon < 1
    """
    if horizon < 1:
        raise InvalidBudgetError("horizon", horizon, 1)
    result = _simulate_batch(Walker(cone, x, dist), horizon, 1, rng)
    return ExitRecord(
        exit_time=int(result.exit_times[0]),
        survived=bool(result.survived[0]),
        final_position=tuple(float(c) for c in result.final_positions[0]),
    )


def estimate_survival(
    cone: HarmonicCone,
    x: npt.ArrayLike,
    dist: IncrementDistribution,
    horizons: Sequence[int],
    trials: int,
    master_seed: int,
    workers: int = 1,
    stream: int = 0,
) -> SurvivalCurve:
    """
    Plain Monte Carlo survival curve with binomial standard errors.

    `stream` separates the random numbers of different starts in one run.
    """
    _check_budget(trials, workers)
    horizons = check_horizons(horizons)
    walker = Walker(cone, x, dist)
    horizon = max(horizons[-1], 1)

    def job(b: int, size: int) -> BatchResult:
        return _simulate_batch(walker, horizon, size, rng_stream(master_seed, stream, b))

    results = _run_batches(job, trials, workers)
    exit_times = np.concatenate([r.exit_times for r in results])
    survived = np.concatenate([r.survived for r in results])

    estimates, errors = [], []
    for n in horizons:
        p = float(np.count_nonzero(survived | (exit_times > n))) / trials
        estimates.append(p)
        errors.append(math.sqrt(p * (1.0 - p) / trials))

    logger.info(
        f"MC survival on {cone.label} from {tuple(walker.origin)}: {trials} trials, "
        f"{len(results)} batches, P(tau > {horizons[-1]}) = {estimates[-1]:.6g}"
    )
    return SurvivalCurve(
        start=tuple(walker.origin),
        horizons=tuple(horizons),
        estimates=tuple(estimates),
        std_errors=tuple(errors),
        method=SurvivalMethod.MC,
        trials=trials,
        cone_label=cone.label,
        seed=master_seed,
    )


def estimate_truncated_h(
    cone: HarmonicCone,
    x: npt.ArrayLike,
    dist: IncrementDistribution,
    n: int,
    trials: int,
    master_seed: int,
    workers: int = 1,
    stream: int = 0,
) -> tuple[float, float]:
    """Sample mean of h(x + S(n)) 1{tau_x > n} with its standard error."""
    _check_budget(trials, workers)
    walker = Walker(cone, x, dist)
    if n == 0:
        return float(cone.h(walker.origin)), 0.0

    def job(b: int, size: int) -> BatchResult:
        return _simulate_batch(walker, n, size, rng_stream(master_seed, stream, b))

    results = _run_batches(job, trials, workers)
    values = np.concatenate(
        [np.where(r.survived, cone.h(r.final_positions), 0.0) for r in results]
    )
    return _mean_and_error(values)


def estimate_free_h(
    cone: HarmonicCone,
    x: npt.ArrayLike,
    dist: IncrementDistribution,
    n: int,
    trials: int,
    master_seed: int,
    workers: int = 1,
    stream: int = 0,
) -> tuple[float, float]:
    """Sample mean of h(x + S(n)) with no killing at all.

    For the Vandermonde this is a martingale under any mean-zero law, so the mean
    stays at h(x).
    """
    _check_budget(trials, workers)
    origin = np.asarray(x, dtype=np.float64)
    if n == 0:
        return float(cone.h(origin)), 0.0

    def job(b: int, size: int) -> BatchResult:
        rng = rng_stream(master_seed, stream, b)
        total = np.zeros((size, cone.dimension))
        for _ in range(n):
            total += sample_array(dist, rng, (size, cone.dimension))
        final = origin + total
        return BatchResult(np.full(size, n), np.ones(size, dtype=bool), final)

    results = _run_batches(job, trials, workers)
    values = np.concatenate([cone.h(r.final_positions) for r in results])
    return _mean_and_error(values)


def translation_monotonicity(
    cone: HarmonicCone,
    x: npt.ArrayLike,
    dist: IncrementDistribution,
    n: int,
    shifts: Sequence[float],
    trials: int,
    master_seed: int,
    workers: int = 1,
) -> list[tuple[float, float, float]]:
    """
    (t, estimate, std_error) of P(tau_{x + t x0} > n) for each shift t.

    Every shift reuses the same random numbers. Since x0 + K is inside K, a path
    that survives from x also survives from x + t x0, so the estimates are
    non-decreasing in t sample by sample.
    """
    origin = np.asarray(x, dtype=np.float64)
    out = []
    for t in shifts:
        curve = estimate_survival(
            cone, origin + float(t) * cone.x0, dist, [n], trials, master_seed, workers
        )
        out.append((float(t), curve.estimates[0], curve.std_errors[0]))
    return out


def _mean_and_error(values: npt.NDArray[np.float64]) -> tuple[float, float]:
    mean = float(np.mean(values))
    if len(values) < 2:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / math.sqrt(len(values)))
