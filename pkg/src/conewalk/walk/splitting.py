"""Fixed-effort multilevel splitting over time levels.

Between consecutive levels every particle walks on with killing. The fraction that
survives estimates the conditional survival probability of that stage, and the
survivors are resampled (multinomially, with replacement) back to the full
budget. The product of the stage fractions is an unbiased estimate of
P(tau_x > level); its relative variance is approximated stage-wise by
sum_i (1 - p_i) / (N p_i).
"""

import logging
import math
from collections.abc import Sequence

import numpy as np
import numpy.typing as npt

from ..algebra import HarmonicCone
from ..exceptions import InvalidBudgetError
from ..increments import IncrementDistribution, rng_stream
from ..models.enums import SurvivalMethod
from .records import SurvivalCurve
from .simulator import Walker, check_horizons

logger = logging.getLogger(__name__)

MIN_PARTICLES = 100


def splitting_levels(horizons: Sequence[int]) -> list[int]:
    """Powers of two up to the largest horizon, merged with the horizons themselves."""
    top = max(horizons)
    powers = {2**k for k in range(int(math.log2(top)) + 1)} if top >= 1 else set()
    return sorted((powers | set(horizons)) - {0})


def estimate_survival_splitting(
    cone: HarmonicCone,
    x: npt.ArrayLike,
    dist: IncrementDistribution,
    horizons: Sequence[int],
    particles: int,
    master_seed: int,
    stream: int = 0,
) -> SurvivalCurve:
    """
    Splitting estimate of P(tau_x > n) for each horizon.

    If every particle dies at some level the estimate is 0 from there on and the
    curve's `extinct_from` records that level.

    Raises:
        InvalidBudgetError: if particles < 100
        MissingHorizonError: if horizons is empty or not strictly increasing
    """
    if particles < MIN_PARTICLES:
        raise InvalidBudgetError("particles", particles, MIN_PARTICLES)

    horizons = check_horizons(horizons)
    walker = Walker(cone, x, dist)
    levels = splitting_levels(horizons)

    displacement = walker.zeros(particles)
    estimate = 1.0
    rel_var = 0.0
    values: dict[int, tuple[float, float]] = {0: (1.0, 0.0)}
    extinct_from: int | None = None
    previous = 0

    for i, level in enumerate(levels):
        rng = rng_stream(master_seed, stream, i)
        _, alive = walker.advance(displacement, previous, level - previous, rng)
        survivors = int(np.count_nonzero(alive))
        if survivors == 0:
            extinct_from = level
            logger.warning(
                f"Splitting extinct at level {level} on {cone.label} with {particles} particles"
            )
            break

        p = survivors / particles
        estimate *= p
        rel_var += (1.0 - p) / (particles * p)
        values[level] = (estimate, estimate * math.sqrt(rel_var))
        logger.debug(f"Level {level}: stage fraction {p:.4f}, estimate {estimate:.6g}")

        keep = np.flatnonzero(alive)
        displacement = displacement[keep[rng.integers(0, survivors, size=particles)]]
        previous = level

    estimates, errors = [], []
    for n in horizons:
        if n in values:
            p, se = values[n]
        else:
            p, se = 0.0, 0.0
        estimates.append(p)
        errors.append(se)

    logger.info(
        f"Splitting survival on {cone.label}: {len(levels)} levels, {particles} particles, "
        f"P(tau > {horizons[-1]}) = {estimates[-1]:.6g}"
    )
    return SurvivalCurve(
        start=tuple(walker.origin),
        horizons=tuple(horizons),
        estimates=tuple(estimates),
        std_errors=tuple(errors),
        method=SurvivalMethod.SPLITTING,
        trials=particles,
        cone_label=cone.label,
        seed=master_seed,
        extinct_from=extinct_from,
    )
