"""Paths of the walk conditioned to stay in the cone forever (Doob h-transform by V).

From y the walk proposes y' = y + X and accepts with probability
V(y') 1_K(y') / (M V(y)). For a finite law the default envelope is the exact
M(y) = max over the support of V(y + v) 1_K(y + v) / V(y), so a ratio above one
cannot occur; with a user-supplied M, a ratio above one aborts the run.
"""

import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from ..algebra import HarmonicCone
from ..exceptions import (
    BudgetExceededError,
    EnvelopeViolationError,
    HarmonicValueUnavailableError,
    InvalidDistributionError,
)
from ..increments import IncrementDistribution, joint_support, sample_array
from .defect import support_combinations
from .estimators import VLookup, interior_point

logger = logging.getLogger(__name__)

MAX_PROPOSALS_PER_STEP = 100_000


@dataclass(frozen=True, slots=True)
class HTransformPath:
    """Points y(0..n) and the proposal counts that produced them."""

    points: npt.NDArray[np.float64]
    proposals: int
    acceptances: int

    @property
    def acceptance_rate(self) -> float:
        return self.acceptances / self.proposals if self.proposals else 0.0


def sample_h_transform(
    cone: HarmonicCone,
    dist: IncrementDistribution,
    x: npt.ArrayLike,
    V: VLookup,
    n: int,
    rng: np.random.Generator,
    envelope: float | None = None,
) -> HTransformPath:
    """
    n steps of the h-transformed walk from x by rejection.

    Raises:
        InvalidDistributionError: no envelope given for a law without finite support
        EnvelopeViolationError: a proposal ratio exceeded one
        HarmonicValueUnavailableError: V not positive at a visited point
        BudgetExceededError: a step needed more than 100000 proposals
    """
    point = interior_point(cone, x)
    if envelope is None and not dist.is_finite:
        raise InvalidDistributionError(
            dist.label, "h-transform sampling needs an explicit envelope M for this law"
        )

    if dist.is_finite:
        values = np.asarray(dist.support.values_float)
        jumps = values[support_combinations(len(values), cone.dimension)]
        probs = joint_support(dist, cone.dimension).probabilities

    points = [point]
    proposals = 0
    acceptances = 0
    y = point
    for step in range(n):
        v_here = float(np.asarray(V(y[None, :]))[0])
        if not v_here > 0:
            raise HarmonicValueUnavailableError(y)

        if dist.is_finite:
            candidates = y + jumps
            inside = cone.inside(candidates)
            weights = np.zeros(len(candidates))
            weights[inside] = np.asarray(V(candidates[inside]))
            M = envelope if envelope is not None else float(weights.max()) / v_here
            if not M > 0:
                raise HarmonicValueUnavailableError(y)
        else:
            M = float(envelope)

        for _ in range(MAX_PROPOSALS_PER_STEP):
            proposals += 1
            if dist.is_finite:
                i = int(rng.choice(len(probs), p=probs))
                proposal, v_next = candidates[i], weights[i]
            else:
                proposal = y + sample_array(dist, rng, cone.dimension)
                v_next = 0.0
                if cone.inside(proposal):
                    v_next = float(np.asarray(V(proposal[None, :]))[0])
            ratio = v_next / (M * v_here)
            if ratio > 1.0 + 1e-12:
                raise EnvelopeViolationError(ratio, M, y)
            if rng.random() < ratio:
                acceptances += 1
                y = np.asarray(proposal, dtype=np.float64)
                break
        else:
            raise BudgetExceededError(
                f"h-transform proposals at step {step + 1}",
                MAX_PROPOSALS_PER_STEP + 1,
                MAX_PROPOSALS_PER_STEP,
            )
        points.append(y)

    logger.debug(
        f"h-transform path of {n} steps on {cone.label}: {acceptances}/{proposals} accepted"
    )
    return HTransformPath(np.vstack(points), proposals, acceptances)
