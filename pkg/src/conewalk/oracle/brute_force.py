"""Exhaustive enumeration of step sequences for tiny instances.

Paths are expanded level by level without merging equal endpoints. Path weights are
integer numerators over the common denominator L^(d k), with L the lcm of the step
probability denominators; they live in int64 while that fits and in Python ints
otherwise. Membership reuses the DP's integer predicate, so the two engines agree
bit for bit.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import numpy.typing as npt
import sympy

from ..algebra import HarmonicCone
from ..exceptions import BudgetExceededError, ZeroSurvivalMassError
from ..increments import IncrementDistribution, joint_support
from ..utils import canonical, to_exact
from .lattice import LatticeGeometry

logger = logging.getLogger(__name__)

PATH_BUDGET = 10**8
_INT64_SAFE = 2**62


@dataclass(frozen=True, slots=True)
class BruteForceResult:
    """Exact survival probability, truncated h and surviving endpoint masses."""

    n: int
    survival: Fraction
    truncated_h: sympy.Expr
    measure: dict[tuple[int, ...], Fraction]
    paths: int

    @property
    def endpoint_law(self) -> dict[tuple[int, ...], Fraction]:
        """The surviving masses normalized to a probability law."""
        if self.survival == 0:
            raise ZeroSurvivalMassError(self.n)
        return {k: m / self.survival for k, m in self.measure.items()}


def brute_force_enumerate(
    cone: HarmonicCone, x: npt.ArrayLike, dist: IncrementDistribution, n: int
) -> BruteForceResult:
    """
    Enumerate every sequence of n joint steps and keep the ones that stay inside.

    Endpoint masses are keyed by full integer displacement K, the walk sitting at
    x + n * offset + mesh * K.

    Raises:
        NonLatticeDistributionError: for laws without lattice metadata
        BudgetExceededError: if (m^d)^n exceeds 10^8 step sequences
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    lattice, support = dist.require_lattice("brute-force enumeration")
    joint = joint_support(dist, cone.dimension)
    total_paths = len(joint) ** n
    if total_paths > PATH_BUDGET:
        raise BudgetExceededError("brute-force step sequences", total_paths, PATH_BUDGET)

    geometry = LatticeGeometry(cone, x, dist, reduced=False)
    base = math.lcm(*(p.denominator for p in support.probabilities))
    step_denominator = base**cone.dimension
    step_numerators = [int(p * step_denominator) for p in joint.exact]
    denominator = step_denominator**n
    dtype = np.int64 if denominator < _INT64_SAFE else object

    states = np.zeros((1, cone.dimension), dtype=np.int64)
    numerators = np.ones(1, dtype=dtype)
    weights = np.array(step_numerators, dtype=dtype)

    for k in range(1, n + 1):
        states = (states[:, None, :] + joint.steps[None, :, :]).reshape(-1, cone.dimension)
        numerators = (numerators[:, None] * weights[None, :]).reshape(-1)
        keep = geometry.inside_states(states, k)
        states, numerators = states[keep], numerators[keep]
        logger.debug(f"Brute force level {k}: {len(states)} surviving sequences")
        if len(states) == 0:
            break

    measure: dict[tuple[int, ...], Fraction] = {}
    for state, numerator in zip(states, numerators, strict=True):
        key = tuple(int(v) for v in state)
        measure[key] = measure.get(key, Fraction(0)) + Fraction(int(numerator), denominator)
    measure = dict(sorted(measure.items()))

    survival = sum(measure.values(), Fraction(0))
    origin = [to_exact(float(c)) for c in geometry.origin]
    drift = n * lattice.offset
    truncated_h = sympy.Integer(0)
    for key, mass in measure.items():
        point = [xc + drift + lattice.mesh * kc for xc, kc in zip(origin, key, strict=True)]
        weight = sympy.Rational(mass.numerator, mass.denominator)
        truncated_h += weight * cone.h_expanded.evaluate_exact(point)

    logger.info(
        f"Brute force on {cone.label}, n={n}: {total_paths} sequences, survival {survival}"
    )
    return BruteForceResult(
        n=n,
        survival=survival,
        truncated_h=canonical(truncated_h),
        measure=measure,
        paths=total_paths,
    )
