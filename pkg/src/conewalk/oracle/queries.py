"""Exact survival probabilities, truncated expectations and conditioned laws from the DP."""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import sympy

from ..algebra import HarmonicCone
from ..exceptions import ZeroSurvivalMassError
from ..increments import IncrementDistribution
from ..models.enums import SurvivalMethod
from ..utils import canonical, to_exact
from ..walk import SurvivalCurve
from .lattice import LatticeDP, LatticeMeasure

logger = logging.getLogger(__name__)


def dp_survival_measure(
    cone: HarmonicCone,
    x: npt.ArrayLike,
    dist: IncrementDistribution,
    n: int,
    exact: bool = False,
    reduce: bool | None = None,
) -> LatticeMeasure:
    """
    mu_n(y) = P(x + S(n) = y, tau_x > n).

    Raises:
        NonLatticeDistributionError: for laws without lattice metadata
        OutsideConeError: if x is not strictly inside the cone
        BudgetExceededError: exact mode beyond d = 2 or n = 64
    """
    return LatticeDP(cone, x, dist, exact=exact, reduce=reduce).run(n)


def dp_survival_prob(
    cone: HarmonicCone,
    x: npt.ArrayLike,
    dist: IncrementDistribution,
    horizons: Sequence[int],
) -> SurvivalCurve:
    """Totals of the DP measure at each horizon, from one forward pass."""
    dp = LatticeDP(cone, x, dist)
    wanted = set(int(n) for n in horizons)
    totals: dict[int, float] = {0: 1.0}
    for result in dp.iterate(max(wanted)):
        if dp.n in wanted:
            totals[dp.n] = result.measure.total

    # float summation can nudge a total up by an ulp; the event is monotone
    estimates = np.minimum.accumulate([totals[int(n)] for n in horizons])
    logger.info(
        f"DP survival on {cone.label} from {tuple(dp.geometry.origin)}: "
        f"P(tau > {horizons[-1]}) = {estimates[-1]:.6g}"
    )
    return SurvivalCurve(
        start=tuple(dp.geometry.origin),
        horizons=tuple(int(n) for n in horizons),
        estimates=tuple(float(p) for p in estimates),
        std_errors=(0.0,) * len(horizons),
        method=SurvivalMethod.DP_EXACT,
        trials=0,
        cone_label=cone.label,
    )


def dp_truncated_h(
    cone: HarmonicCone,
    x: npt.ArrayLike,
    dist: IncrementDistribution,
    n: int,
    exact: bool = False,
) -> float | sympy.Expr:
    """E[h(x + S(n)); tau_x > n]; an exact sympy number in exact mode."""
    if exact:
        measure = dp_survival_measure(cone, x, dist, n, exact=True)
        return exact_expectation(cone, dist, measure)
    return dp_survival_measure(cone, x, dist, n).expectation(cone.h)


def dp_truncated_h_sequence(
    cone: HarmonicCone, x: npt.ArrayLike, dist: IncrementDistribution, n: int
) -> npt.NDArray[np.float64]:
    """E[h(x + S(k)); tau_x > k] for k = 0..n from a single pass."""
    dp = LatticeDP(cone, x, dist)
    values = [dp.measure().expectation(cone.h)]
    values += [result.measure.expectation(cone.h) for result in dp.iterate(n)]
    return np.asarray(values)


def dp_exit_h(
    cone: HarmonicCone, x: npt.ArrayLike, dist: IncrementDistribution, n: int
) -> float:
    """sum_{k<=n} E[h(x + S(k)); tau_x = k], the h-mass carried out of the cone by time n.

    For symmetric laws with h free-harmonic, dp_truncated_h(n) + dp_exit_h(n) = h(x).
    """
    dp = LatticeDP(cone, x, dist)
    return math.fsum(result.exit_expectation(cone.h) for result in dp.iterate(n))


def exact_expectation(
    cone: HarmonicCone, dist: IncrementDistribution, measure: LatticeMeasure
) -> sympy.Expr:
    """sum_y h(y) mu(y) in exact arithmetic for an exact-mode measure."""
    if measure.exact_masses is None:
        raise ValueError("exact_expectation needs a measure built with exact=True")
    lattice, _ = dist.require_lattice("exact expectation")
    x = [to_exact(c) for c in measure.origin]
    drift = measure.step_index * lattice.offset
    total = sympy.Integer(0)
    for state, mass in measure.exact_masses.items():
        point = [xc + drift + lattice.mesh * k for xc, k in zip(x, state, strict=True)]
        weight = sympy.Rational(mass.numerator, mass.denominator)
        total += weight * cone.h_expanded.evaluate_exact(point)
    return canonical(total)


@dataclass(frozen=True, slots=True)
class EndpointLaw:
    """
    Law of (x + S(n)) / scale given tau_x > n.

    `coordinates` are expressed in the orthonormal `basis` (rows): the identity for
    ordinary cones, and a basis of the complement of (1, ..., 1) for
    translation-invariant ones, where only the projection is meaningful.
    """

    n: int
    scale: float
    coordinates: npt.NDArray[np.float64]
    weights: npt.NDArray[np.float64]
    basis: npt.NDArray[np.float64]

    @property
    def dimension(self) -> int:
        return self.basis.shape[0]

    @property
    def projected(self) -> bool:
        return self.basis.shape[0] < self.basis.shape[1]

    def mean(self) -> npt.NDArray[np.float64]:
        return self.weights @ self.coordinates


def complement_basis(d: int) -> npt.NDArray[np.float64]:
    """Orthonormal basis (rows) of the hyperplane orthogonal to (1, ..., 1)."""
    ones = np.ones((d, 1)) / math.sqrt(d)
    q, _ = np.linalg.qr(np.hstack([ones, np.eye(d)[:, : d - 1]]))
    basis = q[:, 1:].T
    return basis


def endpoint_law_from_measure(
    cone: HarmonicCone, measure: LatticeMeasure, scale: float | None = None
) -> EndpointLaw:
    """Normalize a survival measure and rescale its support by sqrt(n)."""
    if measure.total <= 0:
        raise ZeroSurvivalMassError(measure.step_index)
    n = measure.step_index
    scale = math.sqrt(n) if scale is None else float(scale)
    if scale <= 0:
        raise ValueError("scale must be positive (use n >= 1)")
    points = measure.points() / scale
    weights = measure.weights() / np.sum(measure.weights())
    d = cone.dimension
    basis = complement_basis(d) if cone.is_translation_invariant else np.eye(d)
    return EndpointLaw(n, scale, points @ basis.T, weights, basis)


def dp_conditional_endpoint(
    cone: HarmonicCone,
    x: npt.ArrayLike,
    dist: IncrementDistribution,
    n: int,
    scale: float | None = None,
) -> EndpointLaw:
    """
    mu_n normalized by its total, support divided by scale (sqrt(n) by default).

    Raises:
        ZeroSurvivalMassError: if P(tau_x > n) = 0
    """
    return endpoint_law_from_measure(cone, dp_survival_measure(cone, x, dist, n), scale)


def sample_conditioned_paths(
    cone: HarmonicCone,
    x: npt.ArrayLike,
    dist: IncrementDistribution,
    n: int,
    count: int,
    rng: np.random.Generator,
    dp: LatticeDP | None = None,
) -> npt.NDArray[np.float64]:
    """
    Paths (x + S(k))_{k<=n} drawn exactly from the law conditioned on tau_x > n.

    The endpoint is drawn from the normalized mu_n, then each earlier state with
    probability proportional to mu_{k-1}(y') q(y' -> y). Joint steps are drawn in
    full coordinates, so paths are exact even when the DP runs on reduced states.
    Pass a `dp` built with keep_history=True to reuse one forward pass.

    Returns:
        Array of shape (count, n + 1, d)

    Raises:
        ZeroSurvivalMassError: if P(tau_x > n) = 0
    """
    if dp is None:
        dp = LatticeDP(cone, x, dist, keep_history=True)
    if len(dp.history) <= n:
        if not dp.keep_history:
            raise ValueError("the DP must keep its history to sample paths")
        dp.run(n)
    history = dp.history

    final = history[n]
    if final.total <= 0:
        raise ZeroSurvivalMassError(n)

    states = final.states()
    weights = final.weights()
    cdf = np.cumsum(weights)
    picks = np.searchsorted(cdf, rng.random(count) * cdf[-1], side="right")
    state = states[np.minimum(picks, len(states) - 1)]

    joint_steps = dp.joint.steps
    state_steps = dp.reduced_steps()
    probs = dp.joint.probabilities
    drawn = np.zeros((count, n, cone.dimension), dtype=np.int64)

    for k in range(n, 0, -1):
        previous = state[:, None, :] - state_steps[None, :, :]
        w = history[k - 1].lookup(previous) * probs[None, :]
        totals = w.sum(axis=1)
        if np.any(totals <= 0):
            raise ZeroSurvivalMassError(k - 1)
        cdf = np.cumsum(w, axis=1)
        u = rng.random(count) * totals
        choice = np.minimum((cdf < u[:, None]).sum(axis=1), len(probs) - 1)
        drawn[:, k - 1] = joint_steps[choice]
        state = previous[np.arange(count), choice]

    lattice = dist.lattice
    assert lattice is not None
    displacement = np.concatenate(
        [np.zeros((count, 1, cone.dimension), dtype=np.int64), np.cumsum(drawn, axis=1)], axis=1
    )
    steps = np.arange(n + 1, dtype=np.float64)[None, :, None]
    origin = np.asarray(x, dtype=np.float64)
    return origin + steps * lattice.offset_float + lattice.mesh_float * displacement


def sample_conditioned_path(
    cone: HarmonicCone,
    x: npt.ArrayLike,
    dist: IncrementDistribution,
    n: int,
    rng: np.random.Generator,
) -> npt.NDArray[np.float64]:
    """One conditioned path of n + 1 points."""
    return sample_conditioned_paths(cone, x, dist, n, 1, rng)[0]
