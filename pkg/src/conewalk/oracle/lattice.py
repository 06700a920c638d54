"""Forward dynamic programming for the killed survival measure on a lattice.

States are integer displacement vectors K (in mesh units): after n steps the walk
sits at x + n * offset * (1, ..., 1) + mesh * K. For translation-invariant cones
(type A) the state is reduced to K - K_1 (1, ..., 1) and stored without its first
coordinate, which drops one dimension; representative positions then take K_1 = 0.
Everything evaluated on a reduced measure (h, its positive part, the one-step
defect) is itself translation invariant, so the representative is enough.

The float engine keeps a dense array over a bounding box of states. One step is a
sequence of one-dimensional shift-add passes (the step law is a product law, so
the d-dimensional convolution factorizes), followed by killing outside the cone,
pruning of masses below 1e-300 and cropping to the non-zero box.

The exact engine keeps Fraction masses in a dict, never reduces or prunes, and is
capped at d <= 2 and n <= 64.
"""

import logging
import math
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import numpy.typing as npt

from ..algebra import HarmonicCone
from ..exceptions import BudgetExceededError, OutsideConeError
from ..increments import IncrementDistribution, JointSupport, joint_support
from ..utils import is_rational, to_exact, to_fraction

logger = logging.getLogger(__name__)

PRUNE_BELOW = 1e-300
EXACT_MAX_DIMENSION = 2
EXACT_MAX_STEPS = 64
MAX_INTEGER_DENOMINATOR = 2**40


class LatticeGeometry:
    """
    Membership and positions of lattice states for one cone, start and law.

    When the forms, the start, the mesh and the offset are all rational, membership
    is decided in exact integer arithmetic: each form value is scaled by a common
    denominator L to A_i + n B_i + sum_j C_ij K_j. Otherwise it falls back to
    float form values.
    """

    def __init__(
        self, cone: HarmonicCone, x: npt.ArrayLike, dist: IncrementDistribution, reduced: bool
    ):
        lattice, _ = dist.require_lattice("lattice DP")
        self.cone = cone
        self.origin = np.asarray(x, dtype=np.float64)
        if self.origin.shape != (cone.dimension,):
            raise ValueError(
                f"Expected a start of dimension {cone.dimension}, got {self.origin.shape}"
            )
        if not cone.inside(self.origin):
            raise OutsideConeError(self.origin, cone.label)
        self.reduced = reduced
        self.mesh = lattice.mesh_float
        self.offset = lattice.offset_float
        self.state_dimension = cone.dimension - 1 if reduced else cone.dimension
        self._columns = slice(1, None) if reduced else slice(None)

        matrix = cone.form_matrix
        self._const = matrix @ self.origin
        self._drift = self.offset * matrix.sum(axis=1)
        self._coef = self.mesh * matrix[:, self._columns]
        self._integer = self._integer_coefficients(cone, lattice.mesh, lattice.offset)

    def _integer_coefficients(self, cone: HarmonicCone, mesh, offset):
        x_exact = [to_exact(float(c)) for c in self.origin]
        quantities = [mesh, offset, *x_exact]
        quantities += [c for f in cone.forms for c in f.coefficients]
        if not all(is_rational(q) for q in quantities):
            logger.debug(f"Float membership test for {cone.label} (irrational data)")
            return None

        rows = []
        for form in cone.forms:
            coeffs = [to_fraction(c) for c in form.coefficients]
            a = sum(
                (c * to_fraction(xc) for c, xc in zip(coeffs, x_exact, strict=True)), Fraction(0)
            )
            b = to_fraction(offset) * sum(coeffs, Fraction(0))
            cs = [to_fraction(mesh) * c for c in coeffs][self._columns]
            rows.append((a, b, cs))
        denominator = math.lcm(*(q.denominator for a, b, cs in rows for q in (a, b, *cs)))
        if denominator > MAX_INTEGER_DENOMINATOR:
            logger.debug(f"Float membership test for {cone.label} (denominator {denominator})")
            return None
        return (
            np.array([int(a * denominator) for a, _, _ in rows], dtype=object),
            np.array([int(b * denominator) for _, b, _ in rows], dtype=object),
            np.array([[int(c * denominator) for c in cs] for _, _, cs in rows], dtype=np.int64),
        )

    @property
    def exact_membership(self) -> bool:
        return self._integer is not None

    def full_states(self, states: npt.ArrayLike) -> npt.NDArray[np.int64]:
        """Displacements in all d coordinates (K_1 = 0 for reduced states)."""
        states = np.asarray(states, dtype=np.int64)
        if not self.reduced:
            return states
        zeros = np.zeros(states.shape[:-1] + (1,), dtype=np.int64)
        return np.concatenate([zeros, states], axis=-1)

    def positions(self, states: npt.ArrayLike, n: int) -> npt.NDArray[np.float64]:
        return self.origin + n * self.offset + self.mesh * self.full_states(states)

    def inside_states(self, states: npt.ArrayLike, n: int) -> npt.NDArray[np.bool_]:
        """Strict membership of each state row at step n."""
        states = np.asarray(states, dtype=np.int64).reshape(-1, self.state_dimension)
        if self._integer is not None:
            a, b, c = self._integer
            values = states @ c.T + np.array([int(v) for v in a + n * b], dtype=np.int64)
            return np.all(values > 0, axis=-1)
        values = self._const + n * self._drift + states.astype(np.float64) @ self._coef.T
        return np.all(values > 0.0, axis=-1)

    def inside_grid(
        self, lo: npt.NDArray[np.int64], shape: tuple[int, ...], n: int
    ) -> npt.NDArray[np.bool_]:
        """Membership of every cell of a dense box whose first cell is state `lo`."""
        mask = np.ones(shape, dtype=bool)
        axes = [lo[j] + np.arange(shape[j], dtype=np.int64) for j in range(len(shape))]
        for i in range(self.cone.degree_p):
            if self._integer is not None:
                a, b, c = self._integer
                values = np.full(shape, int(a[i] + n * b[i]), dtype=np.int64)
                for j, axis in enumerate(axes):
                    values = values + _along(c[i, j] * axis, j, len(shape))
                mask &= values > 0
            else:
                values = np.full(shape, self._const[i] + n * self._drift[i])
                for j, axis in enumerate(axes):
                    values = values + _along(self._coef[i, j] * axis, j, len(shape))
                mask &= values > 0.0
        return mask


def _along(vector: npt.NDArray, axis: int, ndim: int) -> npt.NDArray:
    shape = [1] * ndim
    shape[axis] = len(vector)
    return vector.reshape(shape)


@dataclass(frozen=True, slots=True)
class LatticeMeasure:
    """
    mu_n(y) = P(x + S(n) = y, tau_x > n) on lattice states.

    `masses` is a dense array whose cell 0 is state `lo`. In exact mode
    `exact_masses` holds the same measure as Fractions keyed by full state tuples.
    """

    step_index: int
    origin: tuple[float, ...]
    mesh: float
    offset: float
    reduced: bool
    lo: tuple[int, ...]
    masses: npt.NDArray[np.float64] = field(repr=False, compare=False)
    exact_masses: Mapping[tuple[int, ...], Fraction] | None = field(
        default=None, repr=False, compare=False
    )
    total: float = field(init=False)

    def __post_init__(self) -> None:
        if self.exact_masses is not None:
            total = float(sum(self.exact_masses.values(), Fraction(0)))
        else:
            total = float(np.sum(self.masses))
        object.__setattr__(self, "total", min(total, 1.0))

    @property
    def state_dimension(self) -> int:
        return len(self.lo)

    def states(self) -> npt.NDArray[np.int64]:
        """Non-zero states, shape (M, D)."""
        index = np.argwhere(self.masses > 0)
        return index + np.asarray(self.lo, dtype=np.int64)

    def weights(self) -> npt.NDArray[np.float64]:
        return self.masses[self.masses > 0]

    def full_states(self) -> npt.NDArray[np.int64]:
        states = self.states()
        if not self.reduced:
            return states
        return np.concatenate([np.zeros((len(states), 1), dtype=np.int64), states], axis=1)

    def points(self) -> npt.NDArray[np.float64]:
        """Positions of the non-zero states (representatives when reduced)."""
        n = self.step_index
        return np.asarray(self.origin) + n * self.offset + self.mesh * self.full_states()

    def expectation(self, function, shift: npt.ArrayLike | None = None) -> float:
        """sum_y function(y + shift) mu_n(y) for a vectorised function of points."""
        weights = self.weights()
        if weights.size == 0:
            return 0.0
        points = self.points()
        if shift is not None:
            points = points + np.asarray(shift, dtype=np.float64)
        return float(np.dot(function(points), weights))

    def lookup(self, states: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """Masses at arbitrary states (zero outside the stored box)."""
        states = np.asarray(states, dtype=np.int64)
        index = states - np.asarray(self.lo, dtype=np.int64)
        shape = np.asarray(self.masses.shape)
        valid = np.all((index >= 0) & (index < shape), axis=-1)
        out = np.zeros(states.shape[:-1])
        if np.any(valid):
            out[valid] = self.masses[tuple(index[valid].T)]
        return out

    def as_dict(self) -> dict[tuple[int, ...], float]:
        return {
            tuple(int(k) for k in s): float(m)
            for s, m in zip(self.states(), self.weights(), strict=True)
        }


@dataclass(frozen=True, slots=True)
class StepResult:
    """The measure after one step together with the mass killed in that step."""

    measure: LatticeMeasure
    killed_points: npt.NDArray[np.float64]
    killed_masses: npt.NDArray[np.float64]
    killed_exact: tuple[tuple[tuple[int, ...], Fraction], ...] = ()

    def exit_expectation(self, function, shift: npt.ArrayLike | None = None) -> float:
        """sum over killed cells of function(point + shift) * mass."""
        if self.killed_masses.size == 0:
            return 0.0
        points = self.killed_points
        if shift is not None:
            points = points + np.asarray(shift, dtype=np.float64)
        return float(np.dot(function(points), self.killed_masses))


class LatticeDP:
    """
    Step-by-step forward DP for one (cone, start, law).

    Example:
        ```python
        dp = LatticeDP(cone, x, dist)
        for result in dp.iterate(256):
            total = result.measure.total
        ```
    """

    def __init__(
        self,
        cone: HarmonicCone,
        x: npt.ArrayLike,
        dist: IncrementDistribution,
        exact: bool = False,
        reduce: bool | None = None,
        keep_history: bool = False,
    ):
        if exact:
            reduce = False
        elif reduce is None:
            reduce = cone.is_translation_invariant
        if exact and cone.dimension > EXACT_MAX_DIMENSION:
            raise BudgetExceededError(
                "exact rational DP dimension", cone.dimension, EXACT_MAX_DIMENSION
            )
        self.cone = cone
        self.dist = dist
        self.exact = exact
        self.geometry = LatticeGeometry(cone, x, dist, reduced=reduce)
        self.joint: JointSupport = joint_support(dist, cone.dimension)
        self.keep_history = keep_history
        _, support = dist.require_lattice("lattice DP")
        self._steps = np.asarray(support.steps, dtype=np.int64)
        self._probs = support.probabilities_float

        D = self.geometry.state_dimension
        self.n = 0
        self._lo = np.zeros(D, dtype=np.int64)
        self._mass = np.ones((1,) * D)
        self._exact: dict[tuple[int, ...], Fraction] | None = (
            {(0,) * cone.dimension: Fraction(1)} if exact else None
        )
        self.history: list[LatticeMeasure] = [self.measure()]
        logger.debug(
            f"LatticeDP on {cone.label} from {tuple(self.geometry.origin)}: "
            f"{'exact' if exact else 'float'}, state dimension {D}, reduced={reduce}"
        )

    @property
    def reduced(self) -> bool:
        return self.geometry.reduced

    def measure(self) -> LatticeMeasure:
        return LatticeMeasure(
            step_index=self.n,
            origin=tuple(float(c) for c in self.geometry.origin),
            mesh=self.geometry.mesh,
            offset=self.geometry.offset,
            reduced=self.reduced,
            lo=tuple(int(v) for v in self._lo),
            masses=self._mass,
            exact_masses=dict(self._exact) if self._exact is not None else None,
        )

    def reduced_steps(self) -> npt.NDArray[np.int64]:
        """Joint steps expressed in state coordinates."""
        steps = self.joint.steps
        if self.reduced:
            return steps[:, 1:] - steps[:, :1]
        return steps

    def step(self) -> StepResult:
        if self.exact:
            return self._step_exact()
        return self._step_float()

    def iterate(self, n: int) -> Iterator[StepResult]:
        """Advance to step n, yielding every intermediate step."""
        while self.n < n:
            yield self.step()

    def run(self, n: int) -> LatticeMeasure:
        for _ in self.iterate(n):
            pass
        return self.measure()

    # ------------------------------------------------------------------ float engine

    def _convolve(self, mass: npt.NDArray, lo: npt.NDArray, direction: npt.NDArray):
        offsets = np.outer(self._steps, direction)
        omin = offsets.min(axis=0)
        omax = offsets.max(axis=0)
        out = np.zeros(tuple(np.asarray(mass.shape) + omax - omin))
        for offset, p in zip(offsets, self._probs, strict=True):
            start = offset - omin
            window = tuple(slice(s, s + size) for s, size in zip(start, mass.shape, strict=True))
            out[window] += p * mass
        return out, lo + omin

    def _step_float(self) -> StepResult:
        D = self.geometry.state_dimension
        mass, lo = self._mass, self._lo
        if self.reduced:
            for j in range(D):
                mass, lo = self._convolve(mass, lo, np.eye(D, dtype=np.int64)[j])
            mass, lo = self._convolve(mass, lo, -np.ones(D, dtype=np.int64))
        else:
            for j in range(D):
                mass, lo = self._convolve(mass, lo, np.eye(D, dtype=np.int64)[j])

        self.n += 1
        inside = self.geometry.inside_grid(lo, mass.shape, self.n)
        killed = np.where(inside, 0.0, mass)
        mass = np.where(inside, mass, 0.0)
        mass[mass < PRUNE_BELOW] = 0.0

        killed_index = np.argwhere(killed > 0)
        killed_states = killed_index + lo
        killed_points = self.geometry.positions(killed_states, self.n)
        killed_masses = killed[killed > 0]

        self._mass, self._lo = _crop(mass, lo)
        measure = self.measure()
        if self.keep_history:
            self.history.append(measure)
        if self.n % 256 == 0:
            logger.info(
                f"DP on {self.cone.label} reached n={self.n}: total {measure.total:.6g}, "
                f"box {self._mass.shape}"
            )
        return StepResult(measure, killed_points, killed_masses)

    # ------------------------------------------------------------------ exact engine

    def _step_exact(self) -> StepResult:
        if self.n >= EXACT_MAX_STEPS:
            raise BudgetExceededError("exact rational DP steps", self.n + 1, EXACT_MAX_STEPS)
        assert self._exact is not None
        moved: dict[tuple[int, ...], Fraction] = {}
        for state, mass in self._exact.items():
            for step, p in zip(self.joint.steps, self.joint.exact, strict=True):
                key = tuple(int(a + b) for a, b in zip(state, step, strict=True))
                moved[key] = moved.get(key, Fraction(0)) + mass * p

        self.n += 1
        keys = list(moved)
        inside = self.geometry.inside_states(np.array(keys, dtype=np.int64), self.n)
        self._exact = {k: moved[k] for k, ok in zip(keys, inside, strict=True) if ok}
        killed = tuple((k, moved[k]) for k, ok in zip(keys, inside, strict=True) if not ok)

        self._mass, self._lo = _dense(self._exact, self.geometry.state_dimension)
        measure = self.measure()
        if self.keep_history:
            self.history.append(measure)
        killed_states = np.array([k for k, _ in killed], dtype=np.int64)
        killed_states = killed_states.reshape(-1, self.cone.dimension)
        return StepResult(
            measure,
            self.geometry.positions(killed_states, self.n),
            np.array([float(m) for _, m in killed]),
            killed,
        )


def _crop(mass: npt.NDArray, lo: npt.NDArray) -> tuple[npt.NDArray, npt.NDArray]:
    nonzero = np.argwhere(mass > 0)
    if nonzero.size == 0:
        return np.zeros((1,) * mass.ndim), lo
    first = nonzero.min(axis=0)
    last = nonzero.max(axis=0) + 1
    window = tuple(slice(a, b) for a, b in zip(first, last, strict=True))
    return mass[window].copy(), lo + first


def _dense(masses: Mapping[tuple[int, ...], Fraction], dimension: int):
    if not masses:
        return np.zeros((1,) * dimension), np.zeros(dimension, dtype=np.int64)
    states = np.array(list(masses), dtype=np.int64)
    lo = states.min(axis=0)
    out = np.zeros(tuple(states.max(axis=0) - lo + 1))
    out[tuple((states - lo).T)] = [float(m) for m in masses.values()]
    return out, lo


def estimate_dp_bytes(cone: HarmonicCone, dist: IncrementDistribution, n: int) -> float:
    """Rough peak memory of the float DP at step n: a few dense boxes of float64."""
    _, support = dist.require_lattice("DP memory estimate")
    assert support.steps is not None
    spread = max(support.steps) - min(support.steps)
    dimension = cone.dimension - 1 if cone.is_translation_invariant else cone.dimension
    if cone.is_translation_invariant:
        spread *= 2
    width = spread * n + 1
    return 3.0 * 8.0 * float(width) ** max(dimension, 1)
