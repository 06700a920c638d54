"""Standardized step laws (mean 0, variance 1) with exact moments and lattice metadata.

Finite laws are kept as an exact table of standardized values and rational
probabilities. When every centred value is a rational multiple of one of them the
law lives on a lattice: values are mesh * k for integers k (offset 0 for every law
built here, since the lattice is generated by the centred values themselves).

Continuous laws carry closed-form moments:

- uniform_std: m_k = 3^(k/2) / (k + 1) for even k
- exp_centered: X = E - 1, m_k = !k (subfactorial)
- pareto_std(a): X = +-T / sigma with T Lomax(a), m_k = k! / prod_(j<=k)(a - j) / sigma^k
  for even k < a, with sigma^2 = 2 / ((a - 1)(a - 2))
"""

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np
import numpy.typing as npt
import sympy
from pydantic import BaseModel, Field, ValidationError

from ..algebra import HarmonicCone
from ..exceptions import (
    InvalidDistributionError,
    MomentUnavailableError,
    NonLatticeDistributionError,
)
from ..models.enums import DistributionKind
from ..models.specs import DistributionSpec
from ..utils import canonical, rational_gcd, to_exact, to_fraction

logger = logging.getLogger(__name__)

MOMENT_TABLE_ORDER = 8

# {-1, 0, 2} with masses 1/3, 1/2, 1/6: mean 0, variance 1, third moment 1.
ASYMMETRIC_THREE_POINT_TABLE = {"-1": "1/3", "0": "1/2", "2": "1/6"}


@dataclass(frozen=True, slots=True)
class LatticeSpec:
    """Support contained in offset + mesh * Z."""

    mesh: sympy.Expr
    offset: sympy.Expr = sympy.Integer(0)

    @property
    def mesh_float(self) -> float:
        return float(self.mesh)

    @property
    def offset_float(self) -> float:
        return float(self.offset)


@dataclass(frozen=True, slots=True)
class FiniteSupport:
    """Exact standardized support of a finite law, with lattice indices when available."""

    values: tuple[sympy.Expr, ...]
    probabilities: tuple[Fraction, ...]
    steps: tuple[int, ...] | None = None
    values_float: npt.NDArray[np.float64] = field(init=False, repr=False, compare=False)
    probabilities_float: npt.NDArray[np.float64] = field(init=False, repr=False, compare=False)
    _cdf: npt.NDArray[np.float64] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "values_float", np.array([float(v) for v in self.values]))
        probs = np.array([float(p) for p in self.probabilities])
        object.__setattr__(self, "probabilities_float", probs)
        cdf = np.cumsum(probs)
        cdf[-1] = 1.0
        object.__setattr__(self, "_cdf", cdf)

    def __len__(self) -> int:
        return len(self.values)

    def draw_indices(
        self, rng: np.random.Generator, shape: tuple[int, ...]
    ) -> npt.NDArray[np.intp]:
        return np.searchsorted(self._cdf, rng.random(shape), side="right")


@dataclass(frozen=True, slots=True)
class IncrementDistribution:
    """
    A standardized step law.

    Build through `make_distribution`. Instances are immutable and shared freely
    between workers; each worker draws from its own generator.
    """

    kind: DistributionKind
    label: str
    parameter: sympy.Expr | None = None
    support: FiniteSupport | None = None
    lattice: LatticeSpec | None = None
    heavy_tail_index: float = math.inf

    @property
    def is_finite(self) -> bool:
        return self.support is not None

    @property
    def is_lattice(self) -> bool:
        return self.lattice is not None

    @property
    def is_symmetric(self) -> bool:
        """True when every odd moment that exists vanishes."""
        orders = [k for k in (1, 3, 5) if k < self.heavy_tail_index]
        return all(moment(self, k) == 0 for k in orders)

    @property
    def moment_table(self) -> dict[int, sympy.Expr]:
        """Exact moments of order 0..8 that exist."""
        return {
            k: moment(self, k) for k in range(MOMENT_TABLE_ORDER + 1) if k < self.heavy_tail_index
        }

    @property
    def cache_key(self) -> str:
        """Identifies the law in cache keys and output metadata."""
        if self.support is None:
            return self.label
        pairs = ",".join(
            f"{v}:{p}" for v, p in zip(self.values_exact, self.support.probabilities, strict=True)
        )
        return f"{self.label}[{pairs}]"

    @property
    def values_exact(self) -> tuple[sympy.Expr, ...]:
        if self.support is None:
            raise NonLatticeDistributionError(self.kind.value, "exact support enumeration")
        return self.support.values

    def require_lattice(self, operation: str) -> tuple[LatticeSpec, FiniteSupport]:
        """Lattice metadata and support, or NonLatticeDistributionError."""
        if self.lattice is None or self.support is None or self.support.steps is None:
            raise NonLatticeDistributionError(self.label, operation)
        return self.lattice, self.support

    def __str__(self) -> str:
        return self.label


# ---------------------------------------------------------------------------- builders


def make_distribution(
    spec: DistributionSpec | DistributionKind | str, **params: object
) -> IncrementDistribution:
    """
    Build a standardized law from a config spec or a kind tag plus parameters.

    Examples:
        make_distribution("rademacher")
        make_distribution("lazy_rademacher", q="1/2")
        make_distribution(DistributionSpec(kind="pareto_std", a=3.5))

    Raises:
        InvalidDistributionError: unknown kind or parameter out of range
    """
    if not isinstance(spec, DistributionSpec):
        kind_tag = spec.value if isinstance(spec, DistributionKind) else str(spec)
        try:
            spec = DistributionSpec(kind=kind_tag, **params)
        except ValidationError as e:
            reason = "; ".join(err.get("msg", "invalid") for err in e.errors())
            raise InvalidDistributionError(kind_tag, reason) from e

    kind = spec.kind
    if kind is DistributionKind.RADEMACHER:
        return _finite(kind, "rademacher", {"-1": "1/2", "1": "1/2"})
    if kind is DistributionKind.LAZY_RADEMACHER:
        q = to_exact(spec.q)
        half = (1 - q) / 2
        return _finite(kind, f"lazy_rademacher(q={q})", {"-1": half, "0": q, "1": half}, q)
    if kind is DistributionKind.ASYMMETRIC_THREE_POINT:
        return _finite(kind, "asymmetric_three_point", ASYMMETRIC_THREE_POINT_TABLE)
    if kind is DistributionKind.DISCRETE:
        assert spec.table is not None
        raw = ",".join(f"{v}:{p}" for v, p in sorted(spec.table.items()))
        return _finite(kind, f"discrete({raw})", spec.table)
    if kind is DistributionKind.UNIFORM_STD:
        return IncrementDistribution(kind=kind, label="uniform_std")
    if kind is DistributionKind.EXP_CENTERED:
        return IncrementDistribution(kind=kind, label="exp_centered")
    if kind is DistributionKind.PARETO_STD:
        a = to_exact(spec.a)
        return IncrementDistribution(
            kind=kind, label=f"pareto_std(a={a})", parameter=a, heavy_tail_index=float(a)
        )
    raise InvalidDistributionError(str(kind), "unknown kind")


def _finite(
    kind: DistributionKind,
    label: str,
    table: Mapping[object, object],
    parameter: sympy.Expr | None = None,
) -> IncrementDistribution:
    """Standardize an exact finite table and detect its lattice."""
    merged: dict[sympy.Expr, Fraction] = {}
    for raw_value, raw_prob in table.items():
        try:
            value = to_exact(raw_value)
            prob = to_fraction(to_exact(raw_prob))
        except ValueError as e:
            raise InvalidDistributionError(kind.value, f"bad entry {raw_value}: {e}") from e
        if prob <= 0:
            raise InvalidDistributionError(
                kind.value, f"probability of {raw_value} must be positive"
            )
        merged[value] = merged.get(value, Fraction(0)) + prob

    if sum(merged.values()) != 1:
        raise InvalidDistributionError(kind.value, "probabilities must sum to exactly 1")

    values = sorted(merged, key=float)
    probs = [merged[v] for v in values]
    weights = [sympy.Rational(p.numerator, p.denominator) for p in probs]
    mean = canonical(sum((w * v for w, v in zip(weights, values, strict=True)), sympy.Integer(0)))
    centred = [canonical(v - mean) for v in values]
    variance = canonical(
        sum((w * c**2 for w, c in zip(weights, centred, strict=True)), sympy.Integer(0))
    )
    if variance == 0:
        raise InvalidDistributionError(kind.value, "a point mass cannot be standardized")
    sd = canonical(sympy.sqrt(variance))
    standardized = tuple(canonical(c / sd) for c in centred)

    lattice, steps = _detect_lattice(centred, sd)
    dist = IncrementDistribution(
        kind=kind,
        label=label,
        parameter=parameter,
        support=FiniteSupport(standardized, tuple(probs), steps),
        lattice=lattice,
    )
    logger.debug(
        f"Built {label}: support {[str(v) for v in standardized]}, "
        f"mesh {lattice.mesh if lattice else None}"
    )
    return dist


def _detect_lattice(
    centred: list[sympy.Expr], sd: sympy.Expr
) -> tuple[LatticeSpec | None, tuple[int, ...] | None]:
    reference = next(c for c in centred if c != 0)
    ratios = [canonical(c / reference) for c in centred]
    if not all(isinstance(r, sympy.Rational) for r in ratios):
        return None, None
    unit = rational_gcd([to_fraction(r) for r in ratios])
    g = canonical(abs(reference) * sympy.Rational(unit.numerator, unit.denominator))
    steps = tuple(int(canonical(c / g)) for c in centred)
    return LatticeSpec(mesh=canonical(g / sd)), steps


# ----------------------------------------------------------------------------- moments


def moment(dist: IncrementDistribution, k: int) -> sympy.Expr:
    """
    Exact k-th raw moment E[X^k].

    Raises:
        MomentUnavailableError: if E|X|^k is infinite (pareto_std with k >= a)
    """
    if k < 0:
        raise ValueError(f"Moment order must be non-negative, got {k}")
    if k >= dist.heavy_tail_index:
        raise MomentUnavailableError(dist.label, k, dist.heavy_tail_index)
    if k == 0:
        return sympy.Integer(1)

    if dist.support is not None:
        total = sympy.Integer(0)
        for v, p in zip(dist.support.values, dist.support.probabilities, strict=True):
            total += sympy.Rational(p.numerator, p.denominator) * v**k
        return canonical(total)

    if dist.kind is DistributionKind.EXP_CENTERED:
        return sympy.Integer(sympy.subfactorial(k))
    if k % 2 == 1:
        return sympy.Integer(0)
    if dist.kind is DistributionKind.UNIFORM_STD:
        return sympy.Integer(3) ** (k // 2) / (k + 1)
    if dist.kind is DistributionKind.PARETO_STD:
        a = dist.parameter
        raw = sympy.factorial(k) / sympy.prod([a - j for j in range(1, k + 1)])
        sigma2 = 2 / ((a - 1) * (a - 2))
        return canonical(raw / sigma2 ** (k // 2))
    raise InvalidDistributionError(dist.label, "no moment formula")


class MomentReport(BaseModel):
    """Outcome of checking the moment assumption of a law against a cone."""

    required_order: int = Field(description="Per-variable degree r of the cone's polynomial")
    absolute_moment_finite: bool = Field(description="Whether E|X|^r is finite")
    log_condition: bool | None = Field(
        default=None, description="E[X^2 log(1+|X|)] finite; only checked when r <= 2"
    )
    satisfied: bool = Field(description="Whether the assumption holds")
    explanation: str = Field(description="Human-readable summary")


def validate_moment_assumption(dist: IncrementDistribution, cone: HarmonicCone) -> MomentReport:
    """Check E|X|^r < infinity (r > 2) or E[X^2 log(1+|X|)] < infinity (r <= 2).

    Failure is a report outcome, never an exception.
    """
    r = cone.degree_r
    tail = dist.heavy_tail_index
    finite = r < tail
    if r <= 2:
        # every registered law has a tail index above 2, which gives the log condition
        log_condition = tail > 2
        satisfied = log_condition
        explanation = (
            f"r = {r}: needs E[X^2 log(1+|X|)] < inf; "
            + ("holds" if log_condition else "fails")
            + f" for {dist.label}"
        )
    else:
        log_condition = None
        satisfied = finite
        bound = "all moments finite" if math.isinf(tail) else f"E|X|^s finite iff s < {tail:g}"
        explanation = (
            f"r = {r} on {cone.label}: needs E|X|^{r} < inf; {dist.label} has {bound}, so the "
            f"assumption {'holds' if satisfied else 'fails'}"
        )
    if not satisfied:
        logger.warning(explanation)
    return MomentReport(
        required_order=r,
        absolute_moment_finite=finite,
        log_condition=log_condition,
        satisfied=satisfied,
        explanation=explanation,
    )


# ---------------------------------------------------------------------------- sampling


def sample(dist: IncrementDistribution, rng: np.random.Generator) -> float:
    """One variate, deterministic given the generator state."""
    return float(sample_array(dist, rng, ()))


def sample_array(
    dist: IncrementDistribution, rng: np.random.Generator, shape: tuple[int, ...] | int
) -> npt.NDArray[np.float64]:
    """Vectorised i.i.d. draws of the given shape."""
    shape = (shape,) if isinstance(shape, int) else tuple(shape)
    if dist.support is not None:
        index = dist.support.draw_indices(rng, shape)
        if dist.lattice is not None and dist.support.steps is not None:
            # exact lattice points, not rounded standardized values
            steps = np.asarray(dist.support.steps, dtype=np.float64)
            return dist.lattice.offset_float + dist.lattice.mesh_float * steps[index]
        return dist.support.values_float[index]

    if dist.kind is DistributionKind.UNIFORM_STD:
        root3 = math.sqrt(3.0)
        return rng.uniform(-root3, root3, shape)
    if dist.kind is DistributionKind.EXP_CENTERED:
        return rng.exponential(1.0, shape) - 1.0
    if dist.kind is DistributionKind.PARETO_STD:
        a = float(dist.parameter)
        sigma = math.sqrt(2.0 / ((a - 1.0) * (a - 2.0)))
        u = 1.0 - rng.random(shape)  # (0, 1]
        t = u ** (-1.0 / a) - 1.0
        sign = np.where(rng.random(shape) < 0.5, -1.0, 1.0)
        return sign * t / sigma
    raise InvalidDistributionError(dist.label, "no sampler")


def sample_steps(
    dist: IncrementDistribution, rng: np.random.Generator, shape: tuple[int, ...] | int
) -> npt.NDArray[np.int64]:
    """Integer lattice indices k of draws X = offset + mesh * k."""
    _, support = dist.require_lattice("sample_steps")
    shape = (shape,) if isinstance(shape, int) else tuple(shape)
    steps = np.asarray(support.steps, dtype=np.int64)
    return steps[support.draw_indices(rng, shape)]


@dataclass(frozen=True, slots=True)
class JointSupport:
    """Support of d i.i.d. copies: integer step vectors with their probabilities."""

    steps: npt.NDArray[np.int64]
    probabilities: npt.NDArray[np.float64]
    exact: tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.exact)


def joint_support(dist: IncrementDistribution, d: int) -> JointSupport:
    """All d-fold step combinations of a lattice law, in lexicographic order."""
    _, support = dist.require_lattice("joint_support")
    assert support.steps is not None
    combos = list(product(range(len(support)), repeat=d))
    steps = np.array([[support.steps[i] for i in c] for c in combos], dtype=np.int64)
    exact = tuple(
        math.prod((support.probabilities[i] for i in c), start=Fraction(1)) for c in combos
    )
    probs = np.array([float(p) for p in exact], dtype=np.float64)
    return JointSupport(steps.reshape(len(combos), d), probs, exact)
