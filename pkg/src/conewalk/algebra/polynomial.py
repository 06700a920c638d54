"""Exact sparse multivariate polynomials.

Coefficients are exact sympy numbers (rationals, or surds such as 1+sqrt(2)),
kept canonical so that structural equality means numerical equality. Float
evaluation is vectorised through numpy for use in the simulation engines.
"""

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from math import factorial, prod
from types import MappingProxyType

import numpy as np
import numpy.typing as npt
import sympy

from ..utils import canonical, to_exact

MultiIndex = tuple[int, ...]


def _falling(n: int, k: int) -> int:
    """n (n-1) ... (n-k+1)."""
    return prod(range(n - k + 1, n + 1)) if k > 0 else 1


@dataclass(frozen=True, slots=True)
class SparsePolynomial:
    """
    Polynomial in d variables stored as {exponent multi-index: coefficient}.

    Zero coefficients are never stored; every multi-index has length d.
    Instances are immutable and safe to share between threads.
    """

    dimension: int
    terms: Mapping[MultiIndex, sympy.Expr]
    _exponents: npt.NDArray[np.int64] = field(init=False, repr=False, compare=False)
    _coefficients: npt.NDArray[np.float64] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ValueError(f"Polynomial dimension must be positive, got {self.dimension}")
        cleaned: dict[MultiIndex, sympy.Expr] = {}
        for index, coeff in self.terms.items():
            index = tuple(int(e) for e in index)
            if len(index) != self.dimension or any(e < 0 for e in index):
                raise ValueError(f"Bad multi-index {index} for dimension {self.dimension}")
            value = canonical(to_exact(coeff))
            if value != 0:
                cleaned[index] = value
        object.__setattr__(self, "terms", MappingProxyType(dict(sorted(cleaned.items()))))

        if cleaned:
            exps = np.array(list(cleaned.keys()), dtype=np.int64)
            coeffs = np.array([float(c) for c in cleaned.values()], dtype=np.float64)
        else:
            exps = np.zeros((0, self.dimension), dtype=np.int64)
            coeffs = np.zeros(0, dtype=np.float64)
        object.__setattr__(self, "_exponents", exps)
        object.__setattr__(self, "_coefficients", coeffs)

    # ------------------------------------------------------------------ builders

    @classmethod
    def zero(cls, dimension: int) -> "SparsePolynomial":
        return cls(dimension, {})

    @classmethod
    def constant(cls, dimension: int, value: object) -> "SparsePolynomial":
        return cls(dimension, {(0,) * dimension: to_exact(value)})

    @classmethod
    def linear(cls, coefficients: Iterable[object]) -> "SparsePolynomial":
        """The polynomial sum_j c_j x_j."""
        coeffs = list(coefficients)
        d = len(coeffs)
        terms = {}
        for j, c in enumerate(coeffs):
            index = [0] * d
            index[j] = 1
            terms[tuple(index)] = c
        return cls(d, terms)

    # ---------------------------------------------------------------- arithmetic

    def __add__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        self._check_dimension(other)
        terms = dict(self.terms)
        for index, coeff in other.terms.items():
            terms[index] = terms.get(index, sympy.Integer(0)) + coeff
        return SparsePolynomial(self.dimension, terms)

    def __neg__(self) -> "SparsePolynomial":
        return SparsePolynomial(self.dimension, {i: -c for i, c in self.terms.items()})

    def __sub__(self, other: "SparsePolynomial") -> "SparsePolynomial":
        return self + (-other)

    def __mul__(self, other: "SparsePolynomial | object") -> "SparsePolynomial":
        if not isinstance(other, SparsePolynomial):
            return self.scale(other)
        self._check_dimension(other)
        terms: dict[MultiIndex, sympy.Expr] = {}
        for i1, c1 in self.terms.items():
            for i2, c2 in other.terms.items():
                index = tuple(a + b for a, b in zip(i1, i2, strict=True))
                terms[index] = terms.get(index, sympy.Integer(0)) + c1 * c2
        return SparsePolynomial(self.dimension, terms)

    __rmul__ = __mul__

    def scale(self, factor: object) -> "SparsePolynomial":
        factor = to_exact(factor)
        return SparsePolynomial(self.dimension, {i: c * factor for i, c in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparsePolynomial):
            return NotImplemented
        return self.dimension == other.dimension and dict(self.terms) == dict(other.terms)

    def __hash__(self) -> int:
        return hash((self.dimension, tuple(self.terms.items())))

    def _check_dimension(self, other: "SparsePolynomial") -> None:
        if other.dimension != self.dimension:
            raise ValueError(f"Dimension mismatch: {self.dimension} vs {other.dimension}")

    # ------------------------------------------------------------------ queries

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def total_degree(self) -> int:
        return max((sum(i) for i in self.terms), default=0)

    @property
    def max_variable_degree(self) -> int:
        """Largest exponent of any single variable."""
        return max((max(i) for i in self.terms), default=0)

    def coefficient(self, index: MultiIndex) -> sympy.Expr:
        return self.terms.get(tuple(index), sympy.Integer(0))

    # ----------------------------------------------------------------- calculus

    def partial_derivative(self, multi_index: MultiIndex) -> "SparsePolynomial":
        """Exact mixed partial derivative of order multi_index."""
        multi_index = tuple(int(a) for a in multi_index)
        if len(multi_index) != self.dimension or any(a < 0 for a in multi_index):
            raise ValueError(f"Bad multi-index {multi_index} for dimension {self.dimension}")
        terms: dict[MultiIndex, sympy.Expr] = {}
        for index, coeff in self.terms.items():
            if any(e < a for e, a in zip(index, multi_index, strict=True)):
                continue
            factor = prod(_falling(e, a) for e, a in zip(index, multi_index, strict=True))
            new_index = tuple(e - a for e, a in zip(index, multi_index, strict=True))
            terms[new_index] = terms.get(new_index, sympy.Integer(0)) + coeff * factor
        return SparsePolynomial(self.dimension, terms)

    def laplacian(self) -> "SparsePolynomial":
        result = SparsePolynomial.zero(self.dimension)
        for j in range(self.dimension):
            index = [0] * self.dimension
            index[j] = 2
            result = result + self.partial_derivative(tuple(index))
        return result

    # --------------------------------------------------------------- evaluation

    def evaluate(self, points: npt.ArrayLike) -> float | npt.NDArray[np.float64]:
        """Float evaluation at one point (shape (d,)) or a batch (shape (..., d))."""
        pts = np.asarray(points, dtype=np.float64)
        if pts.shape[-1] != self.dimension:
            raise ValueError(f"Expected points of dimension {self.dimension}, got {pts.shape}")
        if not self.terms:
            out = np.zeros(pts.shape[:-1])
        else:
            monomials = np.prod(pts[..., None, :] ** self._exponents, axis=-1)
            out = monomials @ self._coefficients
        return float(out) if pts.ndim == 1 else out

    def evaluate_exact(self, point: Iterable[object]) -> sympy.Expr:
        """Exact value at a point given by exact (or exactly convertible) coordinates."""
        coords = [to_exact(c) for c in point]
        if len(coords) != self.dimension:
            raise ValueError(f"Expected {self.dimension} coordinates, got {len(coords)}")
        total = sympy.Integer(0)
        for index, coeff in self.terms.items():
            total += coeff * prod((c**e for c, e in zip(coords, index, strict=True)), start=1)
        return canonical(total)

    def as_expr(self) -> sympy.Expr:
        symbols = sympy.symbols(f"x1:{self.dimension + 1}")
        return sum(
            (
                c * prod((s**e for s, e in zip(symbols, i, strict=True)), start=1)
                for i, c in self.terms.items()
            ),
            sympy.Integer(0),
        )

    def __str__(self) -> str:
        return str(self.as_expr())


def partial_derivative(poly: SparsePolynomial, multi_index: MultiIndex) -> SparsePolynomial:
    """Exact partial derivative; orders above a variable's degree give the zero polynomial."""
    return poly.partial_derivative(multi_index)


def laplacian(poly: SparsePolynomial) -> SparsePolynomial:
    """Exact sum of pure second partials."""
    return poly.laplacian()


def multi_indices(dimension: int, max_per_variable: int) -> list[MultiIndex]:
    """All multi-indices with every entry in [0, max_per_variable], in lexicographic order."""
    grids = np.indices((max_per_variable + 1,) * dimension).reshape(dimension, -1).T
    return [tuple(int(a) for a in row) for row in grids]


def multi_factorial(index: MultiIndex) -> int:
    return prod(factorial(a) for a in index)
