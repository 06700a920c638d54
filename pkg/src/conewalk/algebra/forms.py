"""Linear forms alpha_i whose positivity cuts out a cone."""

from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt
import sympy

from ..exceptions import DegenerateFormError
from ..utils import to_exact
from .polynomial import SparsePolynomial


@dataclass(frozen=True, slots=True)
class LinearForm:
    """A linear form x -> <x, alpha> with exact coefficients and cached Euclidean norm."""

    coefficients: tuple[sympy.Expr, ...]
    norm: float = field(init=False)

    def __post_init__(self) -> None:
        coeffs = tuple(to_exact(c) for c in self.coefficients)
        if not coeffs or all(c == 0 for c in coeffs):
            raise DegenerateFormError()
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "norm", float(np.linalg.norm(self.as_array())))

    @classmethod
    def from_values(cls, values: Iterable[object]) -> "LinearForm":
        """Build from ints, fraction strings, surd strings or floats."""
        return cls(tuple(values))

    @property
    def dimension(self) -> int:
        return len(self.coefficients)

    def as_array(self) -> npt.NDArray[np.float64]:
        return np.array([float(c) for c in self.coefficients], dtype=np.float64)

    def as_polynomial(self) -> SparsePolynomial:
        return SparsePolynomial.linear(self.coefficients)

    def __str__(self) -> str:
        symbols = sympy.symbols(f"x1:{self.dimension + 1}")
        return str(sum((c * s for c, s in zip(self.coefficients, symbols, strict=True)), 0))
