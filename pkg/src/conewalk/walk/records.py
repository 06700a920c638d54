"""Exit records and survival curves."""

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from ..models.enums import SurvivalMethod


@dataclass(frozen=True, slots=True)
class ExitRecord:
    """
    One trajectory observed up to a horizon.

    exit_time is tau_x when the walk left the cone by the horizon, else the horizon
    itself; `survived` tells the two cases apart without a sentinel value.
    """

    exit_time: int
    survived: bool
    final_position: tuple[float, ...]


@dataclass(frozen=True, slots=True)
class SurvivalCurve:
    """Estimates of P(tau_x > n) over increasing horizons."""

    start: tuple[float, ...]
    horizons: tuple[int, ...]
    estimates: tuple[float, ...]
    std_errors: tuple[float, ...]
    method: SurvivalMethod
    trials: int
    cone_label: str = ""
    seed: int | None = None
    extinct_from: int | None = field(default=None)

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", tuple(float(c) for c in self.start))
        object.__setattr__(self, "horizons", tuple(int(n) for n in self.horizons))
        object.__setattr__(self, "estimates", tuple(float(p) for p in self.estimates))
        object.__setattr__(self, "std_errors", tuple(float(s) for s in self.std_errors))
        object.__setattr__(self, "method", SurvivalMethod(self.method))

        n = len(self.horizons)
        if len(self.estimates) != n or len(self.std_errors) != n:
            raise ValueError("horizons, estimates and std_errors must have equal length")
        if any(b <= a for a, b in zip(self.horizons, self.horizons[1:], strict=False)):
            raise ValueError(f"horizons must be strictly increasing, got {self.horizons}")
        if any(not 0.0 <= p <= 1.0 for p in self.estimates):
            raise ValueError("survival estimates must lie in [0, 1]")
        if any(b > a for a, b in zip(self.estimates, self.estimates[1:], strict=False)):
            raise ValueError("survival estimates must be non-increasing in the horizon")
        if any(s < 0 for s in self.std_errors):
            raise ValueError("standard errors must be non-negative")
        if self.method is SurvivalMethod.DP_EXACT and any(s != 0 for s in self.std_errors):
            raise ValueError("dp_exact curves carry zero standard errors")

    @property
    def horizon_array(self) -> np.ndarray:
        return np.asarray(self.horizons, dtype=np.float64)

    @property
    def estimate_array(self) -> np.ndarray:
        return np.asarray(self.estimates, dtype=np.float64)

    @property
    def std_error_array(self) -> np.ndarray:
        return np.asarray(self.std_errors, dtype=np.float64)

    def at(self, n: int) -> tuple[float, float]:
        """(estimate, std_error) at horizon n."""
        try:
            i = self.horizons.index(n)
        except ValueError:
            raise KeyError(f"horizon {n} not in curve") from None
        return self.estimates[i], self.std_errors[i]

    def restricted(self, horizons: Sequence[int]) -> "SurvivalCurve":
        """The same curve on a subset of its horizons."""
        keep = [i for i, n in enumerate(self.horizons) if n in set(horizons)]
        return SurvivalCurve(
            start=self.start,
            horizons=tuple(self.horizons[i] for i in keep),
            estimates=tuple(self.estimates[i] for i in keep),
            std_errors=tuple(self.std_errors[i] for i in keep),
            method=self.method,
            trials=self.trials,
            cone_label=self.cone_label,
            seed=self.seed,
            extinct_from=self.extinct_from,
        )

    def to_rows(self) -> list[dict[str, object]]:
        """Rows for the survival CSV."""
        return [
            {
                "cone_label": self.cone_label,
                "x": self.start,
                "n": n,
                "estimate": p,
                "std_error": s,
                "method": self.method.value,
                "trials": self.trials,
                "seed": "" if self.seed is None else self.seed,
            }
            for n, p, s in zip(self.horizons, self.estimates, self.std_errors, strict=True)
        ]
