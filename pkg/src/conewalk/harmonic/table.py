"""A lazy, caching lookup of V over points of a cone."""

import logging
from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np
import numpy.typing as npt

from ..algebra import HarmonicCone
from ..exceptions import CurveFileError, HarmonicValueUnavailableError
from ..increments import IncrementDistribution
from ..io.tables import HARMONIC_COLUMNS, OutputMeta, parse_point, read_csv, write_csv
from ..models.enums import HarmonicMethod
from .estimators import DEFAULT_CAP, HarmonicEstimate, corrected_V, estimate_V

logger = logging.getLogger(__name__)

KEY_DECIMALS = 9


def _key(x: npt.ArrayLike) -> tuple[float, ...]:
    return tuple(round(float(c), KEY_DECIMALS) for c in np.asarray(x, dtype=np.float64))


class HarmonicTable:
    """
    V values keyed by rounded coordinates, computed on first request.

    Lattice laws are served by the DP (shifted representation or truncated limit);
    other laws by the Monte Carlo truncated limit. Every Monte Carlo evaluation
    uses the same seed, so neighbouring points see common random numbers and
    differences of V are far less noisy than V itself. Points outside the cone
    map to 0 through `__call__`.

    A table loaded with `compute=False` only answers from its stored rows.

    Example:
        ```python
        table = HarmonicTable(cone, dist, master_seed=7)
        table.value((0.0, 2.0))
        table(points)  # vectorised, zero outside K
        ```
    """

    def __init__(
        self,
        cone: HarmonicCone,
        dist: IncrementDistribution,
        method: HarmonicMethod = HarmonicMethod.CORRECTED_REPRESENTATION,
        *,
        rel_tol: float | None = None,
        cap: int = DEFAULT_CAP,
        n0: int = 16,
        trials: int = 20_000,
        master_seed: int = 0,
        workers: int = 1,
        R: float | None = None,
        compute: bool = True,
    ):
        self.cone = cone
        self.dist = dist
        self.method = HarmonicMethod(method)
        if self.method is HarmonicMethod.CORRECTED_REPRESENTATION and not dist.is_lattice:
            logger.warning(
                f"{dist.label} has no lattice; V uses the Monte Carlo truncated limit instead"
            )
            self.method = HarmonicMethod.TRUNCATED_LIMIT
        self.rel_tol = rel_tol
        self.cap = cap
        self.n0 = n0
        self.trials = trials
        self.master_seed = master_seed
        self.workers = workers
        self.R = R
        self.compute = compute
        self._estimates: dict[tuple[float, ...], HarmonicEstimate] = {}

    def __len__(self) -> int:
        return len(self._estimates)

    def __contains__(self, x: npt.ArrayLike) -> bool:
        return _key(x) in self._estimates

    @property
    def estimates(self) -> list[HarmonicEstimate]:
        return list(self._estimates.values())

    def estimate(self, x: npt.ArrayLike) -> HarmonicEstimate:
        """
        The cached estimate at x, computing it if allowed.

        Raises:
            HarmonicValueUnavailableError: for a missing point in a read-only table
            OutsideConeError: if x is not strictly inside the cone
        """
        key = _key(x)
        if key in self._estimates:
            return self._estimates[key]
        if not self.compute:
            raise HarmonicValueUnavailableError(key)

        point = np.asarray(x, dtype=np.float64)
        if self.method is HarmonicMethod.CORRECTED_REPRESENTATION:
            estimate = corrected_V(
                self.cone,
                self.dist,
                point,
                R=self.R,
                n0=self.n0,
                cap=self.cap,
                rel_tol=self.rel_tol,
            )
        else:
            estimate = estimate_V(
                self.cone,
                self.dist,
                point,
                n0=self.n0,
                cap=self.cap,
                rel_tol=self.rel_tol,
                trials=self.trials,
                master_seed=self.master_seed,
                workers=self.workers,
            )
        self._estimates[key] = estimate
        logger.debug(f"V{key} = {estimate.value:.10g} ({len(self._estimates)} cached)")
        return estimate

    def value(self, x: npt.ArrayLike) -> float:
        return self.estimate(x).value

    def __call__(self, points: npt.ArrayLike) -> npt.NDArray[np.float64]:
        pts = np.asarray(points, dtype=np.float64).reshape(-1, self.cone.dimension)
        out = np.zeros(len(pts))
        for i, point in enumerate(pts):
            if self.cone.inside(point):
                out[i] = self.value(point)
        return out

    def fill(self, points: Iterable[npt.ArrayLike]) -> list[HarmonicEstimate]:
        return [self.estimate(p) for p in points]

    # --------------------------------------------------------------------- files

    def to_rows(self) -> list[dict[str, object]]:
        return [e.to_row(self.cone) for e in self._estimates.values()]

    def write_csv(self, path: Path, meta: OutputMeta) -> int:
        return write_csv(path, meta, HARMONIC_COLUMNS, self.to_rows())

    @classmethod
    def from_csv(
        cls,
        path: Path,
        cone: HarmonicCone,
        dist: IncrementDistribution,
        compute: bool = False,
        **options,
    ) -> "HarmonicTable":
        """
        Rebuild a table from a V-table CSV.

        Raises:
            CurveFileError: on missing columns or unparseable rows
        """
        _, rows = read_csv(path)
        table = cls(cone, dist, compute=compute, **options)
        for number, row in rows:
            try:
                estimate = HarmonicEstimate(
                    x=parse_point(row["x"]),
                    value=float(row["value"]),
                    std_error=float(row["std_error"]),
                    method=HarmonicMethod(row["method"]),
                    truncation_n=int(row["truncation_n"]),
                    convergence_history=((int(row["truncation_n"]), float(row["value"])),),
                    converged=row["converged"] == "true",
                )
            except (KeyError, ValueError) as e:
                raise CurveFileError(str(path), f"bad V-table row: {e}", number) from e
            table._estimates[_key(estimate.x)] = estimate
        logger.info(f"Loaded {len(table)} V values from {path}")
        return table


def harmonic_grid(
    cone: HarmonicCone,
    dist: IncrementDistribution,
    points: Sequence[npt.ArrayLike],
    ray: Sequence[float] = (),
    **options,
) -> HarmonicTable:
    """A table filled at the given points and at t * x0 for each t in `ray`."""
    table = HarmonicTable(cone, dist, **options)
    targets = [np.asarray(p, dtype=np.float64) for p in points]
    targets += [float(t) * cone.x0 for t in ray]
    for point in targets:
        table.estimate(point)
    logger.info(f"Harmonic grid on {cone.label}: {len(table)} points ({table.method.value})")
    return table
