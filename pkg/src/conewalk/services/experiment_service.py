"""Service running the experiments a RunConfig describes."""

import logging
from pathlib import Path
from typing import Any

import numpy as np

from .. import __version__
from ..algebra import HarmonicCone, make_cone
from ..exceptions import (
    ConfigValidationError,
    DPInfeasibleError,
    ErrorContext,
    InvalidDistributionError,
)
from ..harmonic import HarmonicTable, HTransformPath, sample_h_transform
from ..increments import IncrementDistribution, make_distribution, rng_stream
from ..io.tables import OutputMeta
from ..models import RunConfig, RunMethod, SamplerKind
from ..oracle import (
    LatticeMeasure,
    MeasureCache,
    dp_survival_measure,
    dp_survival_prob,
    estimate_dp_bytes,
    sample_conditioned_paths,
)
from ..walk import SurvivalCurve, estimate_survival, estimate_survival_splitting

logger = logging.getLogger(__name__)


class ExperimentService:
    """
    Builds the cone and law of a run config and runs its engines.

    The service holds no results: each method computes and returns them, and the
    commands decide what to write. Every random stream is derived from the
    config's seed and the index of the start it serves.
    """

    def __init__(self, config: RunConfig):
        """
        Initialize the ExperimentService.

        Raises:
            ConeConstructionError: if the cone section does not describe a harmonic cone
            InvalidDistributionError: if the distribution section is invalid
        """
        self.config = config
        self.cone: HarmonicCone = make_cone(config.cone)
        self.dist: IncrementDistribution = make_distribution(config.distribution)
        self.meta = OutputMeta(version=__version__, config_hash=config.config_hash())
        dimension = len(config.starts[0])
        if dimension != self.cone.dimension:
            raise ConfigValidationError(
                field="starts",
                value=config.starts[0],
                error_msg=f"points of dimension {dimension} for a cone of dimension "
                f"{self.cone.dimension}",
            )
        logger.info(
            f"Experiment on {self.cone.label} under {self.dist.label}: "
            f"{len(config.starts)} starts, horizons up to {config.horizons[-1]}"
        )

    @property
    def output_dir(self) -> Path:
        return self.config.output_dir

    @property
    def starts(self) -> list[np.ndarray]:
        return [np.asarray(x, dtype=np.float64) for x in self.config.starts]

    def measure_cache(self) -> MeasureCache:
        return MeasureCache(self.output_dir / ".cache")

    def survival_measure(self, x: np.ndarray, n: int) -> LatticeMeasure:
        """The DP survival measure at step n, through the on-disk cache."""
        self.check_dp_feasible(n)
        return self.measure_cache().get_or_compute(
            self.cone, x, self.dist, n, lambda: dp_survival_measure(self.cone, x, self.dist, n)
        )

    # ----------------------------------------------------------------- survival

    def check_dp_feasible(self, n: int) -> None:
        """
        Raises:
            DPInfeasibleError: if the DP to step n would exceed max_dp_bytes
            NonLatticeDistributionError: if the law has no lattice
        """
        required = estimate_dp_bytes(self.cone, self.dist, n)
        if required > self.config.max_dp_bytes:
            raise DPInfeasibleError(required, self.config.max_dp_bytes, self.cone.label)
        logger.debug(f"DP to n={n} needs about {required / 2**20:.1f} MiB")

    def survival_curves(self, method: RunMethod | None = None) -> list[SurvivalCurve]:
        """One survival curve per start with the configured (or given) engine."""
        config = self.config
        method = RunMethod(method or config.method)
        if method is RunMethod.DP:
            self.dist.require_lattice("DP survival")
            self.check_dp_feasible(config.horizons[-1])

        curves = []
        for stream, x in enumerate(self.starts):
            with ErrorContext(f"{method.value} survival from {tuple(x)}", logger_instance=logger):
                if method is RunMethod.DP:
                    curve = dp_survival_prob(self.cone, x, self.dist, config.horizons)
                elif method is RunMethod.MC:
                    curve = estimate_survival(
                        self.cone,
                        x,
                        self.dist,
                        config.horizons,
                        config.trials,
                        config.seed,
                        config.workers,
                        stream,
                    )
                else:
                    curve = estimate_survival_splitting(
                        self.cone,
                        x,
                        self.dist,
                        config.horizons,
                        config.particles,
                        config.seed,
                        stream,
                    )
            curves.append(curve)
        return curves

    @staticmethod
    def summary_record(curve: SurvivalCurve) -> dict[str, Any]:
        n = curve.horizons[-1]
        estimate, error = curve.at(n)
        return {
            "type": "curve",
            "cone_label": curve.cone_label,
            "x": list(curve.start),
            "method": curve.method.value,
            "horizons": list(curve.horizons),
            "n_max": n,
            "estimate": estimate,
            "std_error": error,
            "trials": curve.trials,
            "extinct_from": curve.extinct_from,
        }

    # ----------------------------------------------------------------- harmonic

    def harmonic_table(self, R: float | None = None, cap: int | None = None) -> HarmonicTable:
        settings = self.config.harmonic
        return HarmonicTable(
            self.cone,
            self.dist,
            settings.method,
            rel_tol=settings.rel_tol,
            cap=cap or settings.cap,
            n0=settings.n0,
            trials=settings.trials,
            master_seed=self.config.seed,
            workers=self.config.workers,
            R=R,
        )

    def harmonic_points(self) -> list[np.ndarray]:
        settings = self.config.harmonic
        grid = settings.grid if settings.grid is not None else self.config.starts
        points = [np.asarray(p, dtype=np.float64) for p in grid]
        return points + [float(t) * self.cone.x0 for t in settings.ray]

    def harmonic_tables(self) -> dict[float | None, HarmonicTable]:
        """The main V table and one per extra shift radius, filled on the configured grid."""
        radii: list[float | None] = [None, *self.config.harmonic.R_values]
        tables = {}
        for R in radii:
            table = self.harmonic_table(R)
            with ErrorContext(f"V table (R={R})", logger_instance=logger):
                table.fill(self.harmonic_points())
            tables[R] = table
        return tables

    # ----------------------------------------------------------------- sampling

    def sample_paths(self) -> list[dict[str, Any]]:
        """
        Paths from the configured sampler, `paths` per start.

        Raises:
            NonLatticeDistributionError: conditioned sampling of a non-lattice law
            InvalidDistributionError: h-transform without envelope for a law of infinite support
        """
        settings = self.config.sample
        records: list[dict[str, Any]] = []
        if settings.sampler is SamplerKind.CONDITIONED:
            self.check_dp_feasible(settings.length)
            for stream, x in enumerate(self.starts):
                rng = rng_stream(self.config.seed, stream)
                paths = sample_conditioned_paths(
                    self.cone, x, self.dist, settings.length, settings.paths, rng
                )
                for index, path in enumerate(paths):
                    records.append(self._path_record(stream, index, path))
            return records

        if not self.dist.is_finite and settings.envelope is None:
            raise InvalidDistributionError(
                self.dist.label, "set sample.envelope to use the h-transform sampler"
            )
        table = self.harmonic_table(cap=settings.condition_n)
        for stream, x in enumerate(self.starts):
            for index in range(settings.paths):
                rng = rng_stream(self.config.seed, stream, index)
                path: HTransformPath = sample_h_transform(
                    self.cone, self.dist, x, table, settings.length, rng, settings.envelope
                )
                record = self._path_record(stream, index, path.points)
                record["acceptance_rate"] = path.acceptance_rate
                records.append(record)
        logger.info(f"h-transform sampling used {len(table)} V values")
        return records

    def _path_record(self, stream: int, index: int, points: np.ndarray) -> dict[str, Any]:
        return {
            "type": "path",
            "sampler": self.config.sample.sampler.value,
            "start": stream,
            "index": index,
            "points": [[float(c) for c in row] for row in points],
        }
