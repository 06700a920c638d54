"""On-disk reuse and CSV export of survival measures.

Cached measures are `numpy.savez_compressed` archives named by the SHA-256 of
(cone forms, law, start, n, mode). Only float measures are cached; exact runs are
small enough to recompute.
"""

import json
import logging
from collections.abc import Callable
from pathlib import Path

import numpy as np
import numpy.typing as npt

from ..algebra import HarmonicCone
from ..increments import IncrementDistribution
from ..io.tables import OutputMeta, write_csv
from ..utils import stable_key
from .lattice import LatticeMeasure

logger = logging.getLogger(__name__)


def measure_key(
    cone: HarmonicCone, dist: IncrementDistribution, x: npt.ArrayLike, n: int, mode: str = "float"
) -> str:
    forms = [[str(c) for c in f.coefficients] for f in cone.forms]
    start = [float(c) for c in np.asarray(x, dtype=np.float64)]
    return stable_key(forms, dist.cache_key, start, int(n), mode)


class MeasureCache:
    """
    Directory of cached survival measures.

    Example:
        ```python
        cache = MeasureCache(out_dir / ".cache")
        measure = cache.get_or_compute(cone, x, dist, 256, lambda: dp_survival_measure(...))
        ```
    """

    def __init__(self, directory: Path):
        self.directory = directory

    def path_for(self, key: str) -> Path:
        return self.directory / f"{key}.npz"

    def load(self, key: str) -> LatticeMeasure | None:
        path = self.path_for(key)
        if not path.exists():
            return None
        try:
            with np.load(path, allow_pickle=False) as archive:
                meta = json.loads(str(archive["meta"]))
                masses = archive["masses"].copy()
        except (OSError, KeyError, ValueError) as e:
            logger.warning(f"Ignoring unreadable cache entry {path}: {e}")
            return None
        logger.debug(f"Cache hit {key[:12]} (n={meta['step_index']})")
        return LatticeMeasure(
            step_index=int(meta["step_index"]),
            origin=tuple(meta["origin"]),
            mesh=float(meta["mesh"]),
            offset=float(meta["offset"]),
            reduced=bool(meta["reduced"]),
            lo=tuple(meta["lo"]),
            masses=masses,
        )

    def store(self, key: str, measure: LatticeMeasure) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        meta = {
            "step_index": measure.step_index,
            "origin": list(measure.origin),
            "mesh": measure.mesh,
            "offset": measure.offset,
            "reduced": measure.reduced,
            "lo": list(measure.lo),
        }
        path = self.path_for(key)
        np.savez_compressed(path, masses=measure.masses, meta=np.array(json.dumps(meta)))
        logger.debug(f"Cached measure {key[:12]} at {path}")
        return path

    def get_or_compute(
        self,
        cone: HarmonicCone,
        x: npt.ArrayLike,
        dist: IncrementDistribution,
        n: int,
        compute: Callable[[], LatticeMeasure],
    ) -> LatticeMeasure:
        key = measure_key(cone, dist, x, n)
        measure = self.load(key)
        if measure is None:
            measure = compute()
            self.store(key, measure)
        return measure


def write_measure_csv(path: Path, meta: OutputMeta, measure: LatticeMeasure) -> int:
    """One row per non-zero state: point coordinates, then the mass."""
    points = measure.points()
    d = points.shape[1] if points.ndim == 2 else len(measure.origin)
    columns = [f"y{i + 1}" for i in range(d)] + ["mass"]
    rows = (
        {**{f"y{i + 1}": float(p[i]) for i in range(d)}, "mass": float(m)}
        for p, m in zip(points, measure.weights(), strict=True)
    )
    return write_csv(path, meta, columns, rows)
