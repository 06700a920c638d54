"""Run configuration model.

A run configuration is the reviewable record of an experiment: the cone, the
step law, starting points, horizons, engine and budgets, plus the seed and
worker count that make it reproducible. Three optional sections tune the
harmonic, verify and sample commands.
"""

import json
from pathlib import Path
import sys
from typing import Any

if sys.version_info >= (3, 11):
    from typing import Self
else:
    from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator

from ..io.persistence import PydanticPersistence
from ..utils import sha256_hex
from .enums import HarmonicMethod, RunMethod, SamplerKind
from .specs import ConeSpec, DistributionSpec

Point = list[float]

# Criteria understood by the verify pipeline, in report order.
VERIFY_CRITERIA = (
    "exponent_loglog",
    "exponent_ratio",
    "methods_agree",
    "proportionality",
    "endpoint_tv",
    "near_boundary",
    "global_bound",
    "harmonicity",
)


class HarmonicSettings(BaseModel):
    """Options for `conewalk harmonic` and the harmonicity criterion."""

    model_config = ConfigDict(extra="forbid")

    method: HarmonicMethod = Field(
        default=HarmonicMethod.CORRECTED_REPRESENTATION, description="Estimator used for V"
    )
    grid: list[Point] | None = Field(
        default=None, description="Points at which to estimate V (defaults to the run's starts)"
    )
    ray: list[float] = Field(
        default_factory=list, description="Extra grid points t * x0 for each listed t"
    )
    R_values: list[float] = Field(
        default_factory=list,
        description="Additional shift radii for the corrected representation (R-independence)",
    )
    rel_tol: float | None = Field(
        default=None, gt=0, description="Convergence tolerance on V (default 1e-6 DP, 1e-3 MC)"
    )
    cap: int = Field(default=2**14, ge=1, description="Largest DP step used by the series")
    n0: int = Field(default=16, ge=1, description="First horizon of the doubling schedule")
    trials: int = Field(
        default=20_000, ge=1, description="MC trials per horizon (non-lattice laws)"
    )


class VerifySettings(BaseModel):
    """Tolerances and criterion selection for `conewalk verify`."""

    model_config = ConfigDict(extra="forbid")

    criteria: list[str] | None = Field(
        default=None, description=f"Subset of {', '.join(VERIFY_CRITERIA)} (default: all)"
    )
    fit_from: int = Field(default=64, ge=1, description="Smallest horizon used by exponent fits")
    slope_tolerance: float = Field(default=0.10, gt=0, description="Allowed |slope + p/2|")
    ratio_tolerance: float = Field(default=0.10, gt=0, description="Allowed |p_hat/2 - p/2|")
    proportionality_tolerance: float = Field(
        default=0.05, gt=0, description="Allowed relative spread of n^(p/2) P / V"
    )
    tv_tolerance: float = Field(default=0.05, gt=0, description="Allowed endpoint TV distance")
    tv_horizon: int | None = Field(
        default=None, ge=1, description="Horizon of the endpoint law (default: largest horizon)"
    )
    near_boundary_points: list[Point] | None = Field(
        default=None, description="Starts used by the near-boundary bound (default: starts)"
    )
    near_boundary_tolerance: float = Field(
        default=0.10, gt=0, description="Allowed relative drift of sqrt(n) P / delta"
    )
    global_bound_tolerance: float = Field(
        default=0.10,
        gt=0,
        description="Allowed growth of n^(p/2) P / h(x + R x0) over the last doubling",
    )
    harmonic_tolerance: float = Field(
        default=1e-6, gt=0, description="Allowed one-step harmonicity residual"
    )

    @field_validator("criteria")
    @classmethod
    def _known_criteria(cls, criteria: list[str] | None):
        if criteria is None:
            return criteria
        unknown = sorted(set(criteria) - set(VERIFY_CRITERIA))
        if unknown:
            raise ValueError(f"unknown criteria {unknown}, expected a subset of {VERIFY_CRITERIA}")
        return criteria

    def selected(self) -> list[str]:
        return [c for c in VERIFY_CRITERIA if self.criteria is None or c in self.criteria]


class SampleSettings(BaseModel):
    """Options for `conewalk sample`."""

    model_config = ConfigDict(extra="forbid")

    sampler: SamplerKind = Field(default=SamplerKind.CONDITIONED, description="Path sampler")
    paths: int = Field(default=100, ge=1, description="Number of paths to draw")
    length: int = Field(default=16, ge=1, description="Steps per path")
    condition_n: int = Field(
        default=4096, ge=1, description="DP truncation used to tabulate V for the h-transform"
    )
    envelope: float | None = Field(
        default=None, gt=0, description="Rejection envelope M (required for non-finite laws)"
    )


class RunConfig(BaseModel):
    """One experiment: what to simulate, how, and with which seed."""

    model_config = ConfigDict(extra="forbid")

    cone: ConeSpec = Field(description="Cone by Weyl family or explicit forms")
    distribution: DistributionSpec = Field(description="Step law")
    starts: list[Point] = Field(min_length=1, description="Starting points inside the cone")
    horizons: list[int] = Field(min_length=1, description="Strictly increasing step counts")
    method: RunMethod = Field(default=RunMethod.DP, description="Survival engine")
    trials: int = Field(default=100_000, ge=1, description="Monte Carlo trajectories per start")
    particles: int = Field(default=10_000, ge=100, description="Splitting particle budget")
    seed: int = Field(ge=0, description="Master seed (mandatory)")
    workers: int = Field(ge=1, description="Worker threads (mandatory)")
    output_dir: Path = Field(default=Path("conewalk-out"), description="Directory for outputs")
    max_dp_bytes: int = Field(
        default=4 * 2**30, ge=1, description="Memory ceiling for one DP measure (bytes)"
    )
    harmonic: HarmonicSettings = Field(default_factory=HarmonicSettings)
    verify: VerifySettings = Field(default_factory=VerifySettings)
    sample: SampleSettings = Field(default_factory=SampleSettings)

    @field_validator("horizons")
    @classmethod
    def _strictly_increasing(cls, horizons: list[int]):
        if any(n < 0 for n in horizons):
            raise ValueError("horizons must be non-negative")
        if any(b <= a for a, b in zip(horizons, horizons[1:], strict=False)):
            raise ValueError(f"horizons must be strictly increasing, got {horizons}")
        return horizons

    @field_validator("starts")
    @classmethod
    def _equal_dimensions(cls, starts: list[Point]):
        if len({len(s) for s in starts}) != 1:
            raise ValueError("all starting points must have the same dimension")
        return starts

    @field_serializer("output_dir")
    def serialize_path(self, path: Path) -> str:
        """Serialize Path to string."""
        return str(path)

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON of this config.

        The output directory is left out so that the same experiment written to two
        places produces identical files.
        """
        payload = self.model_dump(mode="json", exclude={"output_dir"})
        return sha256_hex(json.dumps(payload, sort_keys=True, separators=(",", ":")))

    @classmethod
    def load(cls, path: Path, overrides: dict[str, Any] | None = None) -> Self:
        """
        Load a run config, merging CLI overrides into the raw JSON before validation.

        Raises:
            FileNotFoundError: If the file doesn't exist
            ConfigFileInvalidError: If the file has invalid JSON syntax
            ConfigValidationError: If values fail validation (including a missing seed)
        """
        return PydanticPersistence.load_json(path, cls, overrides=overrides)
