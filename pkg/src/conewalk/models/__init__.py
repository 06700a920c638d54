"""Pydantic configuration models and shared enumerations."""

from .config import (
    VERIFY_CRITERIA,
    HarmonicSettings,
    RunConfig,
    SampleSettings,
    VerifySettings,
)
from .enums import (
    DistributionKind,
    FitMethod,
    HarmonicMethod,
    RunMethod,
    SamplerKind,
    SurvivalMethod,
    WeylFamily,
)
from .specs import ConeSpec, DistributionSpec

__all__ = [
    "VERIFY_CRITERIA",
    "ConeSpec",
    "DistributionKind",
    "DistributionSpec",
    "FitMethod",
    "HarmonicMethod",
    "HarmonicSettings",
    "RunConfig",
    "RunMethod",
    "SampleSettings",
    "SamplerKind",
    "SurvivalMethod",
    "VerifySettings",
    "WeylFamily",
]
