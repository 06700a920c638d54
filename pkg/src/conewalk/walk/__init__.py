"""Monte Carlo engine: exit times, survival curves, truncated h and splitting."""

from .records import ExitRecord, SurvivalCurve
from .simulator import (
    BATCH_SIZE,
    Walker,
    estimate_free_h,
    estimate_survival,
    estimate_truncated_h,
    simulate_exit,
    translation_monotonicity,
)
from .splitting import estimate_survival_splitting, splitting_levels

__all__ = [
    "BATCH_SIZE",
    "ExitRecord",
    "SurvivalCurve",
    "Walker",
    "estimate_free_h",
    "estimate_survival",
    "estimate_survival_splitting",
    "estimate_truncated_h",
    "simulate_exit",
    "splitting_levels",
    "translation_monotonicity",
]
