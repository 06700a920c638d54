"""Tail exponent fits on survival curves.

P(tau_x > n) decays like n^(-p/2), so log P is linear in log n with slope -p/2.
Two estimators are provided: a weighted log-log regression over every horizon
past a cutoff, and the doubling ratio P(tau > 2n) / P(tau > n) -> 2^(-p/2).
"""

import logging
import math

import numpy as np
from pydantic import BaseModel, Field, computed_field, model_validator

from ..exceptions import MissingHorizonError, ZeroSurvivalMassError
from ..models.enums import FitMethod
from ..walk import SurvivalCurve

logger = logging.getLogger(__name__)

MIN_LOGLOG_POINTS = 3
# relative floor on the log-variance of one point; keeps the weights finite on flat curves
ROUGHNESS_FLOOR = 1e-16


class ExponentFit(BaseModel):
    """A fitted log-log slope; p_hat = -2 * slope."""

    slope: float = Field(description="Fitted slope of log P against log n")
    slope_stderr: float = Field(ge=0, description="Standard error of the slope")
    intercept: float = Field(description="Fitted log P at n = 1")
    horizons_used: list[int] = Field(description="Horizons entering the fit")
    method: FitMethod = Field(description="Estimator that produced the slope")

    @computed_field
    @property
    def p_hat(self) -> float:
        return -2.0 * self.slope

    @model_validator(mode="after")
    def _horizons_increasing(self):
        used = self.horizons_used
        if any(b <= a for a, b in zip(used, used[1:], strict=False)):
            raise ValueError(f"horizons_used must be strictly increasing, got {used}")
        if self.method is FitMethod.LOGLOG_FIT and len(used) < MIN_LOGLOG_POINTS:
            raise ValueError(f"a log-log fit needs at least {MIN_LOGLOG_POINTS} horizons")
        return self

    def deviation(self, p: int) -> float:
        """|slope + p/2|."""
        return abs(self.slope + p / 2.0)


class RatioSequence(BaseModel):
    """Doubling ratios (n, P(tau > 2n) / P(tau > n)) and the exponent of the last one."""

    pairs: list[tuple[int, float]] = Field(description="(n, ratio) for every doubled horizon")
    p_hat: float = Field(description="-2 log2 of the last ratio")
    p_hat_stderr: float = Field(default=0.0, ge=0, description="Standard error of p_hat")
    intercept: float = Field(default=0.0, description="log P(tau > 2n) - slope log 2n, last pair")

    def to_fit(self) -> ExponentFit:
        n_last = self.pairs[-1][0]
        return ExponentFit(
            slope=-self.p_hat / 2.0,
            slope_stderr=self.p_hat_stderr / 2.0,
            intercept=self.intercept,
            horizons_used=[n_last, 2 * n_last],
            method=FitMethod.RATIO,
        )


def _positive_points(curve: SurvivalCurve, min_horizon: int):
    keep = [i for i, n in enumerate(curve.horizons) if n >= max(min_horizon, 1)]
    for i in keep:
        if curve.estimates[i] <= 0.0:
            raise ZeroSurvivalMassError(curve.horizons[i])
    return keep


def fit_tail_exponent(curve: SurvivalCurve, min_horizon: int = 1) -> ExponentFit:
    """
    Weighted least squares of log P(tau > n) on log n over horizons >= min_horizon.

    Each point is weighted by the inverse of its delta-method variance
    (se / P)^2. Exact DP points have no sampling variance; every point then also
    carries a roughness floor, the mean squared second difference of log P over
    the fitted horizons divided by 6, which is the variance that would explain
    the observed curvature as noise.

    Raises:
        ZeroSurvivalMassError: if an estimate in range is zero
        MissingHorizonError: if fewer than three horizons are in range
    """
    keep = _positive_points(curve, min_horizon)
    if len(keep) < MIN_LOGLOG_POINTS:
        raise MissingHorizonError(
            f"log-log fit needs {MIN_LOGLOG_POINTS} horizons >= {min_horizon}, "
            f"curve has {len(keep)}"
        )

    log_n = np.log(curve.horizon_array[keep])
    log_p = np.log(curve.estimate_array[keep])
    variance = (curve.std_error_array[keep] / curve.estimate_array[keep]) ** 2

    roughness = float(np.mean(np.diff(log_p, 2) ** 2)) / 6.0 if len(keep) > 2 else 0.0
    variance = variance + max(roughness, ROUGHNESS_FLOOR)

    (slope, intercept), cov = np.polyfit(log_n, log_p, 1, w=1.0 / np.sqrt(variance), cov="unscaled")
    fit = ExponentFit(
        slope=float(slope),
        slope_stderr=float(math.sqrt(max(cov[0, 0], 0.0))),
        intercept=float(intercept),
        horizons_used=[curve.horizons[i] for i in keep],
        method=FitMethod.LOGLOG_FIT,
    )
    logger.info(
        f"Log-log fit on {curve.cone_label} from {curve.start}: slope {fit.slope:.4f} "
        f"+/- {fit.slope_stderr:.2g} over n in [{fit.horizons_used[0]}, {fit.horizons_used[-1]}]"
    )
    return fit


def ratio_exponent(curve: SurvivalCurve, min_horizon: int = 1) -> RatioSequence:
    """
    P(tau > 2n) / P(tau > n) for every n whose double is also a horizon.

    The exponent estimate is p_hat = -2 log2 of the last ratio. Its standard error
    combines both points' delta-method errors; on exact curves, where those are
    zero, the change in p_hat between the last two ratios stands in for it.

    Raises:
        MissingHorizonError: if no horizon has its double in the curve
        ZeroSurvivalMassError: if an estimate in range is zero
    """
    keep = _positive_points(curve, min_horizon)
    present = {curve.horizons[i]: i for i in keep}
    doubled = [n for n in present if 2 * n in present]
    if not doubled:
        raise MissingHorizonError(
            f"no horizon n >= {min_horizon} with 2n also present in {list(curve.horizons)}"
        )

    pairs = []
    for n in sorted(doubled):
        p1 = curve.estimates[present[n]]
        p2 = curve.estimates[present[2 * n]]
        pairs.append((n, p2 / p1))

    exponents = [-2.0 * math.log2(r) for _, r in pairs]
    n_last = pairs[-1][0]
    p1, s1 = curve.at(n_last)
    p2, s2 = curve.at(2 * n_last)
    stderr = 2.0 * math.hypot(s1 / p1, s2 / p2) / math.log(2.0)
    if stderr == 0.0 and len(exponents) > 1:
        stderr = abs(exponents[-1] - exponents[-2])

    slope = -exponents[-1] / 2.0
    return RatioSequence(
        pairs=pairs,
        p_hat=exponents[-1],
        p_hat_stderr=stderr,
        intercept=math.log(p2) - slope * math.log(2 * n_last),
    )
