"""Service running the verification criteria of a run config."""

import logging
import math
from collections.abc import Callable

import numpy as np

from ..asymptotics import (
    CriterionResult,
    ExponentFit,
    StartFits,
    VerificationReport,
    endpoint_density_distance,
    estimate_kappa,
    fit_tail_exponent,
    global_tail_bound,
    near_boundary_profile,
    proportionality_check,
    ratio_exponent,
    relative_drift,
    target_cell_masses,
)
from ..exceptions import collect_errors
from ..harmonic import HarmonicTable, harmonicity_residual
from ..oracle import LatticeMeasure, endpoint_law_from_measure
from ..walk import SurvivalCurve
from .experiment_service import ExperimentService

logger = logging.getLogger(__name__)


class VerificationService:
    """
    Runs each selected criterion independently and collects a VerificationReport.

    A criterion that raises is recorded as FAIL with the error message, and the
    remaining criteria still run. Quantities shared by several criteria (fits, V
    at the starts) are computed once, on first use.
    """

    def __init__(self, experiment: ExperimentService, curves: list[SurvivalCurve] | None = None):
        self.experiment = experiment
        self.config = experiment.config
        self.settings = experiment.config.verify
        self.cone = experiment.cone
        self.dist = experiment.dist
        self.p = self.cone.degree_p
        self._curves = curves
        self._fits: list[StartFits] | None = None
        self._table: HarmonicTable | None = None
        self.endpoint_measures: dict[int, LatticeMeasure] = {}

    @property
    def curves(self) -> list[SurvivalCurve]:
        if self._curves is None:
            self._curves = self.experiment.survival_curves()
        return self._curves

    @property
    def table(self) -> HarmonicTable:
        if self._table is None:
            self._table = self.experiment.harmonic_table()
        return self._table

    # ------------------------------------------------------------------ fits

    @property
    def fits(self) -> list[StartFits]:
        if self._fits is None:
            self._fits = [self._start_fits(curve) for curve in self.curves]
        return self._fits

    def _start_fits(self, curve: SurvivalCurve) -> StartFits:
        fits = StartFits(x=list(curve.start))
        collector = collect_errors(f"fits from {curve.start}")
        with collector.try_operation("loglog"):
            fits.loglog = fit_tail_exponent(curve, self.settings.fit_from)
        with collector.try_operation("ratio"):
            fits.ratio = ratio_exponent(curve, self.settings.fit_from).to_fit()
        return fits

    def fit_rows(self) -> list[dict[str, object]]:
        """Rows for fits.csv."""
        rows = []
        for curve, fits in zip(self.curves, self.fits, strict=True):
            for fit in (fits.loglog, fits.ratio):
                if fit is None:
                    continue
                rows.append(
                    {
                        "cone_label": self.cone.label,
                        "x": curve.start,
                        "method": fit.method.value,
                        "slope": fit.slope,
                        "slope_stderr": fit.slope_stderr,
                        "intercept": fit.intercept,
                        "p_hat": fit.p_hat,
                        "target_p": self.p,
                    }
                )
        return rows

    # ------------------------------------------------------------- criteria

    def _exponent_loglog(self) -> CriterionResult:
        fits = [f.loglog for f in self.fits]
        if any(f is None for f in fits):
            raise ValueError("a log-log fit failed; see the log for the reason")
        return self._exponent_result("exponent_loglog", fits, self.settings.slope_tolerance)

    def _exponent_ratio(self) -> CriterionResult:
        fits = [f.ratio for f in self.fits]
        if any(f is None for f in fits):
            raise ValueError("a doubling ratio is missing; horizons need n and 2n")
        return self._exponent_result("exponent_ratio", fits, self.settings.ratio_tolerance)

    def _exponent_result(
        self, name: str, fits: list[ExponentFit | None], tolerance: float
    ) -> CriterionResult:
        deviations = [f.deviation(self.p) for f in fits if f is not None]
        values = {f"p_hat_{i}": f.p_hat for i, f in enumerate(fits) if f is not None}
        values["target_p"] = float(self.p)
        values["max_deviation"] = max(deviations)
        return CriterionResult(
            name=name,
            passed=max(deviations) <= tolerance,
            detail=f"max |slope + p/2| = {max(deviations):.4g} (tolerance {tolerance:g})",
            values=values,
        )

    def _methods_agree(self) -> CriterionResult:
        gaps, allowed = [], []
        for fits in self.fits:
            if fits.loglog is None or fits.ratio is None:
                raise ValueError("both exponent fits are needed")
            gaps.append(abs(fits.loglog.slope - fits.ratio.slope))
            joint = 3.0 * math.hypot(fits.loglog.slope_stderr, fits.ratio.slope_stderr)
            allowed.append(max(joint, self.settings.slope_tolerance))
        passed = all(g <= a for g, a in zip(gaps, allowed, strict=True))
        return CriterionResult(
            name="methods_agree",
            passed=passed,
            detail=f"max slope gap {max(gaps):.4g}",
            values={f"gap_{i}": g for i, g in enumerate(gaps)},
        )

    def _proportionality(self) -> CriterionResult:
        V = [self.table.value(curve.start) for curve in self.curves]
        check = proportionality_check(self.curves, V, self.p)
        for fits, curve, v in zip(self.fits, self.curves, V, strict=True):
            fits.kappa = estimate_kappa(curve, v, self.p)
        tolerance = self.settings.proportionality_tolerance
        return CriterionResult(
            name="proportionality",
            passed=check.spread <= tolerance,
            detail=f"spread {check.spread:.4g} at n={check.horizon} over {len(V)} starts "
            f"(tolerance {tolerance:g}); kappa ~ {check.kappa:.6g}",
            values={"spread": check.spread, "kappa": check.kappa, "horizon": check.horizon},
        )

    def _endpoint_tv(self) -> CriterionResult:
        if not self.dist.is_lattice:
            return CriterionResult(
                name="endpoint_tv",
                passed=True,
                skipped=True,
                detail=f"needs the DP endpoint law; {self.dist.label} has no lattice",
            )
        n = self.settings.tv_horizon or self.config.horizons[-1]
        x = self.experiment.starts[0]
        horizons = [n // 4, n] if n >= 4 else [n]

        target = None
        distances = {}
        for m in horizons:
            measure = self.experiment.survival_measure(x, m)
            self.endpoint_measures[m] = measure
            law = endpoint_law_from_measure(self.cone, measure)
            if target is None:
                target = target_cell_masses(self.cone, law.basis)
            distances[m] = endpoint_density_distance(law, self.cone, target=target)

        tv = distances[n]
        decreasing = len(horizons) == 1 or distances[n] < distances[horizons[0]]
        tolerance = self.settings.tv_tolerance
        return CriterionResult(
            name="endpoint_tv",
            passed=tv <= tolerance and decreasing,
            detail=f"TV {tv:.4g} at n={n} (tolerance {tolerance:g})"
            + ("" if len(horizons) == 1 else f", {distances[horizons[0]]:.4g} at n={n // 4}"),
            values={f"tv_{m}": d for m, d in distances.items()},
        )

    def _near_boundary(self) -> CriterionResult:
        xs = self.settings.near_boundary_points or self.config.starts
        horizons = [n for n in self.config.horizons if n >= self.settings.fit_from][-3:]
        if not horizons:
            horizons = self.config.horizons[-3:]
        if self.dist.is_lattice:
            self.experiment.check_dp_feasible(horizons[-1])
        profile = near_boundary_profile(
            self.cone,
            self.dist,
            [np.asarray(x, dtype=np.float64) for x in xs],
            horizons,
            self.config.trials,
            self.config.seed,
            self.config.workers,
        )
        drift = relative_drift(profile)
        tolerance = self.settings.near_boundary_tolerance
        return CriterionResult(
            name="near_boundary",
            passed=math.isfinite(drift) and drift <= tolerance,
            detail=f"relative drift {drift:.4g} of sqrt(n) P / delta over n in {horizons}",
            values={f"sup_{n}": s for n, s in profile.items()},
        )

    def _global_bound(self) -> CriterionResult:
        growth = []
        values = {}
        for i, curve in enumerate(self.curves):
            bound = global_tail_bound(self.cone, curve)
            sequence = list(bound.values())
            values[f"sup_{i}"] = max(sequence)
            if len(sequence) >= 2 and sequence[-2] > 0:
                growth.append(sequence[-1] / sequence[-2] - 1.0)
        tolerance = self.settings.global_bound_tolerance
        worst = max(growth, default=0.0)
        return CriterionResult(
            name="global_bound",
            passed=worst <= tolerance,
            detail=f"largest last-step growth of n^(p/2) P / h(x + R x0): {worst:.4g}",
            values=values,
        )

    def _harmonicity(self) -> CriterionResult:
        if not self.dist.is_lattice:
            return CriterionResult(
                name="harmonicity",
                passed=True,
                skipped=True,
                detail="a 1e-6 residual needs the DP estimators of V",
            )
        residuals = [
            harmonicity_residual(self.cone, self.dist, x, self.table)
            for x in self.experiment.starts
        ]
        tolerance = self.settings.harmonic_tolerance
        return CriterionResult(
            name="harmonicity",
            passed=max(residuals) <= tolerance,
            detail=f"max one-step residual {max(residuals):.3g} (tolerance {tolerance:g})",
            values={f"residual_{i}": r for i, r in enumerate(residuals)},
        )

    # ------------------------------------------------------------------ run

    def run(self) -> VerificationReport:
        checks: dict[str, Callable[[], CriterionResult]] = {
            "exponent_loglog": self._exponent_loglog,
            "exponent_ratio": self._exponent_ratio,
            "methods_agree": self._methods_agree,
            "proportionality": self._proportionality,
            "endpoint_tv": self._endpoint_tv,
            "near_boundary": self._near_boundary,
            "global_bound": self._global_bound,
            "harmonicity": self._harmonicity,
        }
        # engine failures (infeasible DP, bad starts) abort the whole run
        fits = self.fits
        collector = collect_errors("verify")
        results = []
        for name in self.settings.selected():
            with collector.try_operation(name):
                results.append(checks[name]())
            error = collector.failed(name)
            if error is not None:
                results.append(CriterionResult(name=name, passed=False, detail=f"error: {error}"))

        report = VerificationReport(
            version=self.experiment.meta.version,
            config_hash=self.experiment.meta.config_hash,
            cone_label=self.cone.label,
            distribution=self.dist.label,
            target_p=self.p,
            criteria=results,
            starts=fits,
        )
        for name in report.failed():
            logger.warning(f"Criterion {name} failed: {report.criterion(name).detail}")
        logger.info(collector.get_summary())
        return report
