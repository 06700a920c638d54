"""Estimation, oracle and verification exceptions.

- EstimationError: Base class for failures in the numerical engines
- InvalidBudgetError: trials, particles or sample budgets out of range
- ZeroSurvivalMassError: Conditioning on an event of probability zero
- BudgetExceededError: Enumeration or exact DP beyond its hard cap
- DPInfeasibleError: DP state space would not fit in memory
- HarmonicValueUnavailableError: V missing at a reachable point
- EnvelopeViolationError: Rejection sampler envelope too small
- MissingHorizonError: Horizon structure unsuitable for an analysis
- VerificationFailedError: At least one verification criterion failed
"""

from collections.abc import Sequence

from .base import ConeWalkError


class EstimationError(ConeWalkError):
    """A numerical engine could not produce an estimate."""

    pass


class InvalidBudgetError(EstimationError):
    """A sample or particle budget is below its minimum."""

    def __init__(self, name: str, value: int, minimum: int):
        super().__init__(
            user_message=f"{name} must be at least {minimum}, got {value}",
            recoverable=True,
            recovery_hint=f"Increase '{name}' in the run configuration",
        )
        self.name = name
        self.value = value
        self.minimum = minimum


class ZeroSurvivalMassError(EstimationError):
    """The survival event has zero probability, so conditioning is undefined."""

    def __init__(self, n: int):
        super().__init__(
            user_message=f"No surviving mass at step {n}; the conditioned law is undefined",
            context={"n": n},
        )
        self.n = n


class BudgetExceededError(EstimationError):
    """An exhaustive computation exceeds its hard size cap."""

    def __init__(self, what: str, required: float, cap: float):
        super().__init__(
            user_message=f"{what} needs {required:.3g} units, cap is {cap:.3g}",
            recoverable=True,
            recovery_hint="Use a smaller horizon or switch to the floating-point DP",
        )
        self.required = required
        self.cap = cap


class DPInfeasibleError(EstimationError):
    """The DP state space is too large for the configured memory limit."""

    exit_code = 2

    def __init__(self, required_bytes: float, limit_bytes: float, label: str):
        super().__init__(
            user_message=f"DP for {label} would need about {required_bytes / 2**30:.2f} GiB "
            f"(limit {limit_bytes / 2**30:.2f} GiB)",
            recoverable=True,
            recovery_hint="Lower the horizons, raise 'max_dp_bytes', or use method 'splitting'",
            context={"required_bytes": int(required_bytes), "limit_bytes": int(limit_bytes)},
        )
        self.required_bytes = required_bytes
        self.limit_bytes = limit_bytes


class HarmonicValueUnavailableError(EstimationError):
    """A V lookup has no value at a point it was asked about."""

    def __init__(self, point: Sequence[float]):
        coords = ", ".join(f"{float(c):g}" for c in point)
        super().__init__(
            user_message=f"No harmonic value available at ({coords})",
            recovery_hint="Extend the V table to every one-step neighbour of the query point",
        )
        self.point = tuple(float(c) for c in point)


class EnvelopeViolationError(EstimationError):
    """A rejection step saw an acceptance ratio above one."""

    def __init__(self, ratio: float, envelope: float, point: Sequence[float]):
        coords = ", ".join(f"{float(c):g}" for c in point)
        super().__init__(
            user_message=f"Envelope M={envelope:g} too small at ({coords}): ratio {ratio:.6g} > 1",
            technical_message=f"h-transform rejection ratio {ratio!r} with M={envelope!r} "
            f"at ({coords})",
            recoverable=True,
            recovery_hint="Raise the envelope M or let the sampler derive it from the support",
        )
        self.ratio = ratio
        self.envelope = envelope


class MissingHorizonError(EstimationError):
    """The curve's horizons do not support the requested analysis."""

    def __init__(self, reason: str):
        super().__init__(user_message=f"Unsuitable horizons: {reason}", recoverable=True)


class VerificationFailedError(ConeWalkError):
    """One or more verification criteria reported FAIL."""

    exit_code = 3

    def __init__(self, failed: Sequence[str]):
        names = ", ".join(failed)
        super().__init__(
            user_message=f"Verification failed: {names}",
            recovery_hint="See report.json in the output directory for fitted values",
        )
        self.failed = list(failed)
