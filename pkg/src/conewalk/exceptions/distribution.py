"""Step distribution exceptions.

- DistributionError: Base class for distribution errors
- InvalidDistributionError: Unknown kind or parameter out of range
- MomentUnavailableError: Requested moment is infinite or undefined
- NonLatticeDistributionError: Lattice-only operation called on a non-lattice law
"""

from .base import ConeWalkError


class DistributionError(ConeWalkError):
    """Step distribution construction or query failed."""

    def __init__(self, user_message: str, kind: str | None = None, **kwargs):
        """
        Initialize distribution error.

        Args:
            user_message: User-friendly error message
            kind: Distribution kind tag (if known)
        """
        super().__init__(user_message, **kwargs)
        self.kind = kind


class InvalidDistributionError(DistributionError):
    """Distribution spec is malformed or a parameter is out of range."""

    def __init__(self, kind: str, reason: str):
        super().__init__(
            user_message=f"Invalid {kind} distribution: {reason}",
            kind=kind,
            recoverable=True,
            recovery_hint="lazy_rademacher needs 0 < q < 1, pareto_std needs a > 2, "
            "discrete tables need positive probabilities summing to 1",
        )


class MomentUnavailableError(DistributionError):
    """The k-th moment is infinite or undefined for this law."""

    def __init__(self, kind: str, order: int, tail_index: float):
        super().__init__(
            user_message=f"Moment of order {order} is unavailable for {kind} "
            f"(finite only below order {tail_index:g})",
            kind=kind,
            technical_message=f"moment({kind}, {order}) requested with tail index {tail_index}",
        )
        self.order = order
        self.tail_index = tail_index


class NonLatticeDistributionError(DistributionError):
    """An exact lattice computation was requested for a continuous law."""

    def __init__(self, kind: str, operation: str):
        super().__init__(
            user_message=f"{operation} needs a lattice step law, {kind} is not one",
            kind=kind,
            recoverable=True,
            recovery_hint="Use Monte Carlo (method 'mc' or 'splitting') for non-lattice laws",
        )
        self.operation = operation
