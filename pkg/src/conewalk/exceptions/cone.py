"""Cone construction and geometry exceptions.

- ConeError: Base class for cone errors
- DegenerateFormError: A linear form with all-zero coefficients
- NotHarmonicError: The product of the forms has a nonzero Laplacian
- ConeConstructionError: Forms are inconsistent or cut out an empty cone
- OutsideConeError: A point that must be interior is not
"""

from collections.abc import Sequence
from typing import Any

from .base import ConeWalkError


class ConeError(ConeWalkError):
    """A cone could not be built or a point violates its geometry."""

    def __init__(self, user_message: str, label: str | None = None, **kwargs):
        """
        Initialize cone error.

        Args:
            user_message: User-friendly error message
            label: Label of the cone involved (if known)
        """
        super().__init__(user_message, **kwargs)
        self.label = label


class DegenerateFormError(ConeError):
    """A linear form has no nonzero coefficient."""

    def __init__(self, index: int | None = None):
        which = f" #{index}" if index is not None else ""
        super().__init__(
            user_message=f"Linear form{which} has all coefficients equal to zero",
            recoverable=True,
            recovery_hint="Every form must have at least one nonzero coefficient",
        )
        self.index = index


class ConeConstructionError(ConeError):
    """The forms cannot define a cone (mixed dimensions, empty interior, bad R)."""

    def __init__(self, reason: str, label: str | None = None, residual: Any = None):
        super().__init__(
            user_message=f"Cannot build cone: {reason}",
            label=label,
            technical_message=f"Cone {label or '<unnamed>'} rejected: {reason}",
            recoverable=True,
            recovery_hint="Check the form coefficients in the cone specification",
        )
        self.reason = reason
        self.residual = residual


class NotHarmonicError(ConeConstructionError):
    """The expanded product of the forms is not harmonic."""

    def __init__(self, residual: Any, label: str | None = None):
        super().__init__(
            reason=f"product of forms is not harmonic, Laplacian = {residual}",
            label=label,
            residual=residual,
        )


class OutsideConeError(ConeError):
    """A point required to lie strictly inside the cone does not."""

    def __init__(self, point: Sequence[float], label: str | None = None):
        coords = ", ".join(f"{float(c):g}" for c in point)
        super().__init__(
            user_message=f"Point ({coords}) is not strictly inside cone {label or ''}".rstrip(),
            label=label,
            recoverable=True,
            recovery_hint="Starting points and grid points must satisfy every form strictly",
        )
        self.point = tuple(float(c) for c in point)
