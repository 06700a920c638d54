"""CLI commands for conewalk."""

from .configs import configs
from .harmonic import harmonic
from .sample import sample
from .survival import survival
from .verify import verify

__all__ = ["configs", "harmonic", "sample", "survival", "verify"]
