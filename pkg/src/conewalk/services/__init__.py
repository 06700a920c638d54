"""Services that turn a run config into results."""

from .experiment_service import ExperimentService
from .verification_service import VerificationService

__all__ = ["ExperimentService", "VerificationService"]
