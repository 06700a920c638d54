"""
Custom exception hierarchy for conewalk.

## Exception Hierarchy

```
ConeWalkError (base)
├── ConfigurationError
│   ├── ConfigFileInvalidError
│   ├── ConfigValidationError
│   └── CurveFileError
├── ConeError
│   ├── DegenerateFormError
│   ├── ConeConstructionError
│   │   └── NotHarmonicError
│   └── OutsideConeError
├── DistributionError
│   ├── InvalidDistributionError
│   ├── MomentUnavailableError
│   └── NonLatticeDistributionError
├── EstimationError
│   ├── InvalidBudgetError
│   ├── ZeroSurvivalMassError
│   ├── BudgetExceededError
│   ├── DPInfeasibleError
│   ├── HarmonicValueUnavailableError
│   ├── EnvelopeViolationError
│   └── MissingHorizonError
└── VerificationFailedError
```

Every error carries `user_message`, `technical_message`, `recoverable`, an
optional `recovery_hint`, a `context` of numeric details and the CLI `exit_code`. See `conewalk.exceptions.handlers` for the helpers
that log and display them.
"""

from .base import ConeWalkError
from .config import (
    ConfigFileInvalidError,
    ConfigurationError,
    ConfigValidationError,
    CurveFileError,
)
from .cone import (
    ConeConstructionError,
    ConeError,
    DegenerateFormError,
    NotHarmonicError,
    OutsideConeError,
)
from .distribution import (
    DistributionError,
    InvalidDistributionError,
    MomentUnavailableError,
    NonLatticeDistributionError,
)
from .estimation import (
    BudgetExceededError,
    DPInfeasibleError,
    EnvelopeViolationError,
    EstimationError,
    HarmonicValueUnavailableError,
    InvalidBudgetError,
    MissingHorizonError,
    VerificationFailedError,
    ZeroSurvivalMassError,
)
from .handlers import (
    ErrorCollector,
    ErrorContext,
    collect_errors,
    format_error_for_display,
    wrap_pydantic_error,
)

__all__ = [
    "BudgetExceededError",
    "ConeConstructionError",
    "ConeError",
    "ConeWalkError",
    "ConfigFileInvalidError",
    "ConfigValidationError",
    "ConfigurationError",
    "CurveFileError",
    "DPInfeasibleError",
    "DegenerateFormError",
    "DistributionError",
    "EnvelopeViolationError",
    "ErrorCollector",
    "ErrorContext",
    "EstimationError",
    "HarmonicValueUnavailableError",
    "InvalidBudgetError",
    "InvalidDistributionError",
    "MissingHorizonError",
    "MomentUnavailableError",
    "NonLatticeDistributionError",
    "NotHarmonicError",
    "OutsideConeError",
    "VerificationFailedError",
    "ZeroSurvivalMassError",
    "collect_errors",
    "format_error_for_display",
    "wrap_pydantic_error",
]
