"""
Error plumbing shared by the services and the CLI.

The engines raise typed `ConeWalkError` subclasses. The helpers here log them
around long stages, keep a batch of independent checks running past a failure,
and turn pydantic failures into configuration errors.

| Pattern | Code |
|---------|------|
| Timed stage with failure logging | `with ErrorContext("dp to n=4096"): ...` |
| Run independent checks, keep going | `with collect_errors("verify").try_operation(name): ...` |
| Pydantic failure to config error | `raise wrap_pydantic_error(e, str(path)) from e` |

Layering:

```
CLI (click)          formats user_message + recovery_hint, exit code from the error
    ^  ConeWalkError
services             convert ValueError, ValidationError, OSError into ConeWalkError
    ^  numpy/pydantic/sympy errors
engines              raise typed errors for domain failures
```
"""

import logging
import time

from .base import ConeWalkError
from .config import ConfigFileInvalidError, ConfigValidationError

logger = logging.getLogger(__name__)


class ErrorContext:
    """
    Logs the start, duration and outcome of a stage.

    Failures are logged with the technical message for ConeWalkError and with a
    traceback for anything else; `elapsed` holds the wall time in seconds.

    Example:
        ```python
        with ErrorContext(f"dp survival to n={n}", logger_instance=logger):
            curve = dp_survival_prob(cone, x, dist, horizons)
        ```
    """

    def __init__(
        self,
        operation: str,
        logger_instance: logging.Logger | None = None,
        re_raise: bool = True,
    ):
        self.operation = operation
        self.logger = logger_instance or logger
        self.re_raise = re_raise
        self.error: Exception | None = None
        self.elapsed = 0.0
        self._started = 0.0

    def __enter__(self):
        self.logger.debug(f"Starting: {self.operation}")
        self._started = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.elapsed = time.perf_counter() - self._started
        if exc_type is None:
            self.logger.debug(f"Completed: {self.operation} in {self.elapsed:.2f}s")
            return False

        self.error = exc_val
        if isinstance(exc_val, ConeWalkError):
            self.logger.error(
                f"Failed after {self.elapsed:.2f}s: {self.operation}: {exc_val.technical_message}"
            )
        else:
            self.logger.error(f"Failed: {self.operation}: {exc_val}", exc_info=True)
        return not self.re_raise


def wrap_pydantic_error(error: Exception, file_path: str) -> ConeWalkError:
    """
    Convert a pydantic validation error into a configuration error.

    JSON syntax problems become ConfigFileInvalidError; schema violations become
    ConfigValidationError naming the dotted key path (e.g. `distribution.q`).

    Args:
        error: The pydantic ValidationError
        file_path: Path to the config file that failed validation
    """
    from pydantic import ValidationError

    text = str(error)
    if "Invalid JSON" in text or "json_invalid" in text:
        reason = text
        if "Invalid JSON:" in text:
            reason = text.split("Invalid JSON:")[1].split("[type=")[0].strip()
        return ConfigFileInvalidError(file_path, reason)

    if not isinstance(error, ValidationError) or not error.errors():
        return ConfigValidationError(field="config", value=None, error_msg=text, file_path=file_path)

    problems = error.errors()
    paths = [".".join(str(loc) for loc in p.get("loc", ())) or "config" for p in problems]
    if len(problems) == 1:
        return ConfigValidationError(
            field=paths[0],
            value=problems[0].get("input"),
            error_msg=problems[0].get("msg", "validation failed"),
            file_path=file_path,
        )
    listing = "\n".join(
        f"  - {path}: {p.get('msg', 'validation failed')}"
        for path, p in zip(paths, problems, strict=True)
    )
    return ConfigValidationError(
        field=", ".join(dict.fromkeys(paths)),
        value=None,
        error_msg=f"{len(problems)} validation errors:\n{listing}",
        file_path=file_path,
    )


def format_error_for_display(error: BaseException) -> tuple[str, str | None]:
    """(message, hint) for stderr; the hint is None for foreign exceptions."""
    if isinstance(error, ConeWalkError):
        return error.user_message, error.recovery_hint
    return f"{type(error).__name__}: {error}", None


def collect_errors(operation: str) -> "ErrorCollector":
    """
    Create an error collector for a batch of independent checks.

    Example:
        ```python
        collector = collect_errors("verify")
        for name, check in checks.items():
            with collector.try_operation(name):
                check()
        ```
    """
    return ErrorCollector(operation)


class ErrorCollector:
    """
    Errors of independent sub-operations, keyed by name.

    A failing sub-operation is logged as a warning and swallowed, so a batch
    (verification criteria, per-start fits) always runs to the end.
    """

    def __init__(self, operation: str):
        self.operation = operation
        self.errors: dict[str, BaseException] = {}
        self.success_count = 0

    @property
    def has_errors(self) -> bool:
        return bool(self.errors)

    @property
    def error_count(self) -> int:
        return len(self.errors)

    def failed(self, sub_operation: str) -> BaseException | None:
        """The error recorded for a sub-operation, if any."""
        return self.errors.get(sub_operation)

    def try_operation(self, sub_operation: str) -> "_Attempt":
        return _Attempt(self, sub_operation)

    def get_summary(self) -> str:
        """One line per failure, or a success count."""
        if not self.has_errors:
            return f"{self.operation}: all {self.success_count} operations succeeded"
        total = self.error_count + self.success_count
        lines = [f"{self.operation}: {self.error_count} of {total} operations failed"]
        for name, error in self.errors.items():
            message = error.user_message if isinstance(error, ConeWalkError) else str(error)
            lines.append(f"  - {name}: {message}")
        return "\n".join(lines)


class _Attempt:
    def __init__(self, collector: ErrorCollector, sub_operation: str):
        self.collector = collector
        self.sub_operation = sub_operation

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if exc_type is None:
            self.collector.success_count += 1
            return False
        logger.warning(f"{self.collector.operation}: {self.sub_operation} raised {exc_val}")
        self.collector.errors[self.sub_operation] = exc_val
        return True
