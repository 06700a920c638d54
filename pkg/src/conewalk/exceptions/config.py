"""Configuration-related exceptions.

- ConfigurationError: Base class for configuration errors
- ConfigFileInvalidError: Config file is empty or not valid JSON
- ConfigValidationError: Config values fail validation
- CurveFileError: A survival-curve CSV handed to the CLI cannot be parsed
"""

from typing import Any

from .base import ConeWalkError

# first matching prefix of the dotted key path wins
_FIELD_HINTS: dict[str, str] = {
    "seed": "Every run needs an explicit seed; pass --seed or set it in the file",
    "workers": "Every run needs an explicit workers count; pass --workers or set it in the file",
    "distribution": (
        "Valid kinds: rademacher, lazy_rademacher, uniform_std, exp_centered, "
        "pareto_std, discrete, asymmetric_three_point"
    ),
    "cone": "Give either family + dimension or an explicit list of forms",
    "horizons": "Horizons must be positive and strictly increasing",
    "starts": "Each start must have one coordinate per dimension of the cone",
    "verify": "See the verification settings table in the configuration docs",
}


def _hint_for(field: str) -> str | None:
    for prefix, hint in _FIELD_HINTS.items():
        if field == prefix or field.startswith(prefix + "."):
            return hint
    return None


class ConfigurationError(ConeWalkError):
    """Configuration is invalid or cannot be loaded."""

    exit_code = 2


class ConfigFileInvalidError(ConfigurationError):
    """The file is empty, unreadable or not a JSON object."""

    def __init__(self, file_path: str, parse_error: str):
        lowered = parse_error.lower()
        if "trailing comma" in lowered:
            user_msg = "Configuration file has a trailing comma"
            recovery = f"Remove the comma after the last item in {file_path}"
        elif "empty" in lowered:
            user_msg = "Configuration file is empty"
            recovery = f"Start from a shipped config: conewalk configs, then copy one to {file_path}"
        else:
            user_msg = f"Configuration file has invalid syntax: {parse_error}"
            recovery = (
                "Exact values such as 1/2 or 1+sqrt(2) must be quoted strings; "
                f"check braces and commas in {file_path}"
            )
        super().__init__(
            user_message=user_msg,
            technical_message=f"JSON parse error in {file_path}: {parse_error}",
            recoverable=True,
            recovery_hint=recovery,
            context={"file": file_path},
        )
        self.file_path = file_path
        self.parse_error = parse_error


class ConfigValidationError(ConfigurationError):
    """A config value fails validation; `field` is the dotted key path."""

    def __init__(self, field: str, value: Any, error_msg: str, file_path: str | None = None):
        recovery = f"Update '{field}'" + (f" in {file_path}" if file_path else "")
        hint = _hint_for(field)
        if hint:
            recovery += f"\n{hint}"
        super().__init__(
            user_message=f"Invalid configuration value for '{field}': {error_msg}",
            technical_message=f"Config validation failed for {field}={value!r}: {error_msg}",
            recoverable=True,
            recovery_hint=recovery,
        )
        self.field = field
        self.value = value
        self.file_path = file_path


class CurveFileError(ConfigurationError):
    """A survival curve file is missing columns or holds unparsable rows."""

    def __init__(self, file_path: str, reason: str, line: int | None = None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(
            user_message=f"Cannot read survival curve file{where}: {reason}",
            technical_message=f"Curve file {file_path}{where}: {reason}",
            recoverable=True,
            recovery_hint=(
                f"Regenerate {file_path} with 'conewalk survival' or fix the row by hand. "
                "Expected columns: cone_label, x, n, estimate, std_error, method, trials, seed"
            ),
        )
        self.file_path = file_path
        self.line = line
