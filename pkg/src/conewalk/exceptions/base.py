"""Root of the conewalk error hierarchy.

Every error the engines raise for a domain failure derives from ConeWalkError. Each
instance carries two renderings (a short one for the terminal and a detailed one
for the log file), an optional hint naming the config field or option to
change, and the exit code the CLI returns when the error ends a command.
"""

from collections.abc import Mapping


class ConeWalkError(Exception):
    """
    Base exception for all conewalk errors.

    Attributes:
        user_message: One-line description shown on stderr
        technical_message: Message written to the log, with `context` appended
        recoverable: True when a rerun with other inputs can succeed
        recovery_hint: Which setting to change, if any
        context: Numeric details of the failure (point, horizon, sizes)
        exit_code: CLI exit status for this error class
    """

    exit_code: int = 1

    def __init__(
        self,
        user_message: str,
        technical_message: str | None = None,
        recoverable: bool = False,
        recovery_hint: str | None = None,
        context: Mapping[str, object] | None = None,
    ):
        super().__init__(user_message)
        self.user_message = user_message
        self.recoverable = recoverable
        self.recovery_hint = recovery_hint
        self.context = dict(context or {})
        base = technical_message or user_message
        if self.context:
            details = " ".join(f"{k}={v!r}" for k, v in self.context.items())
            base = f"{base} [{details}]"
        self.technical_message = base

    def __str__(self) -> str:
        return self.user_message

    def get_full_message(self) -> str:
        """User message followed by the hint, if there is one."""
        if not self.recovery_hint:
            return self.user_message
        return f"{self.user_message}\n\nSuggestion: {self.recovery_hint}"
