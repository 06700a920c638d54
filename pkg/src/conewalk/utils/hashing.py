"""Stable hashing of configurations and cache keys."""

import hashlib
import json
from typing import Any


def sha256_hex(payload: str | bytes) -> str:
    """Hex SHA-256 of a string (UTF-8) or bytes."""
    if isinstance(payload, str):
        payload = payload.encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


def stable_key(*parts: Any) -> str:
    """Hash arbitrary JSON-friendly parts in an order- and formatting-stable way.

    Non-JSON values (sympy numbers, Fractions, tuples of floats) are stringified,
    floats through repr so that distinct doubles never collide.
    """
    text = json.dumps(parts, sort_keys=True, separators=(",", ":"), default=_encode)
    return sha256_hex(text)


def _encode(value: Any) -> Any:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, set, frozenset)):
        return list(value)
    return str(value)
