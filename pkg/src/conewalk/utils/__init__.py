"""Shared helpers: exact-number conversion and stable hashing."""

from .exact import canonical, is_rational, rational_gcd, to_exact, to_fraction
from .hashing import sha256_hex, stable_key

__all__ = [
    "canonical",
    "is_rational",
    "rational_gcd",
    "sha256_hex",
    "stable_key",
    "to_exact",
    "to_fraction",
]
