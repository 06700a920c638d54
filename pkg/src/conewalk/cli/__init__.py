"""CLI module for conewalk."""

from .main import cli

__all__ = ["cli"]
