"""Persistence of configs and reports, plus the CSV and JSON-lines output tables.

Only the JSON persistence is re-exported here because the models package loads
configs through it; import tables from `conewalk.io.tables`.
"""

from .persistence import PydanticPersistence

__all__ = ["PydanticPersistence"]
