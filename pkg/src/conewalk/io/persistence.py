"""JSON persistence for run configs and verification reports.

Configs are parsed to a raw mapping first, so syntax errors carry line and
column, then command-line overrides are merged in and the result is validated.
A seed missing from both the file and the command line is therefore still a
validation error. Reports are written through a temp file and a rename.
"""

import json
import logging
import shutil
from collections.abc import Mapping
from pathlib import Path
from typing import Any, TypeVar

from pydantic import BaseModel, ValidationError

from ..exceptions import ConfigFileInvalidError, ConfigurationError, wrap_pydantic_error

logger = logging.getLogger(__name__)

T = TypeVar("T", bound=BaseModel)


def _read_object(path: Path) -> dict[str, Any]:
    if not path.exists():
        raise FileNotFoundError(f"File not found: {path}")
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigFileInvalidError(str(path), f"cannot read file: {e}") from e
    if not text.strip():
        raise ConfigFileInvalidError(str(path), "File is empty")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigFileInvalidError(
            str(path), f"{e.msg} at line {e.lineno}, column {e.colno}"
        ) from e
    if not isinstance(raw, dict):
        raise ConfigFileInvalidError(str(path), "top level must be a JSON object")
    return raw


class PydanticPersistence:
    """
    Load and save helpers shared by `RunConfig` and `VerificationReport`.

    Example Usage:
        ```python
        config = PydanticPersistence.load_json(
            Path("weylC2_rademacher.json"), RunConfig, overrides={"seed": 7}
        )
        PydanticPersistence.save_json(report, out_dir / "report.json", backup=False)
        ```
    """

    @staticmethod
    def load_json(
        path: Path, model_type: type[T], overrides: Mapping[str, Any] | None = None
    ) -> T:
        """
        Load and validate a model from a JSON file.

        Args:
            path: Path to the JSON file to load
            model_type: The pydantic model class to validate against
            overrides: Top-level keys replacing the file's values; None entries are ignored

        Raises:
            FileNotFoundError: If the file doesn't exist
            ConfigFileInvalidError: If the file is empty, unreadable or not a JSON object
            ConfigValidationError: If the merged content fails validation
        """
        raw = _read_object(path)
        applied = {k: v for k, v in (overrides or {}).items() if v is not None}
        for key, value in applied.items():
            raw[key] = str(value) if isinstance(value, Path) else value
        if applied:
            logger.debug(f"Overrides for {path.name}: {sorted(applied)}")

        try:
            model = model_type.model_validate(raw)
        except ValidationError as e:
            logger.error(f"{model_type.__name__} in {path} failed validation: {e}")
            raise wrap_pydantic_error(e, str(path)) from e
        logger.debug(f"Loaded {model_type.__name__} from {path}")
        return model

    @staticmethod
    def save_json(data: BaseModel, path: Path, indent: int = 2, backup: bool = True) -> None:
        """
        Write a model as JSON, keeping the previous file as .bak when `backup` is set.

        Raises:
            OSError: If the file cannot be written
            ConfigurationError: If the model cannot be serialized
        """
        path.parent.mkdir(parents=True, exist_ok=True)
        if backup and path.exists():
            shutil.copy2(path, path.with_suffix(path.suffix + ".bak"))

        try:
            text = data.model_dump_json(indent=indent)
        except (ValueError, TypeError) as e:
            raise ConfigurationError(
                user_message=f"Cannot serialize {type(data).__name__} for {path}",
                technical_message=f"model_dump_json failed for {type(data).__name__}: {e}",
            ) from e

        temp_path = path.with_suffix(path.suffix + ".tmp")
        try:
            temp_path.write_text(text + "\n", encoding="utf-8")
            temp_path.replace(path)
        finally:
            temp_path.unlink(missing_ok=True)
        logger.debug(f"Saved {type(data).__name__} to {path}")
