"""Experiment configs shipped with the package.

Each `*.json` file here is a RunConfig. Commands accept either a path or the bare
name of one of these files, e.g. `conewalk verify --config weylC2_rademacher`.
"""

from pathlib import Path

CONFIG_DIR = Path(__file__).parent


def shipped_configs() -> list[str]:
    """Bare names of the shipped configs, sorted."""
    return sorted(p.stem for p in CONFIG_DIR.glob("*.json"))


def resolve_config(name_or_path: str | Path) -> Path:
    """
    Path of a config given as a file path or a shipped config name.

    An existing file wins over a shipped name; a name may carry the .json suffix.

    Raises:
        FileNotFoundError: if neither a file nor a shipped config matches
    """
    path = Path(name_or_path)
    if path.exists():
        return path
    stem = path.name.removesuffix(".json")
    shipped = CONFIG_DIR / f"{stem}.json"
    if path.parent == Path(".") and shipped.exists():
        return shipped
    raise FileNotFoundError(
        f"No config file {name_or_path!s}; shipped configs: {', '.join(shipped_configs())}"
    )
