"""Shared plumbing for the run commands: config loading, options, error display."""

import logging
import sys
from collections.abc import Callable
from functools import wraps
from pathlib import Path

import click

from ..configs import resolve_config
from ..exceptions import ConeWalkError, format_error_for_display
from ..models import RunConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2

# set by setup_logging
LOG_PATH: Path | None = None


def exit_code_for(error: BaseException) -> int:
    """Exit code of the CLI for an exception that reached a command."""
    if isinstance(error, ConeWalkError):
        return error.exit_code
    if isinstance(error, FileNotFoundError):
        return EXIT_CONFIG
    return EXIT_USAGE


def show_error(error: BaseException) -> None:
    """Print a ConeWalkError (or any exception) without a traceback."""
    user_message, recovery_hint = format_error_for_display(error)

    click.echo("\n" + "=" * 70, err=True)
    click.echo(f"ERROR: {user_message}", err=True)
    click.echo("=" * 70, err=True)

    if recovery_hint:
        click.echo(f"\n{recovery_hint}", err=True)

    if LOG_PATH is not None:
        click.echo(f"\nFor details, check the log file: {LOG_PATH}", err=True)


def command_errors(func: Callable) -> Callable:
    """
    Turn exceptions raised by a command into a clean message and an exit code.

    ConeWalkErrors are expected outcomes and are shown without a traceback;
    anything else is logged with its traceback first.
    """

    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except click.exceptions.Exit:
            raise
        except click.ClickException:
            raise
        except ConeWalkError as e:
            logger.error(f"{func.__name__} failed: {e.technical_message}")
            show_error(e)
            sys.exit(exit_code_for(e))
        except FileNotFoundError as e:
            logger.error(f"{func.__name__} failed: {e}")
            show_error(e)
            sys.exit(EXIT_CONFIG)
        except Exception as e:
            logger.exception(f"Unexpected error in {func.__name__}")
            show_error(e)
            sys.exit(EXIT_USAGE)

    return wrapper


def run_options(func: Callable) -> Callable:
    """--config, --seed, --workers and --out, shared by every run command."""
    func = click.option(
        "--out",
        "output_dir",
        type=click.Path(file_okay=False, path_type=Path),
        default=None,
        help="Output directory (overrides output_dir)",
    )(func)
    func = click.option(
        "--workers",
        type=click.IntRange(min=1),
        default=None,
        help="Worker threads (overrides workers)",
    )(func)
    func = click.option(
        "--seed", type=click.IntRange(min=0), default=None, help="Master seed (overrides seed)"
    )(func)
    func = click.option(
        "--config",
        "config_name",
        required=True,
        help="Run config: a JSON file or the name of a shipped config",
    )(func)
    return func


def load_run_config(
    config_name: str, seed: int | None, workers: int | None, output_dir: Path | None
) -> RunConfig:
    """
    Resolve and validate a run config with the command-line overrides merged in.

    Raises:
        FileNotFoundError: if the config cannot be found
        ConfigFileInvalidError: on JSON syntax errors
        ConfigValidationError: on schema violations, including a missing seed
    """
    path = resolve_config(config_name)
    overrides = {"seed": seed, "workers": workers, "output_dir": output_dir}
    config = RunConfig.load(path, overrides=overrides)
    logger.info(f"Loaded run config {path} (hash {config.config_hash()[:12]})")
    return config


def prepare_output_dir(path: Path) -> Path:
    path.mkdir(parents=True, exist_ok=True)
    return path
