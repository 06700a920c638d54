"""Main CLI entry point."""

import logging
import logging.handlers
import sys
from pathlib import Path

import click

from .. import __version__
from . import runner
from .commands import configs, harmonic, sample, survival, verify

logger = logging.getLogger(__name__)

_HANDLER_NAME = "conewalk"


def _log_level(verbose: int, debug: bool, log_file: Path | None, log_level: str) -> int:
    # an explicit --log-file uses --log-level; otherwise the -v count decides
    if log_file:
        return getattr(logging, log_level.upper())
    if debug or verbose >= 2:
        return logging.DEBUG
    return logging.INFO if verbose == 1 else logging.WARNING


def _log_path(debug: bool, log_file: Path | None) -> Path:
    if log_file:
        return log_file
    if debug:
        return Path.cwd() / "conewalk-debug.log"
    log_dir = Path.home() / ".conewalk" / "logs"
    log_dir.mkdir(parents=True, exist_ok=True)
    return log_dir / "conewalk.log"


def setup_logging(verbose: int, debug: bool, log_file: Path | None, log_level: str) -> Path:
    """
    Route library logs to a rotating file, and to stderr when -v is given.

    Args:
        verbose: Verbosity count (0 = WARNING, 1 = INFO, 2+ = DEBUG); -v also echoes to stderr
        debug: If True, DEBUG level with the log file in the current directory
        log_file: Custom log file path (optional)
        log_level: Level for an explicit log file (DEBUG/INFO/WARNING/ERROR)

    Returns:
        The log file path
    """
    level = _log_level(verbose, debug, log_file, log_level)
    log_path = _log_path(debug, log_file)

    root_logger = logging.getLogger()
    # repeated invocations in one process (tests) must not stack handlers
    for handler in list(root_logger.handlers):
        if handler.get_name() == _HANDLER_NAME:
            root_logger.removeHandler(handler)
            handler.close()

    handlers: list[logging.Handler] = [
        logging.handlers.RotatingFileHandler(log_path, maxBytes=10 * 1024 * 1024, backupCount=5)
    ]
    handlers[0].setFormatter(
        logging.Formatter(
            "%(asctime)s - %(name)s - %(levelname)s - %(message)s", datefmt="%Y-%m-%d %H:%M:%S"
        )
    )
    if verbose:
        handlers.append(logging.StreamHandler(sys.stderr))
        handlers[1].setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    for handler in handlers:
        handler.set_name(_HANDLER_NAME)
        handler.setLevel(level)
        root_logger.addHandler(handler)

    root_logger.setLevel(level)
    runner.LOG_PATH = log_path
    logger.info(f"Logging to {log_path} at {logging.getLevelName(level)}")
    return log_path


class ConeWalkGroup(click.Group):
    """Click group whose usage errors exit with code 1 instead of click's 2."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            result = super().main(
                args, prog_name, complete_var, standalone_mode=False, **extra
            )
        except click.UsageError as e:
            e.show()
            sys.exit(runner.EXIT_USAGE)
        except click.ClickException as e:
            e.show()
            sys.exit(e.exit_code)
        except click.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(runner.EXIT_USAGE)

        if not standalone_mode:
            return result
        sys.exit(result if isinstance(result, int) else runner.EXIT_OK)


@click.group(cls=ConeWalkGroup)
@click.version_option(version=__version__, prog_name="conewalk")
@click.option("-v", "--verbose", count=True, help="Increase verbosity (-v: INFO, -vv: DEBUG)")
@click.option(
    "--debug",
    is_flag=True,
    help="Enable debug mode (DEBUG level, logs to ./conewalk-debug.log)",
)
@click.option(
    "--log-file",
    type=click.Path(path_type=Path),
    default=None,
    help="Custom log file path",
)
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default="INFO",
    help="Log level for file logging (default: INFO)",
)
def cli(verbose: int, debug: bool, log_file: Path | None, log_level: str):
    """
    conewalk - random walks killed at the boundary of a cone.

    Every run command reads a JSON run config (a file, or the name of a shipped
    config) and writes reproducible CSV/JSON-lines files stamped with the tool
    version and the config hash.

    \b
    Examples:
      # Survival curves of the shipped half-line experiment
      conewalk survival --config halfline_rademacher --out out/

      # Harmonic function table with a different seed
      conewalk harmonic --config weylA2_rademacher --seed 7

      # Full verification suite (exit code 3 on FAIL)
      conewalk -v verify --config weylC2_rademacher

      # Re-verify an existing survival CSV
      conewalk verify --config halfline_rademacher --curve out/survival.csv

      # List shipped configs
      conewalk configs

    \b
    Exit codes: 0 success, 1 usage error, 2 invalid config or infeasible DP,
    3 verification failed.
    """
    setup_logging(verbose, debug, log_file, log_level)


cli.add_command(survival)
cli.add_command(harmonic)
cli.add_command(verify)
cli.add_command(sample)
cli.add_command(configs)

if __name__ == "__main__":
    cli()
