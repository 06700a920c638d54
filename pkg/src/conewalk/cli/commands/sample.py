"""`conewalk sample`: conditioned or h-transformed trajectories."""

import logging
from pathlib import Path

import click

from ...io.tables import write_jsonl
from ...services import ExperimentService
from ..runner import command_errors, load_run_config, prepare_output_dir, run_options

logger = logging.getLogger(__name__)


@click.command(name="sample")
@run_options
@command_errors
def sample(config_name: str, seed: int | None, workers: int | None, output_dir: Path | None):
    """Draw paths of the walk conditioned to stay in the cone.

    The sampler, path count and length come from the config's sample section.
    Writes paths.jsonl, one path per line.
    """
    config = load_run_config(config_name, seed, workers, output_dir)
    experiment = ExperimentService(config)
    records = experiment.sample_paths()

    out = prepare_output_dir(config.output_dir)
    count = write_jsonl(out / "paths.jsonl", experiment.meta, records)
    click.echo(f"Wrote {count} {config.sample.sampler.value} paths to {out / 'paths.jsonl'}")
