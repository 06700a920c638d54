"""`conewalk survival`: survival curves for every start of a config."""

import logging
from pathlib import Path

import click

from ...io.tables import write_jsonl, write_survival_csv
from ...services import ExperimentService
from ..runner import command_errors, load_run_config, prepare_output_dir, run_options

logger = logging.getLogger(__name__)


@click.command(name="survival")
@run_options
@command_errors
def survival(config_name: str, seed: int | None, workers: int | None, output_dir: Path | None):
    """Estimate P(tau_x > n) at the configured horizons.

    Writes survival.csv and summary.jsonl to the output directory.
    """
    config = load_run_config(config_name, seed, workers, output_dir)
    experiment = ExperimentService(config)
    curves = experiment.survival_curves()

    out = prepare_output_dir(config.output_dir)
    write_survival_csv(out / "survival.csv", experiment.meta, curves)
    write_jsonl(
        out / "summary.jsonl",
        experiment.meta,
        (ExperimentService.summary_record(c) for c in curves),
    )

    for curve in curves:
        n = curve.horizons[-1]
        estimate, error = curve.at(n)
        x = ", ".join(f"{c:g}" for c in curve.start)
        click.echo(
            f"x=({x})  P(tau > {n}) = {estimate:.6g} +/- {error:.2g}  [{curve.method.value}]"
        )
    click.echo(f"\nWrote {out / 'survival.csv'}")
