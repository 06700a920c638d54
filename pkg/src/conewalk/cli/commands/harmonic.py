"""`conewalk harmonic`: a V table over the configured grid."""

import logging
import math
from pathlib import Path

import click

from ...services import ExperimentService
from ..runner import command_errors, load_run_config, prepare_output_dir, run_options

logger = logging.getLogger(__name__)


@click.command(name="harmonic")
@run_options
@command_errors
def harmonic(config_name: str, seed: int | None, workers: int | None, output_dir: Path | None):
    """Estimate the harmonic function V on a grid of interior points.

    Writes harmonic.csv, plus harmonic_R<R>.csv for each extra shift radius in
    harmonic.R_values. Grid points outside the cone are rejected.
    """
    config = load_run_config(config_name, seed, workers, output_dir)
    experiment = ExperimentService(config)
    tables = experiment.harmonic_tables()

    out = prepare_output_dir(config.output_dir)
    main = tables[None]
    main.write_csv(out / "harmonic.csv", experiment.meta)
    for R, table in tables.items():
        if R is not None:
            table.write_csv(out / f"harmonic_R{R:g}.csv", experiment.meta)

    for estimate in main.estimates:
        h = float(experiment.cone.h(estimate.x))
        ratio = estimate.value / h if h else math.nan
        flag = "" if estimate.converged else "  (unconverged)"
        x = ", ".join(f"{c:g}" for c in estimate.x)
        click.echo(f"V({x}) = {estimate.value:.10g}  V/h = {ratio:.6f}{flag}")

    for R, table in tables.items():
        if R is None:
            continue
        gap = max(
            abs(a.value - b.value) / abs(a.value)
            for a, b in zip(main.estimates, table.estimates, strict=True)
        )
        click.echo(f"R = {R:g}: max relative difference {gap:.3g}")
    click.echo(f"\nWrote {out / 'harmonic.csv'}")
