"""`conewalk verify`: the asymptotic verification suite."""

import logging
from pathlib import Path

import click

from ...exceptions import VerificationFailedError
from ...io.tables import FIT_COLUMNS, read_survival_csv, write_csv, write_survival_csv
from ...oracle import write_measure_csv
from ...services import ExperimentService, VerificationService
from ..runner import command_errors, load_run_config, prepare_output_dir, run_options

logger = logging.getLogger(__name__)


@click.command(name="verify")
@run_options
@click.option(
    "--curve",
    "curve_file",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Verify the curves in this survival CSV instead of recomputing them",
)
@command_errors
def verify(
    config_name: str,
    seed: int | None,
    workers: int | None,
    output_dir: Path | None,
    curve_file: Path | None,
):
    """Run every selected verification criterion and report PASS/FAIL.

    Writes report.json, fits.csv and curves.csv (plus endpoint.csv when the
    endpoint law was computed). Exits with code 3 if any criterion fails.
    """
    config = load_run_config(config_name, seed, workers, output_dir)
    experiment = ExperimentService(config)
    curves = read_survival_csv(curve_file) if curve_file is not None else None

    service = VerificationService(experiment, curves)
    report = service.run()

    out = prepare_output_dir(config.output_dir)
    report.save(out / "report.json")
    write_csv(out / "fits.csv", experiment.meta, FIT_COLUMNS, service.fit_rows())
    write_survival_csv(out / "curves.csv", experiment.meta, service.curves)
    if service.endpoint_measures:
        n = max(service.endpoint_measures)
        write_measure_csv(out / "endpoint.csv", experiment.meta, service.endpoint_measures[n])

    for line in report.summary_lines():
        click.echo(line)
    for fits in report.starts:
        if fits.kappa is not None:
            x = ", ".join(f"{c:g}" for c in fits.x)
            click.echo(f"kappa_hat({x}) = {fits.kappa:.6g}")
    click.echo(f"\nWrote {out / 'report.json'}")

    if not report.passed:
        raise VerificationFailedError(report.failed())
