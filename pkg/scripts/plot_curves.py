#!/usr/bin/env python3
"""
Render static figures from conewalk output files.

Reads survival.csv (or curves.csv) and, when present next to it, fits.csv, and
writes two PNGs to the same directory:

    survival_loglog.png   log P(tau > n) against log n, with the fitted lines
    survival_scaled.png   n^(p/2) P(tau > n), which flattens at kappa V(x)

Needs the `plot` extra: `uv sync --extra plot`.
"""

from pathlib import Path

import click
import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from conewalk.io.tables import parse_point, read_csv, read_survival_csv  # noqa: E402


def load_fits(path: Path) -> dict[tuple[float, ...], list[dict[str, str]]]:
    """fits.csv rows grouped by starting point."""
    if not path.exists():
        return {}
    _, rows = read_csv(path)
    fits: dict[tuple[float, ...], list[dict[str, str]]] = {}
    for _, row in rows:
        fits.setdefault(parse_point(row["x"]), []).append(row)
    return fits


def label_for(start: tuple[float, ...]) -> str:
    return "x = (" + ", ".join(f"{c:g}" for c in start) + ")"


@click.command()
@click.argument("curve_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--p", "target_p", type=int, default=None, help="Degree of h (default: from fits.csv)")
@click.option("--dpi", type=int, default=150, show_default=True)
def main(curve_file: Path, target_p: int | None, dpi: int):
    """Plot the survival curves in CURVE_FILE."""
    curves = read_survival_csv(curve_file)
    fits = load_fits(curve_file.parent / "fits.csv")
    if target_p is None:
        targets = {int(r["target_p"]) for rows in fits.values() for r in rows}
        if len(targets) != 1:
            raise click.UsageError("pass --p; fits.csv is missing or mixes cones")
        target_p = targets.pop()

    fig, ax = plt.subplots(figsize=(10, 7))
    for curve in curves:
        n = curve.horizon_array
        p = curve.estimate_array
        keep = (n > 0) & (p > 0)
        line = ax.errorbar(
            n[keep],
            p[keep],
            yerr=curve.std_error_array[keep],
            marker="o",
            markersize=3,
            linestyle="none",
            label=label_for(curve.start),
        )
        for row in fits.get(curve.start, []):
            if row["method"] != "loglog_fit":
                continue
            slope, intercept = float(row["slope"]), float(row["intercept"])
            ax.plot(
                n[keep],
                np.exp(intercept) * n[keep] ** slope,
                color=line.lines[0].get_color(),
                linewidth=1,
                label=f"fit, slope {slope:.3f}",
            )
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("P(tau > n)")
    ax.set_title(f"{curves[0].cone_label}: reference slope {-target_p / 2:g}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(curve_file.parent / "survival_loglog.png", dpi=dpi)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(10, 7))
    for curve in curves:
        n = curve.horizon_array
        keep = n > 0
        scaled = n[keep] ** (target_p / 2) * curve.estimate_array[keep]
        ax.plot(n[keep], scaled, marker="s", markersize=3, label=label_for(curve.start))
    ax.set_xscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel(f"n^{target_p / 2:g} P(tau > n)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(curve_file.parent / "survival_scaled.png", dpi=dpi)
    plt.close(fig)

    click.echo(f"Wrote survival_loglog.png and survival_scaled.png to {curve_file.parent}")


if __name__ == "__main__":
    main()
