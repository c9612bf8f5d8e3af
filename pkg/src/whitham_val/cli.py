"""Command-line entry point.

Exit codes of ``run``: 0 when every pass rule holds, 1 when the run
completed but a threshold failed, 2 on configuration or runtime errors.
"""

from __future__ import annotations

import dataclasses
import os
import sys

import click

from .config import EXPERIMENTS, load_config
from .errors import ValidationError
from .experiments import run_experiment
from .figures import render_figures
from .report import write_curves_csv, write_report_json


@click.group()
def main():
    """Validation experiments for slow modulation dynamics."""


@main.command()
@click.option(
    "--config",
    "config_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="TOML config file.",
)
@click.option(
    "--experiment",
    type=click.Choice(EXPERIMENTS),
    default=None,
    help="Override the experiment named in the config.",
)
@click.option("--out", "out_dir", default=None, help="Override the output directory.")
@click.option(
    "--threads",
    type=click.IntRange(1, 64),
    default=1,
    show_default=True,
    help="Worker threads for the per-unit loop.",
)
@click.option("--seed", type=int, default=None, help="Override the RNG seed.")
def run(config_path, experiment, out_dir, threads, seed):
    """Run one experiment; write report.json, curves.csv and figures."""
    try:
        cfg = load_config(config_path)
        overrides = {}
        if experiment is not None:
            overrides["experiment"] = experiment
        if out_dir is not None:
            overrides["output_dir"] = out_dir
        if seed is not None:
            overrides["rng_seed"] = seed
        if overrides:
            cfg = dataclasses.replace(cfg, **overrides)
        report = run_experiment(cfg, threads=threads)
        out = cfg.output_dir
        write_report_json(report, os.path.join(out, "report.json"))
        write_curves_csv(report.curves, os.path.join(out, "curves.csv"))
        figures = render_figures(report, out)
    except ValidationError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except Exception as exc:  # runtime failure, still a clean exit code
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        sys.exit(2)
    click.echo(f"{report.experiment}: {'PASS' if report.passed else 'FAIL'}")
    for key in sorted(report.summary):
        value = report.summary[key]
        if isinstance(value, (int, float, str, bool)) or value is None:
            click.echo(f"  {key}: {value}")
    written = [os.path.join(out, "report.json"), os.path.join(out, "curves.csv")]
    click.echo("wrote " + ", ".join(written + figures))
    sys.exit(0 if report.passed else 1)


@main.command("validate-config")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
def validate_config(path):
    """Parse and validate a config file without running anything."""
    try:
        cfg = load_config(path)
    except ValidationError as exc:
        click.echo(f"invalid: {exc}", err=True)
        sys.exit(2)
    click.echo(
        f"ok: experiment={cfg.experiment} q={cfg.q:g} order={cfg.order} "
        f"epsilons={list(cfg.epsilons)} output_dir={cfg.output_dir}"
    )


if __name__ == "__main__":
    main()
