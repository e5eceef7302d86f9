"""
Command-line interface for impulse-ser.

Usage:
    impulse-ser predict --config bg_threshold --out bg.csv
    impulse-ser simulate --config classA_sir --budget 1000000 --seed 7
    impulse-ser fit --input distortion.csv --out fit.yaml
    impulse-ser export-pdf --out reference.csv
    impulse-ser scenarios

Exit codes: 0 on success, 2 for configuration or usage errors, 3 for fit
input errors.
"""

import functools
import logging
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any, Literal

import click

from .core.errors import ConfigError, FitInputError
from .mitigation.gmm_fitter import fit_gmm, mixture_pdf, reference_mixture
from .models.schemas import DiscretePdf, GmmSpec
from .models.sweep import SweepConfig
from .reporting.writer import ReportWriter
from .sweep.config_loader import bundled_scenarios, load_config
from .sweep.runner import run_sweep

logger = logging.getLogger(__name__)

EXIT_CONFIG = 2
EXIT_FIT_INPUT = 3


def _handle_errors(func: Callable[..., Any]) -> Callable[..., Any]:
    """Map package errors onto exit codes."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except ConfigError as e:
            click.echo(f"Configuration error: {e}", err=True)
            sys.exit(EXIT_CONFIG)
        except FitInputError as e:
            click.echo(f"Fit input error: {e}", err=True)
            sys.exit(EXIT_FIT_INPUT)

    return wrapper


def _with_overrides(
    cfg: SweepConfig, seed: int | None, budget: int | None, threads: int | None
) -> SweepConfig:
    for parameter, value in (
        ("simulation.seed", seed),
        ("simulation.budget", budget),
        ("simulation.threads", threads),
    ):
        if value is not None:
            cfg = cfg.with_value(parameter, value)
    return cfg


def _sweep_options(func: Callable[..., Any]) -> Callable[..., Any]:
    options = [
        click.option(
            "--config",
            "config_source",
            required=True,
            help="Scenario TOML file or bundled scenario name",
        ),
        click.option("--out", type=click.Path(path_type=Path), help="Output CSV path"),
        click.option("--seed", type=click.IntRange(min=0), help="Master seed override"),
        click.option("--threads", type=click.IntRange(min=1), help="Worker threads"),
        click.option(
            "--budget", type=click.IntRange(min=1), help="Simulated symbols per axis point"
        ),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _run(
    config_source: str,
    out: Path | None,
    seed: int | None,
    threads: int | None,
    budget: int | None,
    simulate: bool,
) -> None:
    cfg = _with_overrides(load_config(config_source), seed, budget, threads)
    curves = run_sweep(cfg, simulate=simulate)
    path = out or Path(f"{cfg.scenario.name}.csv")
    ReportWriter().write_curves(curves, cfg, path)
    click.echo(f"Wrote {len(curves)} curve(s) to {path}")


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Log numeric diagnostics")
def cli(verbose: bool) -> None:
    """SER prediction and simulation for OFDM under impulsive noise."""
    if verbose:
        logging.getLogger("impulse_ser").setLevel(logging.DEBUG)


@cli.command()
@_sweep_options
@_handle_errors
def predict(
    config_source: str, out: Path | None, seed: int | None, threads: int | None, budget: int | None
) -> None:
    """Evaluate the analytic predictors of a scenario."""
    _run(config_source, out, seed, threads, budget, simulate=False)


@cli.command()
@_sweep_options
@_handle_errors
def simulate(
    config_source: str, out: Path | None, seed: int | None, threads: int | None, budget: int | None
) -> None:
    """Simulate a scenario and evaluate its predictors alongside."""
    _run(config_source, out, seed, threads, budget, simulate=True)


@cli.command()
@click.option(
    "--input",
    "input_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Two-column amplitude,density CSV",
)
@click.option("--out", type=click.Path(path_type=Path), help="Fitted mixture and report")
@click.option("--c0", type=click.FloatRange(0.0, 1.0, min_open=True, max_open=True))
@click.option(
    "--denominator",
    type=click.Choice(["own", "printed"]),
    default="own",
    show_default=True,
    help="Gaussian in the weights of components 3 and 4",
)
@click.option(
    "--anchor",
    type=click.Choice(["knee", "origin"]),
    default="knee",
    show_default=True,
    help="Where the second component weight is read",
)
@click.option("--refine/--no-refine", default=True, show_default=True)
@_handle_errors
def fit(
    input_path: Path,
    out: Path | None,
    c0: float | None,
    denominator: Literal["own", "printed"],
    anchor: Literal["knee", "origin"],
    refine: bool,
) -> None:
    """Fit a Gaussian mixture of at most four components to a sampled pdf."""
    try:
        target = DiscretePdf.from_csv(input_path)
    except ValueError as e:
        raise FitInputError(f"cannot read {input_path}: {e}") from e

    result = fit_gmm(target, c0=c0, denominator=denominator, anchor=anchor, refine=refine)
    writer = ReportWriter()
    report = writer.render_fit_report(result, target, source=input_path.name)
    if out is not None:
        writer.write_fit_report(result, target, input_path.name, out)
    click.echo(report, nl=False)


@cli.command("export-pdf")
@click.option(
    "--mixture",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="weights/variances block; defaults to the four-component reference mixture",
)
@click.option("--out", required=True, type=click.Path(path_type=Path))
@click.option("--half-width", type=click.FloatRange(min=0.0, min_open=True), default=250.0)
@click.option("--step", type=click.FloatRange(min=0.0, min_open=True), default=0.005)
@_handle_errors
def export_pdf(mixture: Path | None, out: Path, half_width: float, step: float) -> None:
    """Sample a real-line mixture pdf to a two-column CSV."""
    if mixture is None:
        spec = reference_mixture()
    else:
        try:
            spec = GmmSpec.from_config_block(mixture.read_text())
        except ValueError as e:
            raise ConfigError(str(e), field="mixture") from e
    try:
        pdf = mixture_pdf(spec, half_width=half_width, step=step)
    except ValueError as e:
        raise ConfigError(f"cannot sample the mixture: {e}", field="half-width") from e
    pdf.to_csv(out)
    click.echo(f"Wrote {pdf.grid.size} points to {out}")


@cli.command()
def scenarios() -> None:
    """List the bundled scenarios."""
    for name in bundled_scenarios():
        cfg = load_config(name)
        click.echo(f"{name}: {cfg.scenario.description}")


if __name__ == "__main__":
    cli()
