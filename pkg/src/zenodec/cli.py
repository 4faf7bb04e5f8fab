"""Command-line interface: run recipes, sweep parameters, validate, inspect
timescales.  Exit codes: 0 success, 2 configuration error, 3 numerical error."""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click
import numpy as np

from .errors import ConfigurationError, NumericalError, ZenodecError
from .io import parse_overrides, read_config_file

DEFAULT_OUTDIR_ENV = "ZENODEC_OUTDIR"


def _collect_overrides(config_file, sets) -> dict:
    overrides = {}
    if config_file:
        overrides.update(read_config_file(config_file))
    overrides.update(parse_overrides(sets))
    return overrides


def _outdir(out) -> Path:
    return Path(out or os.environ.get(DEFAULT_OUTDIR_ENV, "zenodec-out"))


@click.group()
def main():
    """Escape of a repeatedly monitored particle: simulation recipes."""


@main.command()
@click.argument("recipe")
@click.option("--config", "config_file", type=click.Path(exists=True),
              help="Flat key=value config file.")
@click.option("--set", "sets", multiple=True, metavar="KEY=VALUE",
              help="Override a config or recipe.* field.")
@click.option("--out", type=click.Path(), default=None,
              help=f"Output directory (default $" + DEFAULT_OUTDIR_ENV + " or ./zenodec-out).")
def run(recipe, config_file, sets, out):
    """Run a named recipe and write its CSVs plus manifest."""
    from .recipes import run_recipe

    overrides = _collect_overrides(config_file, sets)
    manifest = run_recipe(recipe, overrides, _outdir(out) / recipe)
    for entry in manifest.outputs:
        click.echo(f"wrote {entry['path']} ({entry['bytes']} bytes, "
                   f"sha256 {entry['sha256'][:12]}...)")
    click.echo(f"manifest.json written; wall time {manifest.wall_time_s:.1f}s")


@main.command()
@click.argument("recipe")
@click.option("--param", required=True, metavar="KEY=V1,V2,...",
              help="Field to sweep with comma-separated values.")
@click.option("--config", "config_file", type=click.Path(exists=True))
@click.option("--set", "sets", multiple=True, metavar="KEY=VALUE")
@click.option("--out", type=click.Path(), default=None)
def sweep(recipe, param, config_file, sets, out):
    """Run a recipe once per value of a swept field (independent runs)."""
    from .recipes import run_recipe

    if "=" not in param:
        raise ConfigurationError("--param must be KEY=V1,V2,...")
    key, values = param.split("=", 1)
    base = _collect_overrides(config_file, sets)
    root = _outdir(out) / recipe
    for value in values.split(","):
        overrides = dict(base)
        overrides.update(parse_overrides([f"{key}={value}"]))
        subdir = root / f"{key.replace('.', '_')}={value}"
        manifest = run_recipe(recipe, overrides, subdir)
        click.echo(f"{subdir}: {len(manifest.outputs)} files, "
                   f"{manifest.wall_time_s:.1f}s")


@main.command()
@click.option("--config", "config_file", type=click.Path(exists=True))
@click.option("--set", "sets", multiple=True, metavar="KEY=VALUE")
def timescales(config_file, sets):
    """Print the timescale ledger for a configuration."""
    from .io import config_from_mapping
    from .lattice import gaussian_density_matrix, moments
    from .runner import classify_regime
    from .runner import timescales as compute_timescales

    overrides = _collect_overrides(config_file, sets)
    config = config_from_mapping(overrides)
    state = gaussian_density_matrix(config.grid, config.sigma, hbar=config.qbm.hbar)
    p2 = moments(state, config.qbm.hbar).p2
    ts = compute_timescales(config, p2)
    click.echo(f"initial <p^2>      : {p2:.6g}")
    for name, value in [("energy time t_E", ts.t_E),
                        ("localization time", ts.t_loc),
                        ("suppression time", ts.tau_suppress),
                        ("classical decay time", ts.lambda_inv),
                        ("stationary momentum", ts.p_s),
                        ("final energy time", ts.t_E_final),
                        ("momentum cut-off", ts.p_c)]:
        click.echo(f"{name:<20}: {value:.6g}")
    click.echo(f"regime              : {classify_regime(ts, config.eps)}")


@main.command()
@click.option("--quick/--full", default=True,
              help="Quick battery (seconds) or the fuller one (a minute).")
def validate(quick):
    """Run the built-in invariant battery; non-zero exit on failure."""
    failures = _run_validation(quick)
    if failures:
        click.echo(f"{failures} invariant(s) FAILED")
        sys.exit(NumericalError.exit_code)
    click.echo("all invariants passed")


def _check(label, ok, failures):
    click.echo(f"  [{'PASS' if ok else 'FAIL'}] {label}")
    return failures + (0 if ok else 1)


def _run_validation(quick: bool) -> int:
    from .lattice import (Grid1D, gaussian_density_matrix, inverse_wigner,
                          moments, wigner_transform)
    from .projectors import Projector, apply_projection
    from .propagators import QBMParams, evolve_kernel, evolve_stepper

    failures = 0
    grid = Grid1D(256, 0.02)
    rho = gaussian_density_matrix(grid, 0.1)
    click.echo("lattice:")
    back = inverse_wigner(wigner_transform(rho))
    failures = _check("Wigner round trip identity (1e-9)",
                      np.max(np.abs(back.values - rho.values)) < 1e-9, failures)
    m = moments(rho)
    failures = _check("Gaussian moments x2=sigma^2, p2=1/4sigma^2 (1e-9)",
                      abs(m.x2 - 0.01) < 1e-9 * 0.01
                      and abs(m.p2 - 25.0) < 1e-9 * 25.0, failures)

    click.echo("propagators:")
    evolved = evolve_kernel(rho, QBMParams(D=100.0), 0.01)
    failures = _check("trace preserved (1e-9)",
                      abs(evolved.trace - rho.trace) < 1e-9, failures)
    failures = _check("Hermiticity preserved (1e-12)",
                      evolved.hermiticity_defect() < 1e-12, failures)
    failures = _check("d<p^2>/dt = 2D (1e-6 relative)",
                      abs((moments(evolved).p2 - m.p2) / 2.0 - 1.0) < 1e-6, failures)
    stepped = evolve_stepper(rho, QBMParams(D=100.0), None, 0.001, 10)
    failures = _check("kernel vs stepper (1e-4 sup)",
                      np.max(np.abs(stepped.values - evolve_kernel(
                          rho, QBMParams(D=100.0), 0.01).values)) < 1e-4, failures)

    click.echo("projections:")
    projected, rep = apply_projection(rho, Projector.smeared(1.0, 0.05))
    total = rep.p2_red + rep.delta_term + rep.sigma_term
    failures = _check("p2 decomposition identity (1e-9 relative)",
                      abs(rep.p2_after - total) < 1e-9 * abs(total), failures)
    failures = _check("norm non-increasing",
                      rep.norm_after <= rep.norm_before + 1e-12, failures)

    if not quick:
        from .absorbing import v0_from_eps
        from .classical import find_steady_mode

        click.echo("classical:")
        mode = find_steady_mode()
        failures = _check("decay-mode moments near (0.076, 0.78, 0.24) (10%)",
                          abs(mode.moments["x2"] / 0.076 - 1) < 0.1
                          and abs(mode.moments["p2"] / 0.78 - 1) < 0.1
                          and abs(mode.moments["xp2"] / 0.24 - 1) < 0.1, failures)
        click.echo("absorber:")
        failures = _check("V0 = hbar/eps", v0_from_eps(0.01) == 100.0, failures)
    return failures


def entrypoint():
    try:
        main(standalone_mode=False)
    except click.exceptions.Abort:
        sys.exit(1)
    except click.UsageError as exc:
        click.echo(str(exc), err=True)
        sys.exit(ConfigurationError.exit_code)
    except ZenodecError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(getattr(exc, "exit_code", 1))


if __name__ == "__main__":
    entrypoint()
