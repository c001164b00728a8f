"""
LogSpace command-line application.

Every subcommand reads JSON documents, runs one toolkit operation and writes a
JSON report to standard output (or --out). Exit status: 0 success, 1 sound
negative answer, 2 bad input.
"""

import logging
import sys
from pathlib import Path
from typing import List, Optional

import typer

from src.core.commands import Command, run
from src.core.config import (
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    EXIT_INPUT_ERROR,
    LOG_FORMAT,
    __version__,
)
from src.core.errors import InputError
from src.storage.operations import DocumentStorage, render_report

app = typer.Typer(
    name="logspace",
    help="Norms, isometries and isometry decisions for L_log spaces.",
    add_completion=False,
    no_args_is_help=True,
)


def _version(value: bool):
    if value:
        typer.echo(f"logspace {__version__}")
        raise typer.Exit()


@app.callback()
def main(
    ctx: typer.Context,
    tolerance: Optional[float] = typer.Option(None, "--tolerance", help="Override the structural tolerance."),
    trials: int = typer.Option(DEFAULT_TRIALS, "--trials", help="Random functions used by verify."),
    seed: int = typer.Option(DEFAULT_SEED, "--seed", help="Seed for verify and selftest."),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the report here instead of stdout."),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log progress to stderr."),
    version: bool = typer.Option(False, "--version", callback=_version, is_eager=True,
                                 help="Show the version and exit."),
):
    logging.basicConfig(stream=sys.stderr, level=logging.INFO if verbose else logging.WARNING,
                        format=LOG_FORMAT, force=True)
    ctx.obj = {"tolerance": tolerance, "trials": trials, "seed": seed, "out": out}


def _emit(storage: DocumentStorage, verb: str, report: dict, out: Optional[Path], status: int) -> None:
    if out is None:
        typer.echo(render_report(report), nl=False)
        raise typer.Exit(status)
    try:
        storage.write_report(report, str(out))
    except OSError as e:
        logging.error(f"{verb}: cannot write {out}: {e}")
        typer.echo(render_report({"success": False, "error": "OSError", "message": str(e),
                                  "violated_property": None}), nl=False)
        raise typer.Exit(EXIT_INPUT_ERROR)
    raise typer.Exit(status)


def _execute(ctx: typer.Context, verb: str, inputs: List[Path], **extra) -> None:
    options = ctx.obj
    storage = DocumentStorage()
    try:
        command = Command(verb, tuple(str(p) for p in inputs), options["tolerance"],
                          options["trials"], options["seed"],
                          str(options["out"]) if options["out"] else None, **extra)
    except InputError as e:
        logging.error(f"{verb}: {e.message}")
        _emit(storage, verb, e.to_dict(), options["out"], e.exit_status)

    status, report = run(command, storage)
    _emit(storage, verb, report, options["out"], status)


@app.command("norm")
def norm_command(ctx: typer.Context, function: Path = typer.Argument(..., help="Function document.")):
    """F-norm of a function."""
    _execute(ctx, "norm", [function])


@app.command("dist")
def dist_command(ctx: typer.Context, f: Path = typer.Argument(...), g: Path = typer.Argument(...)):
    """F-metric distance between two functions on the same space."""
    _execute(ctx, "dist", [f, g])


@app.command("passport")
def passport_command(ctx: typer.Context, space: Path = typer.Argument(..., help="Space document.")):
    """Passport rows and atom multiset of a space."""
    _execute(ctx, "passport", [space])


@app.command("decide")
def decide_command(ctx: typer.Context, s1: Path = typer.Argument(...), s2: Path = typer.Argument(...)):
    """Decide whether two spaces carry isometric L_log spaces."""
    _execute(ctx, "decide", [s1, s2])


@app.command("build-iso")
def build_iso_command(ctx: typer.Context, iso: Path = typer.Argument(..., help="Isometry document.")):
    """Isometry induced by a measure-preserving isomorphism."""
    _execute(ctx, "build-iso", [iso])


@app.command("apply")
def apply_command(ctx: typer.Context, iso: Path = typer.Argument(...), function: Path = typer.Argument(...)):
    """Apply an isometry to a function."""
    _execute(ctx, "apply", [iso, function])


@app.command("verify")
def verify_command(ctx: typer.Context, iso: Path = typer.Argument(...)):
    """Check norm preservation on seeded random functions."""
    _execute(ctx, "verify", [iso])


@app.command("decompose")
def decompose_command(ctx: typer.Context, matrix: Path = typer.Argument(..., help="Matrix document.")):
    """Split a matrix into multiplier times homomorphism, or refuse it."""
    _execute(ctx, "decompose", [matrix])


@app.command("separate")
def separate_command(
    ctx: typer.Context,
    s_mu: Path = typer.Argument(...),
    s_nu: Path = typer.Argument(...),
    candidate: Optional[Path] = typer.Argument(None, help="Optional matrix from the nu-space to the mu-space."),
    lam: Optional[float] = typer.Option(None, "--lambda", help="Scalar to test; defaults to 2*lambda*+1."),
):
    """Separation certificate for spaces with different total measure."""
    inputs = [s_mu, s_nu] + ([candidate] if candidate is not None else [])
    _execute(ctx, "separate", inputs, lam=lam)


@app.command("selftest")
def selftest_command(ctx: typer.Context, corrupt: Optional[str] = typer.Option(None, "--corrupt", hidden=True)):
    """Run every invariant suite with a fixed seed."""
    _execute(ctx, "selftest", [], corrupt=corrupt)


if __name__ == "__main__":
    app()
