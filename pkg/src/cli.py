"""
Command-line interface: generate, train, eval, transfer, bounds, alpha.

Every subcommand reads an optional YAML config (defaults otherwise); --seed
overrides the config's master seed and --out the output root, which falls back
to GNNTRANSFER_OUT.
"""

import sys
from pathlib import Path
from typing import Callable, Optional

import typer
from loguru import logger

from .errors import GnnTransferError
from .harness import (
    Config,
    Settings,
    config_reference,
    dataset_is_current,
    full_scale,
    generate_dataset,
    load_config,
    run_alpha,
    run_bounds_suite,
    run_evaluation,
    run_training,
    run_transfer_experiment,
)

app = typer.Typer(
    help="GNN power allocation on random geometric graphs and transferability bound checks.",
    epilog=config_reference(),
    no_args_is_help=True,
    rich_markup_mode=None,
    pretty_exceptions_enable=False,
)

ConfigOption = typer.Option(None, "--config", "-c", exists=True, dir_okay=False, readable=True, help="YAML config file (see the key reference in --help)")
SeedOption = typer.Option(None, "--seed", help="Master seed; overrides the config's seed")
OutOption = typer.Option(None, "--out", help="Output root; defaults to $GNNTRANSFER_OUT or ./output")
WorkersOption = typer.Option(None, "--workers", min=1, help="Thread-pool size; defaults to $GNNTRANSFER_WORKERS or 1")
FullScaleOption = typer.Option(False, "--full-scale", help="Use the full-size dataset (n = 500..1200, 100 graphs, 10 trials)")


@app.callback()
def main(verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging")):
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if verbose else "INFO")


def _resolve(config_path: Optional[Path], seed: Optional[int], full: bool = False) -> Config:
    config = load_config(config_path) if config_path else Config()
    if full:
        config = full_scale(config)
    if seed is not None:
        config = config.model_copy(update={"seed": seed})
    return config


def _out(out: Optional[Path]) -> Path:
    return out if out is not None else Settings().out


def _workers(workers: Optional[int]) -> int:
    return workers if workers is not None else max(1, Settings().workers)


def _run(action: Callable[[], object]):
    try:
        action()
    except GnnTransferError as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(code=1)


@app.command()
def generate(
    config: Optional[Path] = ConfigOption,
    seed: Optional[int] = SeedOption,
    out: Optional[Path] = OutOption,
    workers: Optional[int] = WorkersOption,
    full: bool = FullScaleOption,
):
    """Generate the per-scale RGG dataset and its manifest."""
    def action():
        cfg = _resolve(config, seed, full)
        tracker = generate_dataset(cfg.dataset, _out(out), cfg.seed, _workers(workers))
        tracker.print_stats()
    _run(action)


@app.command()
def train(
    config: Optional[Path] = ConfigOption,
    seed: Optional[int] = SeedOption,
    out: Optional[Path] = OutOption,
    scale: Optional[int] = typer.Option(None, "--scale", help="Training scale; defaults to experiment.train_scale"),
    full: bool = FullScaleOption,
):
    """Train the policy GNN on one scale's training split."""
    _run(lambda: run_training(_resolve(config, seed, full), _out(out), scale))


@app.command("eval")
def evaluate(
    config: Optional[Path] = ConfigOption,
    seed: Optional[int] = SeedOption,
    out: Optional[Path] = OutOption,
    workers: Optional[int] = WorkersOption,
    checkpoint: Optional[Path] = typer.Option(None, "--checkpoint", exists=True, dir_okay=False, help="Checkpoint to evaluate; defaults to the train-scale one"),
    full: bool = FullScaleOption,
):
    """Evaluate a checkpoint (and WMMSE) at every evaluation scale."""
    _run(lambda: run_evaluation(_resolve(config, seed, full), _out(out), checkpoint, _workers(workers)))


@app.command()
def transfer(
    config: Optional[Path] = ConfigOption,
    seed: Optional[int] = SeedOption,
    out: Optional[Path] = OutOption,
    workers: Optional[int] = WorkersOption,
    regenerate: bool = typer.Option(False, "--regenerate", help="Regenerate the dataset even if the stored one matches the config"),
    full: bool = FullScaleOption,
):
    """Full pipeline: dataset, training at one scale, evaluation at all scales, transfer gaps."""
    def action():
        cfg = _resolve(config, seed, full)
        root, n_workers = _out(out), _workers(workers)
        if regenerate or not dataset_is_current(root, cfg.dataset, cfg.seed):
            generate_dataset(cfg.dataset, root, cfg.seed, n_workers)
        run_transfer_experiment(cfg, root, n_workers)
    _run(action)


@app.command()
def bounds(
    config: Optional[Path] = ConfigOption,
    seed: Optional[int] = SeedOption,
    out: Optional[Path] = OutOption,
    workers: Optional[int] = WorkersOption,
):
    """Run the bound verification suite and write bounds.csv."""
    def action():
        cfg = _resolve(config, seed)
        run_bounds_suite(cfg.bounds, _out(out), cfg.seed, _workers(workers))
    _run(action)


@app.command()
def alpha(
    config: Optional[Path] = ConfigOption,
    seed: Optional[int] = SeedOption,
    out: Optional[Path] = OutOption,
    workers: Optional[int] = WorkersOption,
):
    """Fit the decay rate of mean ||W_n^2|| over grid sizes."""
    def action():
        cfg = _resolve(config, seed)
        run_alpha(cfg.alpha, _out(out), cfg.seed, _workers(workers), svg=cfg.experiment.svg)
    _run(action)


if __name__ == "__main__":
    app()
