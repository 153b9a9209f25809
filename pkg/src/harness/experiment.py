"""
Experiment drivers: training, evaluation, the transfer experiment, the bound
verification suite and the discrepancy decay-rate measurement.

Every driver writes under one output root and derives all of its seeds from
the config's master seed, so a rerun with the same config reproduces the same
files.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import pandas as pd
from loguru import logger
from tqdm import tqdm

from ..analysis import TransferGap, analyze_transfer, print_bounds_summary, print_transfer_analysis, summarize_bounds, transfer_curve_rows
from ..bounds import (
    AlphaFit,
    BoundReport,
    estimate_alpha,
    fit_student,
    graph_loss,
    verify_filter_rgg_dgg,
    verify_gnn_rgg_dgg,
    verify_prop1,
    verify_thm1,
    verify_thm2,
    verify_thm3,
)
from ..errors import DatasetNotFound
from ..geometry import GridSpec, lattice_reach, make_grid, perturb_to_rgg
from ..gnn import GnnParams, MultiFeatureGnn, Nonlinearity, NonlinearityKind, OutputSquash
from ..io import (
    load_checkpoint,
    plot_alpha_fit,
    plot_sum_rate_histograms,
    plot_transfer_curve,
    save_bound_reports,
    save_checkpoint,
    save_histogram,
    save_json,
    save_metrics,
    save_trace,
    save_transfer_curve,
)
from ..policy import GnnPolicy, MetricsRecord, Policy, TrainingTrace, WmmsePolicy, evaluate_policy, train
from ..seeding import derive_seed, make_rng
from .config import AlphaConfig, BoundsSuiteConfig, Config
from .dataset import dataset_tracker, load_split

# ============== CONFIGURATION ==============
TRANSFERRED_MODEL = "gnn_transfer"
IN_DISTRIBUTION_MODEL = "gnn_indist"
WMMSE_MODEL = "wmmse"

PROP1_MIN_SIDE = 6
PROP1_MAX_SIDE = 12
THM1_MIN_SIDE = 6
THM1_MAX_SIDE = 10
THM1_MAX_GROWTH = 6
REFERENCE_ORDER = 2


def checkpoint_path(out_dir: Path, scale: int) -> Path:
    return Path(out_dir) / "checkpoints" / f"gnn_n{scale}.json"


def trace_path(out_dir: Path, scale: int) -> Path:
    return Path(out_dir) / "traces" / f"trace_n{scale}.csv"


# ============== Training and evaluation ==============

def run_training(
    config: Config,
    out_dir: Path,
    scale: Optional[int] = None,
    progress: bool = True,
) -> tuple[GnnParams, TrainingTrace]:
    """
    Train one policy GNN on the train split of one scale.

    Every scale starts from the same initialization; the checkpoint and the
    per-iteration trace are written under out_dir.
    """
    scale = config.experiment.train_scale if scale is None else scale
    tracker = dataset_tracker(out_dir)
    graphs = load_split(tracker, "train", scale)
    if not graphs:
        raise DatasetNotFound(f"no training graphs at scale {scale} in {tracker.dataset_path}")

    logger.info(f"Training at n={scale} on {len(graphs)} graphs for {config.problem.iters} iterations")
    params_init = config.gnn.init_params(derive_seed(config.seed, "init"))
    params, trace = train(config.problem, graphs, config.channel, params_init, derive_seed(config.seed, "train", scale), progress)

    save_checkpoint(params, checkpoint_path(out_dir, scale))
    save_trace(trace, trace_path(out_dir, scale))
    print(f"✓ n={scale}: {trace}")
    return params, trace


def _evaluate_scale(
    config: Config,
    out_dir: Path,
    policies: list[Policy],
    scale: int,
    workers: int,
) -> list[MetricsRecord]:
    graphs = load_split(dataset_tracker(out_dir), "eval", scale)
    if not graphs:
        raise DatasetNotFound(f"no evaluation graphs at scale {scale}")

    seed = derive_seed(config.seed, "eval", scale)
    records = []
    histograms = {}
    for policy in policies:
        record = evaluate_policy(policy, graphs, config.channel, config.problem, config.experiment.trials, seed, scale=scale, workers=workers)
        print(f"  {record}")
        path = save_histogram(record, Path(out_dir) / "hist" / f"{policy.name}_n{scale}.csv", bins=config.experiment.histogram_bins)
        histograms[policy.name] = pd.read_csv(path)
        records.append(record)

    plot_sum_rate_histograms(histograms, f"Sum rate, n={scale}", Path(out_dir) / "plots" / f"hist_n{scale}", svg=config.experiment.svg)
    return records


def run_evaluation(
    config: Config,
    out_dir: Path,
    checkpoint: Optional[Path] = None,
    workers: int = 1,
) -> list[MetricsRecord]:
    """
    Evaluate a trained GNN (and WMMSE when enabled) at every evaluation scale.

    Args:
        config: Experiment config
        out_dir: Output root holding the dataset
        checkpoint: Checkpoint file; defaults to the one of the train scale
        workers: Thread-pool size for per-graph evaluation

    Returns:
        MetricsRecords in (scale, policy) order, also saved to metrics.csv
    """
    checkpoint = checkpoint or checkpoint_path(out_dir, config.experiment.train_scale)
    if not Path(checkpoint).exists():
        raise DatasetNotFound(f"checkpoint not found: {checkpoint} (run train first)")
    params = load_checkpoint(checkpoint)

    policies: list[Policy] = [GnnPolicy(params, signal=config.channel.signal)]
    if config.experiment.wmmse:
        policies.append(WmmsePolicy(iters=config.experiment.wmmse_iters))

    records = []
    for scale in config.eval_scales:
        print(f"\nEvaluating n={scale}...")
        records.extend(_evaluate_scale(config, out_dir, policies, scale, workers))
    save_metrics(records, Path(out_dir) / "metrics.csv")
    return records


# ============== Transfer experiment ==============

@dataclass
class TransferResult:
    """Records per model name and the transferred-vs-in-distribution gaps."""
    records: dict[str, list[MetricsRecord]] = field(default_factory=dict)
    gaps: list[TransferGap] = field(default_factory=list)

    def all_records(self) -> list[MetricsRecord]:
        rows = [r for recs in self.records.values() for r in recs]
        order = {name: i for i, name in enumerate(self.records)}
        return sorted(rows, key=lambda r: (r.scale, order[r.policy]))


def run_transfer_experiment(config: Config, out_dir: Path, workers: int = 1, progress: bool = True) -> TransferResult:
    """
    Train at the train scale, evaluate at every scale, and compare against
    models trained at each evaluation scale and against WMMSE.
    """
    out_dir = Path(out_dir)
    exp = config.experiment
    phases = 4 if exp.in_distribution else 3

    print("=" * 60)
    print("TRANSFER EXPERIMENT")
    print("=" * 60)

    print(f"\n[1/{phases}] Loading dataset...")
    tracker = dataset_tracker(out_dir)
    tracker.require()
    tracker.print_stats()

    print(f"\n[2/{phases}] Training transferred model at n={exp.train_scale}...")
    transferred, _ = run_training(config, out_dir, exp.train_scale, progress=progress)

    in_dist: dict[int, GnnParams] = {}
    if exp.in_distribution:
        print(f"\n[3/{phases}] Training in-distribution models...")
        for scale in config.eval_scales:
            if scale == exp.train_scale:
                in_dist[scale] = transferred
                print(f"✓ n={scale}: reusing the transferred model")
                continue
            in_dist[scale], _ = run_training(config, out_dir, scale, progress=progress)

    print(f"\n[{phases}/{phases}] Evaluating...")
    result = TransferResult()
    for scale in config.eval_scales:
        print(f"\nn={scale}")
        policies: list[Policy] = [GnnPolicy(transferred, signal=config.channel.signal, name=TRANSFERRED_MODEL)]
        if scale in in_dist:
            policies.append(GnnPolicy(in_dist[scale], signal=config.channel.signal, name=IN_DISTRIBUTION_MODEL))
        if exp.wmmse:
            policies.append(WmmsePolicy(iters=exp.wmmse_iters, name=WMMSE_MODEL))
        for record in _evaluate_scale(config, out_dir, policies, scale, workers):
            result.records.setdefault(record.policy, []).append(record)

    save_metrics(result.all_records(), out_dir / "metrics.csv")
    result.gaps = analyze_transfer(result.records.get(TRANSFERRED_MODEL, []), result.records.get(IN_DISTRIBUTION_MODEL, []))
    rows = transfer_curve_rows(result.records, result.gaps, TRANSFERRED_MODEL)
    curve_path = save_transfer_curve(rows, out_dir / "transfer_curve.csv")
    print(f"💾 Transfer curve saved to: {curve_path}")
    plot_transfer_curve(pd.read_csv(curve_path), out_dir / "plots" / "transfer_curve", svg=exp.svg)

    if result.gaps:
        print()
        print(print_transfer_analysis(result.gaps, exp.gap_tolerance))
    return result


# ============== Bound verification suite ==============

def _random_taps(rng: np.random.Generator, order: int) -> np.ndarray:
    """Nonnegative taps summing to 1."""
    taps = rng.uniform(0.0, 1.0, size=order + 1)
    return taps / taps.sum()


def _theory_params(seed: int, layers: int, order: int) -> GnnParams:
    taps = np.random.default_rng(seed).normal(0.0, 0.3, size=(layers, order + 1))
    return GnnParams(taps=taps, output_squash=OutputSquash.NONE)


def _reference(suite: BoundsSuiteConfig, seed: int) -> MultiFeatureGnn:
    return MultiFeatureGnn.random(suite.gnn_depth, suite.gnn_width, REFERENCE_ORDER, seed)


def _grid(suite: BoundsSuiteConfig, side: int, torus: bool = False):
    return make_grid(GridSpec(side=side, spacing=suite.spacing, radius=suite.radius, torus=torus))


def _degenerate_reports(suite: BoundsSuiteConfig, seed: int) -> list[BoundReport]:
    """Instances whose LHS is exactly zero: identical graphs, identical windows, constant filters, zero inputs."""
    rng = make_rng(seed, "degenerate")
    side = min(suite.sides)
    grid = _grid(suite, side)
    torus = _grid(suite, max(side, 2 * lattice_reach(suite.spacing, suite.radius) + 1), torus=True)
    x = rng.standard_normal(grid.n)
    order = max(suite.max_taps, 1)
    params = _theory_params(derive_seed(seed, "degenerate", "params"), suite.student_layers, suite.student_taps)
    reference = _reference(suite, derive_seed(seed, "degenerate", "reference"))
    zero_params = GnnParams(taps=np.zeros((suite.student_layers, suite.student_taps + 1)), output_squash=OutputSquash.NONE)
    zero_reference = MultiFeatureGnn(layers=tuple(np.zeros_like(h) for h in reference.layers))
    constant = MultiFeatureGnn(layers=(np.array([[[0.7] + [0.0] * order]]),), nonlinearity=Nonlinearity(NonlinearityKind.RELU))
    single = MultiFeatureGnn.random(1, 1, order, derive_seed(seed, "degenerate", "single"), nonnegative=True)
    rgg = perturb_to_rgg(grid, suite.sigma_max * suite.spacing, derive_seed(seed, "degenerate", "rgg"))

    reports = [
        verify_prop1(side, side, rng.normal(size=order + 1), suite.spacing, suite.radius, trials=10, seed=derive_seed(seed, "degenerate", 0)),
        verify_prop1(side - 2, side, [1.0], suite.spacing, suite.radius, trials=10, seed=derive_seed(seed, "degenerate", 1)),
        verify_thm1(params, torus, torus, reference, trials=5, seed=derive_seed(seed, "degenerate", 2)),
        verify_thm1(zero_params, torus, torus, zero_reference, trials=5, seed=derive_seed(seed, "degenerate", 3)),
        verify_filter_rgg_dgg(grid, 0.0, _random_taps(rng, order), x, trials=3, seed=derive_seed(seed, "degenerate", 4)),
        verify_filter_rgg_dgg(grid, suite.sigma_max * suite.spacing, [0.7], x, trials=3, seed=derive_seed(seed, "degenerate", 5)),
        verify_gnn_rgg_dgg(grid, 0.0, single, x, trials=3, seed=derive_seed(seed, "degenerate", 6)),
        verify_gnn_rgg_dgg(grid, suite.sigma_max * suite.spacing, constant, x, trials=3, seed=derive_seed(seed, "degenerate", 7)),
        verify_thm2(params, grid, 0.0, reference, x, trials=3, seed=derive_seed(seed, "degenerate", 8)),
        verify_thm3(params, rgg, rgg, reference, x, x, epsilon=graph_loss(params, rgg.adjacency, x, reference)),
        verify_thm3(params, rgg, rgg, reference, np.zeros(rgg.n), np.zeros(rgg.n), epsilon=0.0),
    ]
    return reports


def _random_rgg_instance(suite: BoundsSuiteConfig, seed: int, i: int) -> list[BoundReport]:
    rng = make_rng(seed, "rgg-instance", i)
    side = int(rng.choice(suite.sides))
    sigma = float(rng.uniform(0.0, suite.sigma_max)) * suite.spacing
    order = int(rng.integers(0, suite.max_taps + 1))
    grid = _grid(suite, side)
    x = rng.standard_normal(grid.n)
    gnn = MultiFeatureGnn.random(suite.gnn_depth, suite.gnn_width, order, derive_seed(seed, "rgg-gnn", i), nonnegative=True)
    draws = derive_seed(seed, "rgg-draws", i)
    return [
        verify_filter_rgg_dgg(grid, sigma, _random_taps(rng, order), x, suite.trials, draws),
        verify_gnn_rgg_dgg(grid, sigma, gnn, x, suite.trials, draws),
    ]


def _random_prop1_instance(suite: BoundsSuiteConfig, seed: int, i: int) -> list[BoundReport]:
    """Window sizes drawn inside the truncation regime B1 + M K >= B2."""
    rng = make_rng(seed, "prop1-instance", i)
    order = int(rng.integers(1, max(suite.max_taps, 1) + 1))
    mask_side = 2 * lattice_reach(suite.spacing, suite.radius) + 1
    b1 = int(rng.integers(PROP1_MIN_SIDE, PROP1_MAX_SIDE + 1))
    b2 = b1 + int(rng.integers(1, mask_side * order + 1))
    taps = rng.normal(size=order + 1)
    return [verify_prop1(b1, b2, taps, suite.spacing, suite.radius, suite.prop1_trials, derive_seed(seed, "prop1-fields", i))]


def _random_thm1_instance(suite: BoundsSuiteConfig, seed: int, i: int) -> list[BoundReport]:
    rng = make_rng(seed, "thm1-instance", i)
    min_side = max(THM1_MIN_SIDE, 2 * lattice_reach(suite.spacing, suite.radius) + 1)
    side_n = int(rng.integers(min_side, max(THM1_MAX_SIDE, min_side) + 1))
    side_m = side_n + int(rng.integers(1, THM1_MAX_GROWTH + 1))
    grid_n, grid_m = _grid(suite, side_n, torus=True), _grid(suite, side_m, torus=True)
    reference = _reference(suite, derive_seed(seed, "thm1-reference", i))
    student, _ = fit_student(reference, [grid_n], suite.student_layers, suite.student_taps, derive_seed(seed, "thm1-student", i), iters=suite.student_iters)
    return [verify_thm1(student, grid_n, grid_m, reference, suite.thm1_trials, derive_seed(seed, "thm1-inputs", i))]


def _loss_instance(suite: BoundsSuiteConfig, seed: int, i: int) -> list[BoundReport]:
    """One grid-vs-RGG loss check and one cross-scale loss check with fitted students."""
    rng = make_rng(seed, "loss-instance", i)
    sigma = float(rng.uniform(0.0, suite.sigma_max)) * suite.spacing
    reference = _reference(suite, derive_seed(seed, "loss-reference", i))

    grid = _grid(suite, int(rng.choice(suite.sides)))
    student, _ = fit_student(reference, [grid], suite.student_layers, suite.student_taps, derive_seed(seed, "loss-student", i), iters=suite.student_iters)
    x = rng.standard_normal(grid.n)
    thm2 = verify_thm2(student, grid, sigma, reference, x, trials=suite.trials, seed=derive_seed(seed, "loss-draws", i))

    side_n, side_m = suite.cross_scale_sides
    rgg_n = perturb_to_rgg(_grid(suite, side_n), sigma, derive_seed(seed, "cross-rgg", i, side_n))
    rgg_m = perturb_to_rgg(_grid(suite, side_m), sigma, derive_seed(seed, "cross-rgg", i, side_m))
    cross, fit_loss = fit_student(reference, [rgg_n], suite.student_layers, suite.student_taps, derive_seed(seed, "cross-student", i), iters=suite.student_iters)
    x_n, x_m = rng.standard_normal(rgg_n.n), rng.standard_normal(rgg_m.n)
    epsilon = max(fit_loss, graph_loss(cross, rgg_n.adjacency, x_n, reference))
    thm3 = verify_thm3(cross, rgg_n, rgg_m, reference, x_n, x_m, epsilon)
    return [thm2, thm3]


def _run_jobs(jobs: list[Callable[[], list[BoundReport]]], workers: int) -> list[BoundReport]:
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        results = list(tqdm(executor.map(lambda job: job(), jobs), total=len(jobs), desc="Bound instances", leave=False))
    return [report for group in results for report in group]


def run_bounds_suite(suite: BoundsSuiteConfig, out_dir: Path, seed: int = 0, workers: int = 1) -> list[BoundReport]:
    """
    Run every configured bound check, write bounds.csv and print the summary.

    Instance order, and therefore the CSV, depends only on the suite and the
    seed, never on the worker count.
    """
    print("=" * 60)
    print("BOUND VERIFICATION SUITE")
    print("=" * 60)

    jobs: list[Callable[[], list[BoundReport]]] = []
    if suite.degenerate:
        jobs.append(partial(_degenerate_reports, suite, seed))
    jobs += [partial(_random_prop1_instance, suite, seed, i) for i in range(suite.prop1_instances)]
    jobs += [partial(_random_thm1_instance, suite, seed, i) for i in range(suite.thm1_instances)]
    jobs += [partial(_random_rgg_instance, suite, seed, i) for i in range(suite.instances)]
    jobs += [partial(_loss_instance, suite, seed, i) for i in range(suite.loss_instances)]
    print(f"\nRunning {len(jobs)} instance groups on {max(1, workers)} workers...")

    reports = _run_jobs(jobs, workers)
    for report in reports:
        if not report.holds:
            logger.warning(f"Bound violated: {report}")
    save_bound_reports(reports, Path(out_dir) / "bounds.csv")

    print()
    print(print_bounds_summary(summarize_bounds(reports)))
    return reports


# ============== Decay rate ==============

def run_alpha(config: AlphaConfig, out_dir: Path, seed: int = 0, workers: int = 1, svg: bool = False) -> AlphaFit:
    """Measure mean ||W_n^2|| per size, fit the decay exponent and save the data, fit and plot."""
    out_dir = Path(out_dir)
    fit = estimate_alpha(config.sigma, config.sides, config.seeds_per_size, config.spacing, config.radius, seed, workers)
    frame = pd.DataFrame({"n": fit.sizes, "mean_w2": fit.means})
    out_dir.mkdir(parents=True, exist_ok=True)
    frame.to_csv(out_dir / "alpha.csv", index=False, lineterminator="\n")
    save_json(
        {"alpha": fit.alpha, "intercept": fit.intercept, "r_squared": fit.r_squared, "sigma": config.sigma, "seeds_per_size": config.seeds_per_size},
        out_dir / "alpha.json",
    )
    plot_alpha_fit(fit.sizes, fit.means, fit.alpha, fit.intercept, out_dir / "plots" / "alpha_fit", svg=svg)
    print(f"✓ {fit}")
    print(f"💾 Decay-rate data saved to: {out_dir / 'alpha.csv'}")
    return fit
