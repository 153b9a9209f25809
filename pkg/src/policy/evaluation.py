"""
Policy evaluation over held-out graphs.

Each graph gets one channel draw, seeded from its position in the dataset so
every policy sees the same channels; trials repeat only the Bernoulli
sampling. Sum rate and per-node violation are averaged over graphs within a
trial, then summarized by mean and std across trials.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Protocol, Sequence, Union

import numpy as np

from ..channel import ChannelModel, ChannelRealization, SignalKind, draw_channel, node_signal, rates
from ..geometry import GeometricGraph
from ..gnn import GnnParams, gnn_forward
from ..seeding import derive_seed
from .schemas import AllocationProblem
from .wmmse import DEFAULT_ITERS, wmmse_policy

METRICS_COLUMNS = ["scale", "policy", "sum_rate_mean", "sum_rate_std", "violation_mean", "violation_std", "trials"]


class Policy(Protocol):
    name: str

    def probs(self, real: ChannelRealization, p0: float, pmax: float) -> np.ndarray: ...


@dataclass(frozen=True, eq=False)
class GnnPolicy:
    params: GnnParams
    signal: SignalKind = SignalKind.DIRECT
    name: str = "gnn"

    def probs(self, real: ChannelRealization, p0: float, pmax: float) -> np.ndarray:
        q, _ = gnn_forward(self.params, real.gso, node_signal(real, self.signal))
        return q


@dataclass(frozen=True)
class WmmsePolicy:
    iters: int = DEFAULT_ITERS
    name: str = "wmmse"

    def probs(self, real: ChannelRealization, p0: float, pmax: float) -> np.ndarray:
        _, q = wmmse_policy(real, p0, pmax, self.iters)
        return q


@dataclass(frozen=True)
class FixedPolicy:
    """Same activation probability for every node; 0 and 1 give deterministic allocations."""
    prob: float
    name: str = "fixed"

    def probs(self, real: ChannelRealization, p0: float, pmax: float) -> np.ndarray:
        return np.full(real.n, self.prob)


@dataclass
class MetricsRecord:
    scale: int
    policy: str
    sum_rate_mean: float
    sum_rate_std: float
    violation_mean: float
    violation_std: float
    trials: int
    sum_rates: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)), repr=False)  # (trials, graphs)
    node_counts: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int), repr=False)

    def row(self) -> dict:
        return {col: getattr(self, col) for col in METRICS_COLUMNS}

    @property
    def per_node_sum_rate(self) -> float:
        return self.sum_rate_mean / float(np.mean(self.node_counts)) if self.node_counts.size else float("nan")

    def __str__(self) -> str:
        return (
            f"{self.policy} @ n={self.scale}: sum rate {self.sum_rate_mean:.2f} ± {self.sum_rate_std:.2f}, "
            f"violation {self.violation_mean:+.3e} ± {self.violation_std:.2e} ({self.trials} trials)"
        )


def _evaluate_graph(policy: Policy, graph: GeometricGraph, g_idx: int, model: ChannelModel, problem: AllocationProblem, trials: int, seed: int):
    real = draw_channel(graph, model, derive_seed(seed, "channel", g_idx))
    pmax = problem.budget(real.n)
    q = np.clip(policy.probs(real, problem.p0, pmax), 0.0, 1.0)
    sum_rates = np.empty(trials)
    violations = np.empty(trials)
    for t in range(trials):
        bits = np.random.default_rng(derive_seed(seed, "trial", t, g_idx)).random(real.n) < q
        p = problem.p0 * bits.astype(float)
        sum_rates[t] = rates(real, p).sum()
        violations[t] = (p.sum() - pmax) / real.n
    return sum_rates, violations


def evaluate_policy(
    policy: Policy,
    graphs: Sequence[GeometricGraph],
    model: ChannelModel,
    problem: AllocationProblem,
    trials: int,
    seed: int,
    scale: Union[int, None] = None,
    workers: int = 1,
) -> MetricsRecord:
    """
    Mean and std across trials of the graph-averaged sum rate and per-node violation.

    Each graph is evaluated on a single channel draw, keyed by its index and
    `seed`, which every trial reuses; trials redraw only the Bernoulli
    allocation. The std therefore measures sampling noise of the policy, not
    fading.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if not graphs:
        raise ValueError("evaluation dataset is empty")

    def run(item):
        g_idx, graph = item
        return _evaluate_graph(policy, graph, g_idx, model, problem, trials, seed)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        results = list(executor.map(run, enumerate(graphs)))

    sum_rates = np.column_stack([r[0] for r in results])  # (trials, graphs)
    violations = np.column_stack([r[1] for r in results])
    trial_rates = sum_rates.mean(axis=1)
    trial_violations = violations.mean(axis=1)
    counts = np.array([g.n for g in graphs])
    return MetricsRecord(
        scale=int(scale if scale is not None else round(counts.mean())),
        policy=policy.name,
        sum_rate_mean=float(trial_rates.mean()),
        sum_rate_std=float(trial_rates.std()),
        violation_mean=float(trial_violations.mean()),
        violation_std=float(trial_violations.std()),
        trials=trials,
        sum_rates=sum_rates,
        node_counts=counts,
    )
