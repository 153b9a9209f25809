"""
Primal-dual learning of a Bernoulli power-allocation policy.

The GNN maps (channel GSO, node signal) to activation probabilities q; each
transmitter switches on at power p0 with probability q_i. The primal update is
a score-function gradient ascent step on the Lagrangian
sum_rate - lambda * (total_power - Pmax); the dual update is projected ascent
on lambda.
"""

import itertools
from typing import Sequence

import numpy as np
from loguru import logger
from tqdm import tqdm

from ..channel import ChannelModel, ChannelRealization, draw_channel, node_signal, rates
from ..errors import DimensionError
from ..geometry import GeometricGraph
from ..gnn import GnnParams, GnnTape, OutputSquash, gnn_backward, gnn_forward
from ..seeding import derive_seed
from .schemas import AllocationProblem, DualState, PolicySample, StepDiagnostics, TrainingTrace

# ============== CONFIGURATION ==============
PROB_CLAMP = 1e-6
MAX_ENUMERATION_NODES = 12


def _clamp(q: np.ndarray) -> tuple[np.ndarray, int]:
    clamped = np.clip(q, PROB_CLAMP, 1.0 - PROB_CLAMP)
    return clamped, int(np.count_nonzero(clamped != q))


def _bernoulli_log_prob(q: np.ndarray, bits: np.ndarray) -> float:
    return float(np.sum(np.where(bits, np.log(q), np.log1p(-q))))


def _score_upstream(q: np.ndarray, bits: np.ndarray) -> np.ndarray:
    """d log P(bits) / dq."""
    return np.where(bits, 1.0 / q, -1.0 / (1.0 - q))


def _check_policy(params: GnnParams):
    if params.output_squash is not OutputSquash.SIGMOID:
        raise ValueError("policy GNN must end in a sigmoid to output probabilities")


def policy_probs(params: GnnParams, real: ChannelRealization, x: np.ndarray) -> tuple[np.ndarray, GnnTape]:
    _check_policy(params)
    return gnn_forward(params, real.gso, x)


def _build_sample(real: ChannelRealization, q: np.ndarray, bits: np.ndarray, p0: float, clamped: int) -> PolicySample:
    allocation = p0 * bits.astype(float)
    r = rates(real, allocation)
    return PolicySample(
        probs=q,
        allocation=allocation,
        rates=r,
        sum_rate=float(r.sum()),
        total_power=float(allocation.sum()),
        log_prob=_bernoulli_log_prob(q, bits),
        clamped=clamped,
    )


def _draw(params: GnnParams, real: ChannelRealization, x: np.ndarray, p0: float, seed: int) -> tuple[PolicySample, GnnTape]:
    raw, tape = policy_probs(params, real, x)
    q, clamped = _clamp(raw)
    if clamped:
        logger.warning(f"{clamped} probabilities clamped to [{PROB_CLAMP}, {1 - PROB_CLAMP}]")
    bits = np.random.default_rng(seed).random(q.shape[0]) < q
    return _build_sample(real, q, bits, p0, clamped), tape


def sample_policy(params: GnnParams, real: ChannelRealization, x: np.ndarray, p0: float, seed: int) -> PolicySample:
    """Run the GNN and draw one Bernoulli allocation."""
    sample, _ = _draw(params, real, x, p0, seed)
    return sample


def lagrangian(sample: PolicySample, lam: float, pmax: float) -> float:
    return sample.sum_rate - lam * (sample.total_power - pmax)


def score_gradient(
    params: GnnParams,
    real: ChannelRealization,
    x: np.ndarray,
    bits: np.ndarray,
    p0: float,
    lam: float,
    pmax: float,
) -> tuple[float, np.ndarray]:
    """Lagrangian of a fixed allocation and the gradient of its log-probability w.r.t. the taps."""
    raw, tape = policy_probs(params, real, x)
    q, clamped = _clamp(raw)
    bits = np.asarray(bits, dtype=bool)
    sample = _build_sample(real, q, bits, p0, clamped)
    return lagrangian(sample, lam, pmax), gnn_backward(tape, _score_upstream(q, bits))


def _all_outcomes(n: int) -> np.ndarray:
    if n > MAX_ENUMERATION_NODES:
        raise DimensionError(f"enumeration over 2^{n} allocations is limited to n <= {MAX_ENUMERATION_NODES}")
    return np.array(list(itertools.product([False, True], repeat=n)), dtype=bool)


def _outcome_lagrangians(real: ChannelRealization, outcomes: np.ndarray, p0: float, lam: float, pmax: float) -> np.ndarray:
    values = np.empty(outcomes.shape[0])
    for idx, bits in enumerate(outcomes):
        p = p0 * bits.astype(float)
        values[idx] = rates(real, p).sum() - lam * (p.sum() - pmax)
    return values


def expected_lagrangian(params: GnnParams, real: ChannelRealization, x: np.ndarray, p0: float, lam: float, pmax: float) -> float:
    """E_{bits ~ Bernoulli(q)}[Lagrangian] by enumerating all 2^n allocations."""
    raw, _ = policy_probs(params, real, x)
    q, _ = _clamp(raw)
    outcomes = _all_outcomes(q.shape[0])
    probs = np.prod(np.where(outcomes, q, 1.0 - q), axis=1)
    return float(probs @ _outcome_lagrangians(real, outcomes, p0, lam, pmax))


def enumerate_lagrangian_gradient(
    params: GnnParams,
    real: ChannelRealization,
    x: np.ndarray,
    p0: float,
    lam: float,
    pmax: float,
) -> np.ndarray:
    """
    Exact gradient of E[Lagrangian] w.r.t. the taps.

    dE/dq_i = sum_b L(b) dP(b)/dq_i is formed by enumeration and pushed through
    one backward pass.
    """
    raw, tape = policy_probs(params, real, x)
    q, _ = _clamp(raw)
    outcomes = _all_outcomes(q.shape[0])
    factors = np.where(outcomes, q, 1.0 - q)
    values = _outcome_lagrangians(real, outcomes, p0, lam, pmax)
    # dP/dq_i = +-prod_{j != i} factors_j
    dprob = np.empty_like(factors)
    for i in range(q.shape[0]):
        others = np.prod(np.delete(factors, i, axis=1), axis=1)
        dprob[:, i] = np.where(outcomes[:, i], others, -others)
    return gnn_backward(tape, values @ dprob)


def expected_score_estimate(
    params: GnnParams,
    real: ChannelRealization,
    x: np.ndarray,
    p0: float,
    lam: float,
    pmax: float,
) -> np.ndarray:
    """sum_b P(b) L(b) grad log P(b): the exact mean of the single-sample score-function estimator."""
    raw, _ = policy_probs(params, real, x)
    q, _ = _clamp(raw)
    total = np.zeros_like(params.taps)
    for bits in _all_outcomes(q.shape[0]):
        prob = float(np.prod(np.where(bits, q, 1.0 - q)))
        value, score = score_gradient(params, real, x, bits, p0, lam, pmax)
        total += prob * value * score
    return total


def baseline_weights(values: np.ndarray) -> np.ndarray:
    """
    Per-sample weights on grad log P: (L_b - mean L) / B for B > 1.

    The mean baseline includes the sample itself, so the estimate is
    (B-1)/B times the exact gradient in expectation. A single sample
    keeps L, without a baseline.
    """
    values = np.asarray(values, dtype=float)
    if values.shape[0] > 1:
        return (values - values.mean()) / values.shape[0]
    return values


def reinforce_gradient(
    params: GnnParams,
    batch: Sequence[tuple[ChannelRealization, np.ndarray]],
    problem: AllocationProblem,
    lam: float,
    seed: int,
) -> tuple[np.ndarray, list[PolicySample]]:
    """Score-function estimate of grad E[Lagrangian] over a batch, (1/B) sum_b (L_b - mean L) grad log P_b."""
    if not batch:
        raise ValueError("reinforce batch is empty")
    samples, tapes, values = [], [], []
    for b, (real, x) in enumerate(batch):
        sample, tape = _draw(params, real, x, problem.p0, derive_seed(seed, b))
        samples.append(sample)
        tapes.append(tape)
        values.append(lagrangian(sample, lam, problem.budget(real.n)))

    grad = np.zeros_like(params.taps)
    for weight, sample, tape in zip(baseline_weights(values), samples, tapes):
        grad += gnn_backward(tape, weight * _score_upstream(sample.probs, sample.bits))
    return grad, samples


def reinforce_step(
    params: GnnParams,
    dual: DualState,
    batch: Sequence[tuple[ChannelRealization, np.ndarray]],
    problem: AllocationProblem,
    seed: int,
) -> tuple[GnnParams, DualState, StepDiagnostics]:
    """
    One primal ascent step on the taps and one projected dual step.

    A non-finite gradient aborts the whole step: params and lambda are
    returned unchanged and the diagnostics are flagged.
    """
    grad, samples = reinforce_gradient(params, batch, problem, dual.lam, seed)
    pmaxes = np.array([problem.budget(real.n) for real, _ in batch])
    powers = np.array([s.total_power for s in samples])
    sizes = np.array([real.n for real, _ in batch])
    mean_sum_rate = float(np.mean([s.sum_rate for s in samples]))
    mean_violation = float(np.mean((powers - pmaxes) / sizes))

    grad_norm = float(np.linalg.norm(grad))
    if not np.isfinite(grad_norm):
        logger.warning(f"Non-finite primal gradient; step aborted (lambda={dual.lam:.4g})")
        diag = StepDiagnostics(mean_sum_rate, mean_violation, dual.lam, grad_norm, aborted=True)
        return params, dual, diag

    if grad_norm > problem.grad_clip:
        grad = grad * (problem.grad_clip / grad_norm)
    new_params = params.with_taps(params.taps + problem.primal_step * grad)
    new_dual = dual.ascend(float(powers.mean()), float(pmaxes.mean()), problem.dual_step)
    return new_params, new_dual, StepDiagnostics(mean_sum_rate, mean_violation, new_dual.lam, grad_norm)


def train(
    problem: AllocationProblem,
    graphs: Sequence[GeometricGraph],
    model: ChannelModel,
    params_init: GnnParams,
    seed: int,
    progress: bool = True,
) -> tuple[GnnParams, TrainingTrace]:
    """
    Run problem.iters primal-dual updates, each on problem.batch fresh channel
    draws over randomly chosen training graphs.
    """
    if not graphs:
        raise ValueError("training dataset is empty")
    _check_policy(params_init)

    rng = np.random.default_rng(derive_seed(seed, "graphs"))
    params, dual = params_init, DualState(problem.dual_init)
    trace = TrainingTrace()
    for it in tqdm(range(problem.iters), desc="Training", disable=not progress):
        picks = rng.integers(len(graphs), size=problem.batch)
        batch = []
        for b, g_idx in enumerate(picks):
            real = draw_channel(graphs[g_idx], model, derive_seed(seed, "channel", it, b))
            batch.append((real, node_signal(real, model.signal)))
        params, dual, diag = reinforce_step(params, dual, batch, problem, derive_seed(seed, "step", it))
        trace.append(it, diag)

    if trace.aborted_steps:
        logger.warning(f"{trace.aborted_steps} of {problem.iters} training steps aborted")
    return params, trace
