import itertools

import numpy as np
import pytest

from src.channel import ChannelModel, draw_channel, node_signal, rates
from src.errors import DimensionError, InvalidPower
from src.geometry import GridSpec, make_grid, perturb_to_rgg
from src.gnn import GnnParams, OutputSquash, gnn_backward, gnn_forward
from src.policy import (
    AllocationProblem,
    DualState,
    TRACE_COLUMNS,
    baseline_weights,
    enumerate_lagrangian_gradient,
    expected_lagrangian,
    expected_score_estimate,
    lagrangian,
    reinforce_gradient,
    reinforce_step,
    sample_policy,
    score_gradient,
    train,
)


def test_budget():
    problem = AllocationProblem()
    assert problem.budget(10) == pytest.approx(3.0)
    assert AllocationProblem(pmax=2.0).budget(10) == 2.0
    with pytest.raises(InvalidPower):
        AllocationProblem(pmax=20.0).budget(10)


def test_dual_ascent_is_projected():
    assert DualState(0.0).ascend(1.0, 3.0, 0.5).lam == 0.0
    assert DualState(0.0).ascend(5.0, 3.0, 0.5).lam == pytest.approx(1.0)
    assert DualState(1.0).ascend(0.0, 3.0, 0.1).lam == pytest.approx(0.7)


def test_sample_is_consistent(policy_params, tiny_channel):
    x = node_signal(tiny_channel)
    sample = sample_policy(policy_params, tiny_channel, x, p0=1.0, seed=5)
    again = sample_policy(policy_params, tiny_channel, x, p0=1.0, seed=5)
    assert np.array_equal(sample.allocation, again.allocation)
    assert set(np.unique(sample.allocation)) <= {0.0, 1.0}
    assert sample.total_power == pytest.approx(sample.allocation.sum())
    assert sample.sum_rate == pytest.approx(sample.rates.sum())
    expected_log_prob = np.sum(np.where(sample.bits, np.log(sample.probs), np.log1p(-sample.probs)))
    assert sample.log_prob == pytest.approx(expected_log_prob)
    assert lagrangian(sample, 0.5, 2.0) == pytest.approx(sample.sum_rate - 0.5 * (sample.total_power - 2.0))


def test_sample_follows_seeded_uniforms(policy_params, tiny_channel):
    x = node_signal(tiny_channel)
    q, _ = gnn_forward(policy_params, tiny_channel.gso, x)
    sample = sample_policy(policy_params, tiny_channel, x, p0=2.0, seed=5)
    # bit i is on exactly when the i-th uniform of default_rng(seed) falls below q_i
    bits = np.random.default_rng(5).random(tiny_channel.n) < q
    assert np.array_equal(sample.bits, bits)
    assert np.array_equal(sample.allocation, 2.0 * bits)
    assert sample.sum_rate == pytest.approx(rates(tiny_channel, 2.0 * bits).sum(), abs=1e-12)


def test_policy_needs_sigmoid(tiny_channel):
    params = GnnParams(taps=[[1.0, 0.5]], output_squash=OutputSquash.NONE)
    with pytest.raises(ValueError):
        sample_policy(params, tiny_channel, np.ones(tiny_channel.n), p0=1.0, seed=0)


def test_expected_lagrangian_by_enumeration(policy_params, tiny_channel):
    x = node_signal(tiny_channel)
    q, _ = gnn_forward(policy_params, tiny_channel.gso, x)
    assert expected_lagrangian(policy_params, tiny_channel, x, 1.0, 0.0, 2.0) > 0
    # with lambda, the constraint term adds -lambda * (sum q - Pmax)
    base = expected_lagrangian(policy_params, tiny_channel, x, 1.0, 0.0, 2.0)
    penalized = expected_lagrangian(policy_params, tiny_channel, x, 1.0, 0.5, 2.0)
    assert penalized == pytest.approx(base - 0.5 * (q.sum() - 2.0))


def test_score_estimator_mean_equals_exact_gradient(policy_params, tiny_channel):
    x = node_signal(tiny_channel)
    exact = enumerate_lagrangian_gradient(policy_params, tiny_channel, x, 1.0, 0.3, 2.0)
    estimate = expected_score_estimate(policy_params, tiny_channel, x, 1.0, 0.3, 2.0)
    assert np.max(np.abs(exact - estimate)) <= 1e-10 * max(1.0, np.abs(exact).max())


def test_exact_gradient_matches_finite_differences(policy_params, tiny_channel):
    x = node_signal(tiny_channel)
    exact = enumerate_lagrangian_gradient(policy_params, tiny_channel, x, 1.0, 0.3, 2.0)
    eps = 1e-6
    for idx in np.ndindex(policy_params.taps.shape):
        up, down = policy_params.taps.copy(), policy_params.taps.copy()
        up[idx] += eps
        down[idx] -= eps
        numeric = (
            expected_lagrangian(policy_params.with_taps(up), tiny_channel, x, 1.0, 0.3, 2.0)
            - expected_lagrangian(policy_params.with_taps(down), tiny_channel, x, 1.0, 0.3, 2.0)
        ) / (2 * eps)
        assert numeric == pytest.approx(exact[idx], rel=1e-4, abs=1e-7)


def test_enumeration_is_limited(policy_params, rgg8):
    real = draw_channel(rgg8, ChannelModel(), seed=0)
    with pytest.raises(DimensionError):
        expected_lagrangian(policy_params, real, node_signal(real), 1.0, 0.0, 10.0)


def test_score_gradient_of_fixed_allocation(policy_params, tiny_channel):
    x = node_signal(tiny_channel)
    bits = np.array([True, False, True, False])
    value, grad = score_gradient(policy_params, tiny_channel, x, bits, 1.0, 0.0, 2.0)
    q, tape = gnn_forward(policy_params, tiny_channel.gso, x)
    upstream = np.where(bits, 1.0 / q, -1.0 / (1.0 - q))
    assert np.allclose(grad, gnn_backward(tape, upstream))
    assert value > 0


def test_baseline_weights():
    assert np.allclose(baseline_weights([1.0, 3.0]), [-0.5, 0.5])
    assert np.allclose(baseline_weights([2.0, 2.0, 5.0]), [-1 / 3, -1 / 3, 2 / 3])
    # a single sample has no baseline
    assert np.allclose(baseline_weights([2.0]), [2.0])


def test_reinforce_gradient_averages_over_batch(policy_params, tiny_channel):
    x = node_signal(tiny_channel)
    grad, samples = reinforce_gradient(policy_params, [(tiny_channel, x)] * 3, AllocationProblem(pmax=2.0), lam=0.3, seed=4)
    values, scores = zip(*(score_gradient(policy_params, tiny_channel, x, s.bits, 1.0, 0.3, 2.0) for s in samples))
    expected = sum((v - np.mean(values)) / 3 * g for v, g in zip(values, scores))
    assert np.allclose(grad, expected, rtol=1e-10, atol=1e-12)


def test_batch_of_two_estimates_half_the_exact_gradient(policy_params, tiny_channel):
    x = node_signal(tiny_channel)
    q, _ = gnn_forward(policy_params, tiny_channel.gso, x)
    outcomes = [np.array(bits) for bits in itertools.product([False, True], repeat=q.size)]
    probs = [float(np.prod(np.where(bits, q, 1.0 - q))) for bits in outcomes]
    scored = [score_gradient(policy_params, tiny_channel, x, bits, 1.0, 0.3, 2.0) for bits in outcomes]

    mean = np.zeros_like(policy_params.taps)
    for (p1, (v1, g1)), (p2, (v2, g2)) in itertools.product(zip(probs, scored), repeat=2):
        w1, w2 = baseline_weights([v1, v2])
        mean += p1 * p2 * (w1 * g1 + w2 * g2)

    exact = enumerate_lagrangian_gradient(policy_params, tiny_channel, x, 1.0, 0.3, 2.0)
    assert np.allclose(mean, 0.5 * exact, rtol=1e-8, atol=1e-10)


@pytest.mark.slow
def test_reinforce_matches_exact_gradient_in_expectation(policy_params, tiny_channel):
    x = node_signal(tiny_channel)
    problem = AllocationProblem(pmax=2.0)
    exact = enumerate_lagrangian_gradient(policy_params, tiny_channel, x, 1.0, 0.3, 2.0)

    # per-draw spread of the estimator, through the Jacobian dq/dH
    q, _ = gnn_forward(policy_params, tiny_channel.gso, x)
    rows = []
    for e in np.eye(q.size):
        _, tape = gnn_forward(policy_params, tiny_channel.gso, x)
        rows.append(gnn_backward(tape, e).ravel())
    jac_t = np.stack(rows, axis=1)
    rng = np.random.default_rng(0)
    draws = 20_000
    bits = rng.random((draws, q.size)) < q
    powers = bits.astype(float)
    interference = powers @ tiny_channel.gains
    values = np.sum(np.log1p(tiny_channel.direct * powers / (tiny_channel.noise_power + interference)), axis=1) - 0.3 * (powers.sum(axis=1) - 2.0)
    upstream = np.where(bits, 1.0 / q, -1.0 / (1.0 - q))
    per_draw = ((values - values.mean())[:, None] * upstream) @ jac_t.T
    samples = 100_000
    stderr = np.linalg.norm(per_draw.std(axis=0)) / np.sqrt(samples)

    grad, _ = reinforce_gradient(policy_params, [(tiny_channel, x)] * samples, problem, lam=0.3, seed=1)
    assert np.linalg.norm(grad - exact) <= 0.02 * np.linalg.norm(exact) + 5 * stderr


def test_reinforce_step_updates_params_and_dual(policy_params, tiny_channel):
    x = node_signal(tiny_channel)
    problem = AllocationProblem(pmax=1.0, dual_step=0.1)
    params, dual, diag = reinforce_step(policy_params, DualState(0.0), [(tiny_channel, x)] * 8, problem, seed=3)
    assert not diag.aborted
    assert not np.array_equal(params.taps, policy_params.taps)
    assert np.linalg.norm(params.taps - policy_params.taps) <= problem.primal_step * problem.grad_clip + 1e-12
    assert dual.lam >= 0.0
    assert diag.lam == dual.lam


def test_non_finite_gradient_aborts_step(policy_params, tiny_channel):
    x = node_signal(tiny_channel)
    dual = DualState(np.inf)
    params, new_dual, diag = reinforce_step(policy_params, dual, [(tiny_channel, x)] * 4, AllocationProblem(pmax=2.0), seed=0)
    assert diag.aborted
    assert params is policy_params
    assert new_dual is dual


def test_training_is_deterministic(policy_params):
    graphs = [perturb_to_rgg(make_grid(GridSpec(side=3)), 0.1, seed=s) for s in range(2)]
    problem = AllocationProblem(iters=6, batch=3)
    a, trace_a = train(problem, graphs, ChannelModel(), policy_params, seed=8, progress=False)
    b, trace_b = train(problem, graphs, ChannelModel(), policy_params, seed=8, progress=False)
    assert np.array_equal(a.taps, b.taps)
    assert len(trace_a) == 6
    frame = trace_a.to_frame()
    assert list(frame.columns) == TRACE_COLUMNS
    assert frame.equals(trace_b.to_frame())
    assert list(frame["iter"]) == list(range(6))
    assert np.all(frame["lambda"] >= 0)


def test_training_needs_graphs(policy_params):
    with pytest.raises(ValueError):
        train(AllocationProblem(iters=1), [], ChannelModel(), policy_params, seed=0, progress=False)
