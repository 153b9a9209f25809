import numpy as np
import pytest

from src.channel import ChannelModel, ChannelRealization, draw_channel, normalized_gso
from src.geometry import GridSpec, make_grid, perturb_to_rgg
from src.policy import (
    METRICS_COLUMNS,
    AllocationProblem,
    FixedPolicy,
    GnnPolicy,
    WmmsePolicy,
    evaluate_policy,
)


@pytest.fixture
def graphs():
    return [perturb_to_rgg(make_grid(GridSpec(side=3)), 0.1, seed=s) for s in range(3)]


def test_all_off_policy(graphs):
    record = evaluate_policy(FixedPolicy(0.0), graphs, ChannelModel(), AllocationProblem(), trials=4, seed=0)
    assert record.sum_rate_mean == 0.0
    assert record.violation_mean == pytest.approx(-0.3)
    assert record.violation_std == pytest.approx(0.0)
    assert record.policy == "fixed"
    assert record.scale == 9


def test_all_on_policy(graphs):
    record = evaluate_policy(FixedPolicy(1.0), graphs, ChannelModel(), AllocationProblem(), trials=3, seed=0)
    assert record.violation_mean == pytest.approx(0.7)
    assert record.sum_rate_mean > 0
    assert record.sum_rate_std == pytest.approx(0.0)


def test_workers_do_not_change_results(graphs, policy_params):
    policy = GnnPolicy(policy_params)
    serial = evaluate_policy(policy, graphs, ChannelModel(), AllocationProblem(), trials=5, seed=2, workers=1)
    threaded = evaluate_policy(policy, graphs, ChannelModel(), AllocationProblem(), trials=5, seed=2, workers=3)
    assert np.array_equal(serial.sum_rates, threaded.sum_rates)
    assert serial.row() == threaded.row()


def test_record_shapes_and_row(graphs):
    record = evaluate_policy(WmmsePolicy(iters=5), graphs, ChannelModel(), AllocationProblem(), trials=6, seed=1, scale=10)
    assert record.sum_rates.shape == (6, 3)
    assert list(record.row()) == METRICS_COLUMNS
    assert record.scale == 10
    assert record.per_node_sum_rate == pytest.approx(record.sum_rate_mean / 9)
    assert "wmmse" in str(record)


def test_policies_share_channels(graphs):
    # an all-on policy is deterministic given the channel, so equal seeds give equal rates
    a = evaluate_policy(FixedPolicy(1.0), graphs, ChannelModel(), AllocationProblem(), trials=2, seed=7)
    b = evaluate_policy(FixedPolicy(1.0, name="other"), graphs, ChannelModel(), AllocationProblem(), trials=2, seed=7)
    assert np.array_equal(a.sum_rates, b.sum_rates)


@pytest.mark.parametrize("trials", [0, -1])
def test_evaluation_needs_trials(graphs, trials):
    with pytest.raises(ValueError):
        evaluate_policy(FixedPolicy(0.5), graphs, ChannelModel(), AllocationProblem(), trials=trials, seed=0)


def test_evaluation_needs_graphs():
    with pytest.raises(ValueError):
        evaluate_policy(FixedPolicy(0.5), [], ChannelModel(), AllocationProblem(), trials=1, seed=0)


def test_trials_reuse_each_graph_channel(graphs):
    record = evaluate_policy(FixedPolicy(1.0), graphs, ChannelModel(), AllocationProblem(), trials=4, seed=3)
    # a deterministic allocation on a fixed channel repeats its rate in every trial
    assert np.all(record.sum_rates == record.sum_rates[0])
    assert np.unique(record.sum_rates[0]).size == len(graphs)


def test_gnn_policy_is_permutation_equivariant(policy_params, rgg8):
    real = draw_channel(rgg8, ChannelModel(), seed=5)
    policy = GnnPolicy(policy_params)
    q = policy.probs(real, 1.0, 0.3 * real.n)
    rng = np.random.default_rng(17)
    for _ in range(5):
        perm = rng.permutation(real.n)
        gains = real.gains[np.ix_(perm, perm)]
        permuted = ChannelRealization(gains=gains, direct=real.direct[perm], gso=normalized_gso(gains), noise_power=real.noise_power)
        assert np.allclose(policy.probs(permuted, 1.0, 0.3 * real.n), q[perm], rtol=0, atol=1e-10)
