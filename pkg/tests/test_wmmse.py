import numpy as np
import pytest
from scipy import sparse

from src.channel import ChannelModel, Fading, draw_channel
from src.geometry import GeometricGraph, GraphKind, GridSpec, make_grid, perturb_to_rgg
from src.policy import wmmse_policy, wmmse_solve


def _fixtures(count):
    for i in range(count):
        side = 3 + i % 3
        graph = perturb_to_rgg(make_grid(GridSpec(side=side)), 0.2, seed=i)
        yield draw_channel(graph, ChannelModel(), seed=100 + i)


def test_sum_rate_never_decreases():
    for real in _fixtures(100):
        pmax = 0.3 * real.n
        result = wmmse_solve(real, 1.0, pmax, iters=30)
        assert result.monotone
        assert result.powers.sum() <= pmax + 1e-9
        assert np.all(result.powers <= 1.0 + 1e-12)
        assert np.all(result.powers >= 0)


def test_probabilities_are_scaled_powers():
    real = next(_fixtures(1))
    result = wmmse_solve(real, 2.0, 0.5 * real.n, iters=10)
    assert np.allclose(result.probs, result.powers / 2.0)
    assert np.all((result.probs >= 0) & (result.probs <= 1))
    powers, probs = wmmse_policy(real, 2.0, 0.5 * real.n, iters=10)
    assert np.array_equal(powers, result.powers)
    assert np.array_equal(probs, result.probs)


def test_surrogate_has_one_entry_per_iteration():
    real = next(_fixtures(1))
    assert len(wmmse_solve(real, 1.0, 0.3 * real.n, iters=7).surrogate) == 7


def test_single_link_uses_full_power():
    graph = GeometricGraph(
        positions=np.zeros((1, 2)),
        adjacency=sparse.csr_array((1, 1)),
        kind=GraphKind.RGG,
        spacing=1.0,
        radius=1.2,
        deg_grid=4,
    )
    real = draw_channel(graph, ChannelModel(fading=Fading.NONE, pathloss_exponent=2.0), seed=0)
    result = wmmse_solve(real, 1.0, 1.0, iters=3)
    assert result.powers[0] == pytest.approx(1.0)


def test_budget_binds_when_small():
    real = next(_fixtures(1))
    result = wmmse_solve(real, 1.0, 0.05 * real.n, iters=20)
    assert result.powers.sum() <= 0.05 * real.n + 1e-9


def test_needs_an_iteration():
    real = next(_fixtures(1))
    with pytest.raises(ValueError):
        wmmse_solve(real, 1.0, 1.0, iters=0)


def _symmetric_channel(positions):
    n = len(positions)
    graph = GeometricGraph(
        positions=np.array(positions, dtype=float),
        adjacency=sparse.csr_array((n, n)),
        kind=GraphKind.RGG,
        spacing=1.0,
        radius=1.2,
        deg_grid=4,
    )
    return draw_channel(graph, ChannelModel(fading=Fading.NONE, pathloss_exponent=2.0), seed=0)


def test_symmetric_two_user_case():
    # direct gain 4, cross gain 1e-2 both ways
    real = _symmetric_channel([[0.0, 0.0], [10.0, 0.0]])
    loose = wmmse_solve(real, 1.0, 2.0, iters=20)
    assert np.allclose(loose.powers, [1.0, 1.0])
    tight = wmmse_solve(real, 1.0, 1.0, iters=20)
    assert tight.powers[0] == pytest.approx(tight.powers[1], rel=1e-12)
    assert np.allclose(tight.powers, [0.5, 0.5], rtol=1e-6)


def test_three_user_fixed_point():
    # equilateral triangle: the equal-power start sqrt(Pmax / 3) is already the WMMSE fixed point
    real = _symmetric_channel([[0.0, 0.0], [2.0, 0.0], [1.0, np.sqrt(3.0)]])
    result = wmmse_solve(real, 1.0, 1.2, iters=50)
    assert np.allclose(result.powers, [0.4, 0.4, 0.4], rtol=1e-6)
    assert np.allclose(result.probs, result.powers)
    assert result.monotone
    assert result.surrogate[-1] == pytest.approx(3.0 * np.log1p(1.6 / (1.0 + 0.2)), rel=1e-6)
