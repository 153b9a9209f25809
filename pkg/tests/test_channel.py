import numpy as np
import pytest
from scipy import sparse

from src.channel import ChannelModel, Fading, SignalKind, draw_channel, node_signal, normalized_gso, rates, sum_rate
from src.errors import EmptyGraph, InvalidPower
from src.geometry import GeometricGraph, GraphKind


def _graph(positions):
    n = len(positions)
    return GeometricGraph(
        positions=np.array(positions, dtype=float),
        adjacency=sparse.csr_array((n, n)),
        kind=GraphKind.RGG,
        spacing=1.0,
        radius=1.2,
        deg_grid=4,
    )


def test_draw_is_deterministic(rgg8):
    a = draw_channel(rgg8, ChannelModel(), seed=3)
    b = draw_channel(rgg8, ChannelModel(), seed=3)
    c = draw_channel(rgg8, ChannelModel(), seed=4)
    assert np.array_equal(a.gains, b.gains)
    assert np.array_equal(a.direct, b.direct)
    assert not np.array_equal(a.gains, c.gains)


def test_gains_shape_and_gso(rgg8):
    real = draw_channel(rgg8, ChannelModel(), seed=1)
    assert real.n == rgg8.n
    assert real.gains.shape == (rgg8.n, rgg8.n)
    assert np.all(np.diag(real.gains) == 0)
    assert np.all(real.gains >= 0)
    assert np.allclose(real.gso, real.gso.T)
    assert np.max(np.abs(np.linalg.eigvalsh(real.gso))) == pytest.approx(1.0)


def test_path_loss_without_fading():
    graph = _graph([[0.0, 0.0], [2.0, 0.0]])
    real = draw_channel(graph, ChannelModel(fading=Fading.NONE, pathloss_exponent=2.0), seed=0)
    assert real.gains[0, 1] == pytest.approx(0.25)
    assert real.gains[1, 0] == pytest.approx(0.25)
    # direct link at half the spacing
    assert np.allclose(real.direct, 4.0)


def test_direct_link_distance_override():
    graph = _graph([[0.0, 0.0], [2.0, 0.0]])
    real = draw_channel(graph, ChannelModel(fading=Fading.NONE, pathloss_exponent=2.0, direct_link_distance=0.25), seed=0)
    assert np.allclose(real.direct, 16.0)


def test_coincident_nodes_are_capped():
    graph = _graph([[0.0, 0.0], [0.0, 0.0], [3.0, 0.0]])
    real = draw_channel(graph, ChannelModel(fading=Fading.NONE, pathloss_exponent=2.0), seed=0)
    assert real.capped_links == 1
    assert real.gains[0, 1] == pytest.approx(0.1 ** -2.0)
    assert np.all(np.isfinite(real.gains))


def test_sparsify_radius_drops_far_links():
    graph = _graph([[0.0, 0.0], [1.0, 0.0], [5.0, 0.0]])
    real = draw_channel(graph, ChannelModel(fading=Fading.NONE, sparsify_radius=2.0), seed=0)
    assert real.gains[0, 1] > 0
    assert real.gains[0, 2] == 0
    assert real.gains[2, 1] == 0


def test_empty_graph_has_no_channel():
    with pytest.raises(EmptyGraph):
        draw_channel(_graph(np.zeros((0, 2))), ChannelModel(), seed=0)


def test_rates_closed_form():
    graph = _graph([[0.0, 0.0], [2.0, 0.0]])
    real = draw_channel(graph, ChannelModel(fading=Fading.NONE, pathloss_exponent=2.0), seed=0)
    r = rates(real, np.array([1.0, 0.0]))
    assert r[0] == pytest.approx(np.log(1.0 + 4.0))
    assert r[1] == 0.0
    both = rates(real, np.array([1.0, 1.0]))
    assert both[0] == pytest.approx(np.log(1.0 + 4.0 / (1.0 + 0.25)))
    assert sum_rate(real, np.array([1.0, 1.0])) == pytest.approx(both.sum())


def test_rates_reject_invalid_powers(rgg8):
    real = draw_channel(rgg8, ChannelModel(), seed=1)
    assert np.all(rates(real, np.zeros(rgg8.n)) == 0)
    with pytest.raises(InvalidPower):
        rates(real, -np.ones(rgg8.n))
    with pytest.raises(InvalidPower):
        rates(real, np.ones(rgg8.n + 1))


def test_node_signal(rgg8):
    real = draw_channel(rgg8, ChannelModel(), seed=1)
    assert np.mean(node_signal(real, SignalKind.DIRECT)) == pytest.approx(1.0)
    assert np.array_equal(node_signal(real, SignalKind.ONES), np.ones(rgg8.n))


def test_normalized_gso_of_zero_gains():
    assert np.array_equal(normalized_gso(np.zeros((3, 3))), np.zeros((3, 3)))


def test_rates_three_node_hand_computation():
    # direct gains 0.5^-2 = 4; cross gains 1/4 (d=2), 1/13 (d=sqrt(13)), 1/9 (d=3)
    graph = _graph([[0.0, 0.0], [2.0, 0.0], [2.0, 3.0]])
    real = draw_channel(graph, ChannelModel(fading=Fading.NONE, pathloss_exponent=2.0), seed=0)
    pair = rates(real, np.array([1.0, 1.0, 0.0]))
    assert np.allclose(pair, [np.log(21.0 / 5.0), np.log(21.0 / 5.0), 0.0], rtol=0, atol=1e-12)
    full = rates(real, np.ones(3))
    expected = [
        np.log1p(4.0 / (1.0 + 1.0 / 4.0 + 1.0 / 13.0)),
        np.log1p(4.0 / (1.0 + 1.0 / 4.0 + 1.0 / 9.0)),
        np.log1p(4.0 / (1.0 + 1.0 / 13.0 + 1.0 / 9.0)),
    ]
    assert np.allclose(full, expected, rtol=0, atol=1e-12)


def test_switching_off_an_interferer_never_lowers_other_rates(rgg8):
    rng = np.random.default_rng(21)
    for seed in range(10):
        real = draw_channel(rgg8, ChannelModel(), seed=seed)
        p = (rng.random(real.n) < 0.5).astype(float)
        before = rates(real, p)
        for k in np.flatnonzero(p):
            off = p.copy()
            off[k] = 0.0
            after = rates(real, off)
            others = np.arange(real.n) != k
            assert np.all(after[others] >= before[others] - 1e-12)


def test_rayleigh_fading_has_unit_mean():
    graph = _graph([[0.0, 0.0], [2.0, 0.0]])
    model = ChannelModel(fading=Fading.RAYLEIGH, pathloss_exponent=2.0)
    fades = []
    for seed in range(10_000):
        real = draw_channel(graph, model, seed=seed)
        # path loss 2^-2 on the cross link, 0.5^-2 on the direct links
        fades.extend([real.gains[0, 1] * 4.0, real.gains[1, 0] * 4.0, *(real.direct / 4.0)])
    assert np.mean(fades) == pytest.approx(1.0, rel=0.03)
