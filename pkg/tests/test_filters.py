import numpy as np
import pytest

from src.errors import DimensionError
from src.geometry import GridSpec, make_grid, mask_matrix
from src.gnn import (
    FilterTaps,
    field_to_signal,
    filter_apply,
    filter_apply_transpose,
    grid_filter_apply,
    plane_filter_apply,
    reshape_signal,
    shifted_signals,
    side_of,
)


@pytest.mark.parametrize("side", [4, 8, 16, 22])
@pytest.mark.parametrize("radius", [1.2, 1.5])
def test_graph_filter_matches_circular_convolution(side, radius):
    rng = np.random.default_rng(side * 10 + int(radius * 10))
    grid = make_grid(GridSpec(side=side, radius=radius, torus=True))
    mask = mask_matrix(grid)
    for _ in range(5):
        K = int(rng.integers(0, 6))
        taps = rng.normal(size=K + 1)
        x = rng.standard_normal(grid.n)
        graph_path = filter_apply(taps, grid.adjacency, x)
        conv_path = field_to_signal(grid_filter_apply(taps, mask, reshape_signal(x, side)))
        assert np.max(np.abs(graph_path - conv_path)) <= 1e-9


def test_single_hop_is_neighbor_average(torus8):
    x = np.zeros(torus8.n)
    x[0] = 1.0
    y = filter_apply([0.0, 1.0], torus8.adjacency, x)
    # neighbors of node 0 on the 8x8 torus: 1, 7, 8, 56
    assert set(np.flatnonzero(y)) == {1, 7, 8, 56}
    assert np.allclose(y[[1, 7, 8, 56]], 0.25)


def test_shifted_signals_stack(rgg8, rng):
    x = rng.standard_normal(rgg8.n)
    shifts = shifted_signals(rgg8.adjacency, x, 3)
    assert shifts.shape == (4, rgg8.n)
    assert np.allclose(shifts[0], x)
    assert np.allclose(shifts[2], rgg8.dense() @ rgg8.dense() @ x)


def test_filter_matches_dense_powers(rgg8, rng):
    taps = rng.normal(size=4)
    x = rng.standard_normal(rgg8.n)
    S = rgg8.dense()
    expected = sum(h * np.linalg.matrix_power(S, k) @ x for k, h in enumerate(taps))
    assert np.allclose(filter_apply(taps, rgg8.adjacency, x), expected, atol=1e-12)


def test_transpose_is_adjoint(rng):
    S = rng.normal(size=(12, 12))
    taps = rng.normal(size=3)
    x, g = rng.standard_normal(12), rng.standard_normal(12)
    lhs = filter_apply(taps, S, x) @ g
    rhs = x @ filter_apply_transpose(taps, S, g)
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_filter_rejects_mismatched_signal(grid4):
    with pytest.raises(DimensionError):
        filter_apply([1.0, 0.5], grid4.adjacency, np.ones(5))


def test_filter_taps_validation():
    with pytest.raises(DimensionError):
        FilterTaps(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        FilterTaps([1.0, np.nan])
    assert FilterTaps([1.0, 2.0, 3.0]).order == 2


def test_reshape_round_trip_and_layout():
    x = np.arange(9.0)
    field = reshape_signal(x, 3)
    assert field[1, 0] == 1.0  # n1 = 1, n2 = 0
    assert field[0, 1] == 3.0  # n1 = 0, n2 = 1
    assert np.array_equal(field_to_signal(field), x)
    with pytest.raises(DimensionError):
        reshape_signal(np.arange(8.0), 3)


def test_side_of():
    assert side_of(49) == 7
    with pytest.raises(DimensionError):
        side_of(50)


def test_grid_filter_rejects_even_mask():
    with pytest.raises(DimensionError):
        grid_filter_apply([1.0, 1.0], np.ones((2, 2)), np.ones((4, 4)))


def test_plane_filter_zero_pads(torus8):
    mask = mask_matrix(torus8)
    field = np.zeros((5, 5))
    field[0, 0] = 1.0
    out = plane_filter_apply([0.0, 1.0], mask, field)
    assert out[1, 0] == pytest.approx(0.25)
    assert out[0, 1] == pytest.approx(0.25)
    assert out[4, 0] == 0.0  # no wrap-around
    assert np.allclose(plane_filter_apply([2.0], mask, field), 2.0 * field)


def test_filter_superposition(rgg8, rng):
    h, g = rng.normal(size=4), rng.normal(size=4)
    x, y = rng.normal(size=rgg8.n), rng.normal(size=rgg8.n)
    alpha, beta = 0.7, -1.3
    S = rgg8.adjacency
    in_signal = filter_apply(h, S, alpha * x + beta * y) - (alpha * filter_apply(h, S, x) + beta * filter_apply(h, S, y))
    in_taps = filter_apply(alpha * h + beta * g, S, x) - (alpha * filter_apply(h, S, x) + beta * filter_apply(g, S, x))
    assert np.max(np.abs(in_signal)) <= 1e-12
    assert np.max(np.abs(in_taps)) <= 1e-12
