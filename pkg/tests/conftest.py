import sys
from pathlib import Path

import numpy as np
import pytest

BASE_PATH = Path(__file__).parent.parent.resolve()
sys.path.insert(0, str(BASE_PATH))

from src.channel import ChannelModel, draw_channel  # noqa: E402
from src.geometry import GridSpec, make_grid, perturb_to_rgg  # noqa: E402
from src.gnn import GnnParams, Nonlinearity, NonlinearityKind, OutputSquash  # noqa: E402

GOLDEN_PATH = BASE_PATH / "tests" / "golden"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def grid4():
    return make_grid(GridSpec(side=4))


@pytest.fixture
def torus8():
    return make_grid(GridSpec(side=8, torus=True))


@pytest.fixture
def rgg8():
    return perturb_to_rgg(make_grid(GridSpec(side=8)), 0.1, seed=7)


@pytest.fixture
def tiny_channel():
    """Four-node channel, small enough to enumerate all 2^n allocations."""
    graph = perturb_to_rgg(make_grid(GridSpec(side=2)), 0.1, seed=3)
    return draw_channel(graph, ChannelModel(), seed=11)


@pytest.fixture
def policy_params():
    taps = np.array([[1.0, 0.3, -0.2], [0.5, -0.4, 0.1]])
    return GnnParams(taps=taps, nonlinearity=Nonlinearity(NonlinearityKind.LEAKY_RELU, 0.1), output_squash=OutputSquash.SIGMOID)
