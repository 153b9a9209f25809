"""
Interference channel aligned with a geometric graph.

Transmitter i serves a receiver at fixed distance d0; the receivers of the
other nodes hear transmitter i through the path loss of the node distance.
Cross gains are power gains |h_ij|^2 = d(i, j)^-gamma * F_ij.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field
from scipy import linalg
from scipy.spatial.distance import cdist

from ..errors import EmptyGraph, InvalidPower
from ..geometry import GeometricGraph

# ============== CONFIGURATION ==============
DEFAULT_PATHLOSS_EXPONENT = 2.2
DEFAULT_NOISE_POWER = 1.0
DIRECT_DISTANCE_RATIO = 0.5  # d0 = ratio * a when not configured
MIN_DISTANCE_RATIO = 0.1  # d_min = ratio * a caps coincident links


class Fading(str, Enum):
    RAYLEIGH = "rayleigh"
    NONE = "none"


class SignalKind(str, Enum):
    DIRECT = "direct"  # direct gains scaled to unit mean
    ONES = "ones"


class ChannelModel(BaseModel):
    """Path loss and fading of the interference channel."""
    pathloss_exponent: float = Field(default=DEFAULT_PATHLOSS_EXPONENT, gt=0, description="Path-loss exponent gamma")
    fading: Fading = Field(default=Fading.RAYLEIGH, description="Small-scale fading: rayleigh (unit-mean exponential power) or none")
    noise_power: float = Field(default=DEFAULT_NOISE_POWER, gt=0, description="Receiver noise power eta^2")
    sparsify_radius: Optional[float] = Field(default=None, gt=0, description="Zero cross gains beyond this distance (meters); unset keeps all links")
    direct_link_distance: Optional[float] = Field(default=None, gt=0, description="Transmitter-receiver distance d0 (meters); unset uses half the grid spacing")
    signal: SignalKind = Field(default=SignalKind.DIRECT, description="GNN input signal: direct (unit-mean direct gains) or ones")

    model_config = {"extra": "forbid"}


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """
    One fading draw.

    gains[i, j] is the power gain from transmitter i to receiver j (zero
    diagonal); direct[i] is the gain of link i to its own receiver.
    """
    gains: np.ndarray
    direct: np.ndarray
    gso: np.ndarray
    noise_power: float
    seed: Optional[int] = None
    capped_links: int = 0

    @property
    def n(self) -> int:
        return self.direct.shape[0]


def normalized_gso(gains: np.ndarray) -> np.ndarray:
    sym = 0.5 * (gains + gains.T)
    n = sym.shape[0]
    if n == 0 or not np.any(sym):
        return np.zeros_like(sym)
    # Nonnegative symmetric: the top eigenvalue is the spectral norm
    top = linalg.eigh(sym, eigvals_only=True, subset_by_index=[n - 1, n - 1])[0]
    return sym / top


def draw_channel(graph: GeometricGraph, model: ChannelModel, seed: int) -> ChannelRealization:
    """Path loss times fading for every ordered node pair, plus the direct links."""
    n = graph.n
    if n == 0:
        raise EmptyGraph("cannot draw a channel on an empty graph")

    rng = np.random.default_rng(seed)
    gamma = model.pathloss_exponent
    d_min = MIN_DISTANCE_RATIO * graph.spacing
    d0 = model.direct_link_distance or DIRECT_DISTANCE_RATIO * graph.spacing

    dist = cdist(graph.positions, graph.positions)
    off_diag = ~np.eye(n, dtype=bool)
    capped = off_diag & (dist < d_min)
    capped_links = int(capped.sum() // 2)
    if capped_links:
        logger.warning(f"{capped_links} links closer than d_min={d_min:.3g} m; gains capped")

    if model.fading is Fading.RAYLEIGH:
        cross_fading = rng.exponential(1.0, size=(n, n))
        direct_fading = rng.exponential(1.0, size=n)
    else:
        cross_fading = np.ones((n, n))
        direct_fading = np.ones(n)

    gains = np.maximum(dist, d_min) ** (-gamma) * cross_fading
    gains[~off_diag] = 0.0
    if model.sparsify_radius is not None:
        gains[dist > model.sparsify_radius] = 0.0

    direct = d0 ** (-gamma) * direct_fading
    return ChannelRealization(
        gains=gains,
        direct=direct,
        gso=normalized_gso(gains),
        noise_power=model.noise_power,
        seed=int(seed),
        capped_links=capped_links,
    )


def rates(real: ChannelRealization, p: np.ndarray) -> np.ndarray:
    """r_i = log(1 + direct_i p_i / (eta^2 + sum_{k != i} gains[k, i] p_k)), natural log."""
    p = np.asarray(p, dtype=float)
    if p.shape != (real.n,):
        raise InvalidPower(f"power vector has shape {p.shape}, expected ({real.n},)")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise InvalidPower("transmit powers must be finite and nonnegative")
    interference = real.gains.T @ p
    return np.log1p(real.direct * p / (real.noise_power + interference))


def sum_rate(real: ChannelRealization, p: np.ndarray) -> float:
    return float(rates(real, p).sum())


def node_signal(real: ChannelRealization, kind: SignalKind = SignalKind.DIRECT) -> np.ndarray:
    """GNN input x: direct gains over their mean, or all ones."""
    if kind is SignalKind.ONES:
        return np.ones(real.n)
    mean = float(real.direct.mean())
    return real.direct / mean if mean > 0 else np.ones(real.n)
