# Closed-form constants of the grid and RGG transferability bounds

import math

import numpy as np

from ..gnn import FilterTaps, GnnParams


def _tap_matrix(taps) -> np.ndarray:
    if isinstance(taps, GnnParams):
        return taps.taps
    if isinstance(taps, FilterTaps):
        return taps.h[None, :]
    return np.atleast_2d(np.asarray(taps, dtype=float))


def h_k_constant(taps, mask_l1_norm: float) -> float:
    """sum_l sum_k |h_lk| ||L||_1^k over every layer (a single filter is one layer)."""
    taps = _tap_matrix(taps)
    powers = mask_l1_norm ** np.arange(taps.shape[1])
    return float(np.sum(np.abs(taps) * powers))


def c_m_constant(n: int, K: int, M: int, h_k: float) -> float:
    """H_K^2 / n * (2 sqrt(n) K M + K^2 M^2)."""
    return h_k ** 2 / n * (2.0 * math.sqrt(n) * K * M + (K * M) ** 2)


def c_k_constant(taps, mask_l1_norm: float) -> float:
    """sum_{k=1}^K ||L||_1^k |h_k|; the k = 0 tap does not aggregate and is excluded."""
    h = _tap_matrix(taps).ravel()
    powers = mask_l1_norm ** np.arange(h.size)
    return float(np.sum(np.abs(h[1:]) * powers[1:]))
