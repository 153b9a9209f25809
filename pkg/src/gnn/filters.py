"""
Polynomial graph filters y = sum_k h_k S^k x, on arbitrary GSOs (iterated
sparse mat-vec) and on toroidal grids (iterated 2D circular correlation with
the mask stencil).
"""

import math

import numpy as np
from scipy import ndimage

from ..errors import DimensionError
from .schemas import TapsLike, as_taps


def _check_operands(gso, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if gso.ndim != 2 or gso.shape[0] != gso.shape[1]:
        raise DimensionError(f"GSO must be square, got shape {gso.shape}")
    if x.shape[0] != gso.shape[0]:
        raise DimensionError(f"signal has length {x.shape[0]} but GSO is {gso.shape[0]}x{gso.shape[1]}")
    return x


def shifted_signals(gso, x: np.ndarray, order: int) -> np.ndarray:
    """Stack [x, Sx, ..., S^K x] with shape (K+1, *x.shape)."""
    x = _check_operands(gso, x)
    out = np.empty((order + 1,) + x.shape)
    out[0] = x
    for k in range(1, order + 1):
        out[k] = gso @ out[k - 1]
    return out


def filter_apply(taps: TapsLike, gso, x: np.ndarray) -> np.ndarray:
    """Apply the filter without forming any power of S."""
    h = as_taps(taps).h
    x = _check_operands(gso, x)
    y = h[0] * x
    z = x
    for hk in h[1:]:
        z = gso @ z
        y = y + hk * z
    return y


def filter_apply_transpose(taps: TapsLike, gso, g: np.ndarray) -> np.ndarray:
    """sum_k h_k (S^T)^k g, the adjoint of filter_apply in x."""
    return filter_apply(taps, gso.T, g)


def reshape_signal(x: np.ndarray, side: int) -> np.ndarray:
    """field[n1, n2] = x[n1 + n2 * B]."""
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] != side * side:
        raise DimensionError(f"signal of length {x.shape[0] if x.ndim else 0} is not {side}x{side}")
    return x.reshape((side, side), order="F")


def field_to_signal(field: np.ndarray) -> np.ndarray:
    """Inverse of reshape_signal."""
    field = np.asarray(field)
    if field.ndim != 2 or field.shape[0] != field.shape[1]:
        raise DimensionError(f"field must be square, got shape {field.shape}")
    return field.reshape(-1, order="F")


def side_of(n: int) -> int:
    side = math.isqrt(n)
    if side * side != n:
        raise DimensionError(f"{n} nodes do not form a square grid")
    return side


def grid_filter_apply(taps: TapsLike, mask: np.ndarray, field: np.ndarray) -> np.ndarray:
    """
    y_B = sum_k h_k (L*)^k x_B with * the periodic 2D convolution of the mask.

    The mask is symmetric under (k1, k2) -> (-k1, -k2), so correlation and
    convolution coincide; correlation is used to match S x index for index.
    """
    h = as_taps(taps).h
    field = np.asarray(field, dtype=float)
    mask = np.asarray(mask, dtype=float)
    if field.ndim != 2 or field.shape[0] != field.shape[1]:
        raise DimensionError(f"field must be square, got shape {field.shape}")
    if mask.ndim != 2 or mask.shape[0] != mask.shape[1] or mask.shape[0] % 2 == 0:
        raise DimensionError(f"mask must be square with odd side, got shape {mask.shape}")
    if mask.shape[0] > field.shape[0]:
        raise DimensionError(f"mask side {mask.shape[0]} exceeds field side {field.shape[0]}")

    y = h[0] * field
    z = field
    for hk in h[1:]:
        z = ndimage.correlate(z, mask, mode="wrap")
        y = y + hk * z
    return y


def plane_filter_apply(taps: TapsLike, mask: np.ndarray, field: np.ndarray) -> np.ndarray:
    """Same as grid_filter_apply with zeros beyond the field edge instead of wrap-around."""
    h = as_taps(taps).h
    field = np.asarray(field, dtype=float)
    y = h[0] * field
    z = field
    for hk in h[1:]:
        z = ndimage.correlate(z, mask, mode="constant", cval=0.0)
        y = y + hk * z
    return y
