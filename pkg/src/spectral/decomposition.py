# Eigendecomposition of symmetric GSOs and the DFT spectrum of toroidal grids

from dataclasses import dataclass

import numpy as np
from scipy import fft, linalg, sparse

from ..errors import AsymmetricGso, DimensionError
from ..gnn.schemas import TapsLike
from .response import frequency_response

# ============== CONFIGURATION ==============
SYMMETRY_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """S = V diag(lambda) V^T with ascending eigenvalues."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))

    def reconstruct(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.T

    def apply_filter(self, taps: TapsLike, x: np.ndarray) -> np.ndarray:
        """V diag(h(lambda)) V^T x, the spectral route of filter_apply."""
        coeffs = self.eigenvectors.T @ np.asarray(x, dtype=float)
        return self.eigenvectors @ (frequency_response(taps, self.eigenvalues) * coeffs)


def _dense(gso) -> np.ndarray:
    return gso.toarray() if sparse.issparse(gso) else np.asarray(gso, dtype=float)


def decompose(gso) -> SpectralDecomposition:
    """Dense symmetric eigendecomposition; rejects GSOs that are not symmetric."""
    dense = _dense(gso)
    if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
        raise DimensionError(f"GSO must be square, got shape {dense.shape}")
    scale = max(1.0, float(np.max(np.abs(dense)))) if dense.size else 1.0
    asym = float(np.max(np.abs(dense - dense.T))) if dense.size else 0.0
    if asym > SYMMETRY_TOLERANCE * scale:
        raise AsymmetricGso(f"GSO asymmetry {asym:.3e} exceeds tolerance")
    eigenvalues, eigenvectors = linalg.eigh(dense)
    return SpectralDecomposition(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def spectral_extremes(gso) -> tuple[float, float]:
    """(smallest, largest) eigenvalue of a symmetric GSO."""
    dense = _dense(gso)
    n = dense.shape[0]
    lo = linalg.eigh(dense, eigvals_only=True, subset_by_index=[0, 0])[0]
    hi = linalg.eigh(dense, eigvals_only=True, subset_by_index=[n - 1, n - 1])[0]
    return float(lo), float(hi)


def circulant_eigenvalues(mask: np.ndarray, side: int) -> np.ndarray:
    """
    Eigenvalues of a toroidal grid GSO from the 2D DFT of its mask, ascending.

    The mask's center is moved to the (0, 0) corner of a B x B impulse response
    before transforming.
    """
    mask = np.asarray(mask, dtype=float)
    reach = mask.shape[0] // 2
    if mask.shape[0] > side:
        raise DimensionError(f"mask side {mask.shape[0]} exceeds grid side {side}")
    kernel = np.zeros((side, side))
    for i in range(mask.shape[0]):
        for j in range(mask.shape[1]):
            kernel[(i - reach) % side, (j - reach) % side] += mask[i, j]
    return np.sort(fft.fft2(kernel).real.ravel())
