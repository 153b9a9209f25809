# RGG-to-grid discrepancy W_n and the 2D mask stencil of a toroidal grid

import numpy as np
from scipy import linalg, sparse

from ..errors import BoundaryNotCirculant, DimensionError, MissingParent
from .grid import lattice_offsets, lattice_reach
from .schemas import Discrepancy, GeometricGraph, GraphKind


def discrepancy(rgg: GeometricGraph) -> Discrepancy:
    """
    W_n = S_n - S_{D_n} for an RGG and the grid it was perturbed from.

    ||W_n^2|| is the largest |eigenvalue|^2 of the symmetric W_n.
    """
    parent = rgg.parent
    if parent is None:
        raise MissingParent("discrepancy needs an RGG produced by perturb_to_rgg")
    if parent.n != rgg.n:
        raise DimensionError(f"RGG has {rgg.n} nodes but its parent has {parent.n}")

    w = sparse.csr_array(rgg.adjacency - parent.adjacency)
    w.eliminate_zeros()
    if w.nnz == 0:
        return Discrepancy(w=w, spectral_norm_w=0.0, spectral_norm_w2=0.0)

    eig = linalg.eigvalsh(w.toarray())
    norm_w = float(np.max(np.abs(eig)))
    return Discrepancy(w=w, spectral_norm_w=norm_w, spectral_norm_w2=norm_w * norm_w)


def edge_difference(a: GeometricGraph, b: GeometricGraph) -> int:
    """Size of the symmetric difference of the two (unordered) edge sets."""
    if a.n != b.n:
        raise DimensionError(f"graphs have {a.n} and {b.n} nodes")
    support_a = (a.adjacency != 0).astype(np.int8)
    support_b = (b.adjacency != 0).astype(np.int8)
    diff = sparse.csr_array(support_a - support_b)
    diff.eliminate_zeros()
    return int(diff.nnz // 2)


def mask_matrix(grid: GeometricGraph) -> np.ndarray:
    """
    Centered (2R+1)x(2R+1) stencil L of a toroidal grid, R = floor(r_c / a).

    mask[R + k1, R + k2] is the weight between a node and its neighbor displaced
    by (k1, k2) lattice steps; the first axis runs along n1.
    """
    if grid.kind is not GraphKind.DGG or not grid.torus:
        raise BoundaryNotCirculant("mask_matrix needs a toroidal grid graph")

    reach = lattice_reach(grid.spacing, grid.radius)
    mask = np.zeros((2 * reach + 1, 2 * reach + 1))
    for k1, k2 in lattice_offsets(grid.spacing, grid.radius):
        mask[reach + k1, reach + k2] = 1.0 / grid.deg_grid
    return mask


def mask_l1_norm(mask: np.ndarray) -> float:
    """Sum of absolute mask entries (the 1-norm of the convolution operator)."""
    return float(np.abs(mask).sum())
