"""
Grid graphs (DGGs), Gaussian-perturbed random geometric graphs (RGGs) and
uniform RGGs.

Adjacencies are binary radius graphs divided by the lattice neighborhood size
deg_grid, so a toroidal DGG is circulant with identical nonzero entries and an
RGG's discrepancy to its grid is a plain difference.
"""

import math

import numpy as np
from loguru import logger
from scipy import sparse
from scipy.spatial import cKDTree

from ..errors import BoundaryNotCirculant, EdgelessGraph, EmptyGraph
from .schemas import GeometricGraph, GraphKind, GridSpec

# ============== CONFIGURATION ==============
RADIUS_TOLERANCE = 1e-9  # Relative slack on r_c so lattice distances equal to r_c stay edges


def lattice_reach(spacing: float, radius: float) -> int:
    """Largest lattice step R with R*a <= r_c."""
    return int(math.floor(radius / spacing * (1 + RADIUS_TOLERANCE)))


def lattice_offsets(spacing: float, radius: float) -> np.ndarray:
    """Integer offsets v != 0 with ||v||*a <= r_c, as a (deg_grid, 2) array."""
    reach = lattice_reach(spacing, radius)
    limit = (radius / spacing) ** 2 * (1 + RADIUS_TOLERANCE)
    offsets = [
        (k1, k2)
        for k2 in range(-reach, reach + 1)
        for k1 in range(-reach, reach + 1)
        if (k1, k2) != (0, 0) and k1 * k1 + k2 * k2 <= limit
    ]
    return np.array(offsets, dtype=np.int64).reshape(-1, 2)


def neighborhood_size(spacing: float, radius: float) -> int:
    """deg_grid: number of lattice points within r_c of a node."""
    return len(lattice_offsets(spacing, radius))


def expected_degree(spec: GridSpec) -> float:
    """pi * r_c^2 / rho with rho = a^2 (area per node)."""
    return math.pi * spec.radius ** 2 / spec.spacing ** 2


def area_mask_side(spec: GridSpec) -> int:
    """ceil(sqrt(pi r_c^2 / rho + 1)), reported next to the centered mask side."""
    return int(math.ceil(math.sqrt(expected_degree(spec) + 1)))


def _radius_adjacency(positions: np.ndarray, radius: float, weight: float) -> sparse.csr_array:
    n = positions.shape[0]
    pairs = cKDTree(positions).query_pairs(radius * (1 + RADIUS_TOLERANCE), output_type="ndarray")
    rows = np.concatenate([pairs[:, 0], pairs[:, 1]]).astype(np.int64)
    cols = np.concatenate([pairs[:, 1], pairs[:, 0]]).astype(np.int64)
    data = np.full(rows.shape[0], weight)
    adj = sparse.csr_array((data, (rows, cols)), shape=(n, n))
    adj.sort_indices()
    return adj


def make_grid(spec: GridSpec) -> GeometricGraph:
    """
    Build the deterministic grid graph of `spec`.

    Edges come from integer lattice offsets (no floating distance test), wrapped
    modulo B when `spec.torus` is set.
    """
    if spec.radius < spec.spacing:
        raise EdgelessGraph(f"radius {spec.radius} < spacing {spec.spacing}: grid graph has no edges")

    B = spec.side
    reach = lattice_reach(spec.spacing, spec.radius)
    if spec.torus and B < 2 * reach + 1:
        raise BoundaryNotCirculant(f"torus side {B} must be at least {2 * reach + 1} for radius {spec.radius}")

    offsets = lattice_offsets(spec.spacing, spec.radius)
    deg_grid = len(offsets)

    idx = np.arange(spec.n)
    n1, n2 = idx % B, idx // B
    rows, cols = [], []
    for d1, d2 in offsets:
        m1, m2 = n1 + d1, n2 + d2
        if spec.torus:
            m1, m2 = m1 % B, m2 % B
            keep = np.ones(spec.n, dtype=bool)
        else:
            keep = (m1 >= 0) & (m1 < B) & (m2 >= 0) & (m2 < B)
        rows.append(idx[keep])
        cols.append(m1[keep] + m2[keep] * B)

    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    adj = sparse.csr_array((np.full(rows.shape[0], 1.0 / deg_grid), (rows, cols)), shape=(spec.n, spec.n))
    adj.sort_indices()

    positions = np.column_stack([n1, n2]).astype(float) * spec.spacing
    return GeometricGraph(
        positions=positions,
        adjacency=adj,
        kind=GraphKind.DGG,
        spacing=spec.spacing,
        radius=spec.radius,
        deg_grid=deg_grid,
        torus=spec.torus,
        side=B,
    )


def perturb_to_rgg(grid: GeometricGraph, sigma: float, seed: int) -> GeometricGraph:
    """
    Add iid N(0, sigma^2) noise to each coordinate of the grid nodes and rebuild
    the edges with the Euclidean radius rule (no wrap-around).

    Node i of the result corresponds to node i of `grid`; no node is removed.
    """
    if grid.kind is not GraphKind.DGG:
        raise ValueError("perturb_to_rgg expects a DGG parent")
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")

    rng = np.random.default_rng(seed)
    positions = grid.positions + rng.normal(0.0, sigma, size=grid.positions.shape)
    adj = _radius_adjacency(positions, grid.radius, 1.0 / grid.deg_grid)
    return GeometricGraph(
        positions=positions,
        adjacency=adj,
        kind=GraphKind.RGG,
        spacing=grid.spacing,
        radius=grid.radius,
        deg_grid=grid.deg_grid,
        torus=False,
        sigma=float(sigma),
        seed=int(seed),
        parent=grid,
        side=grid.side,
    )


def uniform_rgg(n: int, side_length: float, radius: float, seed: int) -> GeometricGraph:
    """
    RGG with n nodes placed uniformly on [0, side_length]^2.

    Normalized with the neighborhood size of the lattice of equal density
    (a = side_length / sqrt(n)); it has no parent grid.
    """
    spacing = side_length / math.sqrt(n)
    rng = np.random.default_rng(seed)
    positions = rng.uniform(0.0, side_length, size=(n, 2))
    deg_grid = max(neighborhood_size(spacing, radius), 1)
    return GeometricGraph(
        positions=positions,
        adjacency=_radius_adjacency(positions, radius, 1.0 / deg_grid),
        kind=GraphKind.RGG,
        spacing=spacing,
        radius=radius,
        deg_grid=deg_grid,
        seed=int(seed),
    )


def drop_isolated(g: GeometricGraph) -> GeometricGraph:
    """Subgraph on the nodes with at least one neighbor; `node_ids` keeps original indices."""
    keep = g.degrees() > 0
    if not keep.any():
        raise EmptyGraph(f"all {g.n} nodes are isolated")
    if keep.all():
        return g

    logger.debug(f"Dropping {int((~keep).sum())} isolated nodes of {g.n}")
    kept = np.flatnonzero(keep)
    adj = sparse.csr_array(g.adjacency[kept][:, kept])
    adj.sort_indices()
    return GeometricGraph(
        positions=g.positions[kept],
        adjacency=adj,
        kind=g.kind,
        spacing=g.spacing,
        radius=g.radius,
        deg_grid=g.deg_grid,
        torus=g.torus,
        sigma=g.sigma,
        seed=g.seed,
        parent=None,
        node_ids=g.node_ids[kept],
        side=g.side,
    )


def grid_for_nodes(target_n: int, spacing: float, radius: float, torus: bool = False) -> GridSpec:
    """GridSpec whose B*B is the square nearest to `target_n`."""
    side = max(int(round(math.sqrt(target_n))), 1)
    return GridSpec(side=side, spacing=spacing, radius=radius, torus=torus)
