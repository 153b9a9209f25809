# Geometry module - grid graphs, random geometric graphs, discrepancy

from .schemas import GridSpec, GraphKind, GeometricGraph, Discrepancy
from .grid import (
    make_grid,
    perturb_to_rgg,
    uniform_rgg,
    drop_isolated,
    expected_degree,
    area_mask_side,
    grid_for_nodes,
    lattice_offsets,
    lattice_reach,
    neighborhood_size,
)
from .discrepancy import discrepancy, edge_difference, mask_matrix, mask_l1_norm
