# Pydantic specs and immutable graph containers for grids and random geometric graphs

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field
from scipy import sparse


class GridSpec(BaseModel):
    """B×B lattice with spacing a and connection radius r_c (meters)."""
    side: int = Field(gt=0, description="Grid side B; the grid has n = B*B nodes")
    spacing: float = Field(default=1.0, gt=0, description="Meters per lattice step a (a = sqrt(rho))")
    radius: float = Field(default=1.2, gt=0, description="Connection radius r_c in meters")
    torus: bool = Field(default=False, description="Periodic boundary (circulant adjacency)")

    model_config = {"frozen": True, "extra": "forbid"}

    @property
    def n(self) -> int:
        return self.side * self.side


class GraphKind(str, Enum):
    DGG = "dgg"
    RGG = "rgg"


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.asarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GeometricGraph:
    """
    Node positions plus normalized adjacency (the GSO S).

    Node i of a grid sits at lattice coordinates (i % B, i // B). An RGG keeps the
    node order of the grid it was perturbed from, so `parent` and the RGG share
    indices until `drop_isolated` is applied.
    """
    positions: np.ndarray
    adjacency: sparse.csr_array
    kind: GraphKind
    spacing: float
    radius: float
    deg_grid: int
    torus: bool = False
    sigma: float = 0.0
    seed: Optional[int] = None
    parent: Optional["GeometricGraph"] = field(default=None, repr=False)
    node_ids: Optional[np.ndarray] = None
    side: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "positions", _freeze(np.asarray(self.positions, dtype=float)))
        ids = np.arange(self.n) if self.node_ids is None else np.asarray(self.node_ids, dtype=np.int64)
        object.__setattr__(self, "node_ids", _freeze(ids))

    @property
    def n(self) -> int:
        return int(self.positions.shape[0])

    def degrees(self) -> np.ndarray:
        """Number of neighbors of each node (nonzeros per row)."""
        return np.diff(self.adjacency.indptr)

    def dense(self) -> np.ndarray:
        return self.adjacency.toarray()

    def edges(self) -> np.ndarray:
        """Upper-triangular edge list as an (E, 2) int array."""
        upper = sparse.triu(self.adjacency, k=1).tocoo()
        return np.column_stack([upper.row, upper.col]).astype(np.int64)


@dataclass(frozen=True, eq=False)
class Discrepancy:
    """W_n = S_n - S_{D_n} and its squared spectral norm."""
    w: sparse.csr_array
    spectral_norm_w: float
    spectral_norm_w2: float
