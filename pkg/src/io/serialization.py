"""
JSON containers for graphs, GNN checkpoints and channel fixtures.

Floats are written with Python's shortest round-trip repr, so every container
loads back bit-identical. No timestamps are stored.
"""

import json
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
from scipy import sparse

from ..channel import ChannelModel, ChannelRealization, normalized_gso
from ..geometry import GeometricGraph, GraphKind, GridSpec, make_grid
from ..gnn import GnnParams, Nonlinearity, NonlinearityKind, OutputSquash
from .results import SCHEMA_VERSION


def json_serial(obj: Any):
    """JSON serializer for numpy scalars/arrays and enums."""
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, Enum):
        return obj.value
    raise TypeError(f"Type {type(obj)} not serializable")


def save_json(data: dict, save_path: Path) -> Path:
    save_path = Path(save_path)
    save_path.parent.mkdir(parents=True, exist_ok=True)
    with open(save_path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, default=json_serial)
        f.write("\n")
    return save_path


def load_json(path: Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"{path} does not exist")
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


# ============== Graphs ==============

def graph_to_dict(g: GeometricGraph) -> dict:
    upper = sparse.triu(g.adjacency, k=1).tocoo()
    return {
        "schema_version": SCHEMA_VERSION,
        "n": g.n,
        "kind": g.kind.value,
        "sigma": g.sigma,
        "seed": g.seed,
        "spacing": g.spacing,
        "radius": g.radius,
        "deg_grid": g.deg_grid,
        "torus": g.torus,
        "side": g.side,
        "has_parent": g.parent is not None,
        "parent_torus": g.parent.torus if g.parent is not None else False,
        "positions": g.positions.tolist(),
        "node_ids": g.node_ids.tolist(),
        "edges": [[int(i), int(j), float(w)] for i, j, w in zip(upper.row, upper.col, upper.data)],
    }


def graph_from_dict(data: dict) -> GeometricGraph:
    """Inverse of graph_to_dict; the parent grid is rebuilt from (side, spacing, radius, torus)."""
    n = data["n"]
    edges = np.asarray(data["edges"], dtype=float).reshape(-1, 3)
    rows, cols = edges[:, 0].astype(np.int64), edges[:, 1].astype(np.int64)
    adj = sparse.csr_array(
        (np.concatenate([edges[:, 2], edges[:, 2]]), (np.concatenate([rows, cols]), np.concatenate([cols, rows]))),
        shape=(n, n),
    )
    adj.sort_indices()
    parent = None
    if data.get("has_parent"):
        parent = make_grid(GridSpec(side=data["side"], spacing=data["spacing"], radius=data["radius"], torus=data.get("parent_torus", False)))
    return GeometricGraph(
        positions=np.asarray(data["positions"], dtype=float).reshape(n, 2),
        adjacency=adj,
        kind=GraphKind(data["kind"]),
        spacing=data["spacing"],
        radius=data["radius"],
        deg_grid=data["deg_grid"],
        torus=data["torus"],
        sigma=data["sigma"],
        seed=data["seed"],
        parent=parent,
        node_ids=np.asarray(data["node_ids"], dtype=np.int64),
        side=data["side"],
    )


def save_graph(g: GeometricGraph, save_path: Path) -> Path:
    return save_json(graph_to_dict(g), save_path)


def load_graph(path: Path) -> GeometricGraph:
    return graph_from_dict(load_json(path))


# ============== GNN checkpoints ==============

def params_to_dict(params: GnnParams) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "architecture": {
            "layers": params.n_layers,
            "taps": params.order,
            "nonlinearity": params.nonlinearity.kind.value,
            "leaky_slope": params.nonlinearity.slope,
            "output_squash": params.output_squash.value,
        },
        "coefficients": [
            [l, k, float(params.taps[l, k])] for l in range(params.n_layers) for k in range(params.order + 1)
        ],
    }


def params_from_dict(data: dict) -> GnnParams:
    arch = data["architecture"]
    taps = np.zeros((arch["layers"], arch["taps"] + 1))
    for l, k, value in data["coefficients"]:
        taps[int(l), int(k)] = value
    return GnnParams(
        taps=taps,
        nonlinearity=Nonlinearity(NonlinearityKind(arch["nonlinearity"]), arch["leaky_slope"]),
        output_squash=OutputSquash(arch["output_squash"]),
    )


def save_checkpoint(params: GnnParams, save_path: Path) -> Path:
    return save_json(params_to_dict(params), save_path)


def load_checkpoint(path: Path) -> GnnParams:
    return params_from_dict(load_json(path))


# ============== Channel fixtures ==============

def channel_to_dict(real: ChannelRealization, model: ChannelModel) -> dict:
    rows, cols = np.nonzero(real.gains)
    return {
        "schema_version": SCHEMA_VERSION,
        "n": real.n,
        "seed": real.seed,
        "model": model.model_dump(mode="json"),
        "noise_power": real.noise_power,
        "capped_links": real.capped_links,
        "direct": real.direct.tolist(),
        "gains": [[int(i), int(j), float(real.gains[i, j])] for i, j in zip(rows, cols)],
    }


def channel_from_dict(data: dict) -> tuple[ChannelRealization, ChannelModel]:
    n = data["n"]
    gains = np.zeros((n, n))
    for i, j, value in data["gains"]:
        gains[int(i), int(j)] = value
    real = ChannelRealization(
        gains=gains,
        direct=np.asarray(data["direct"], dtype=float),
        gso=normalized_gso(gains),
        noise_power=data["noise_power"],
        seed=data["seed"],
        capped_links=data["capped_links"],
    )
    return real, ChannelModel.model_validate(data["model"])
