"""
Dataset generation: per scale, perturb the nearest square grid, drop isolated
nodes and store each graph as JSON next to a manifest of IDs, splits and
realized node counts.
"""

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from tqdm import tqdm

from ..geometry import GeometricGraph, drop_isolated, grid_for_nodes, make_grid, perturb_to_rgg
from ..io import graph_to_dict, load_graph, save_json
from ..seeding import derive_seed
from ..tracking import Tracker, graph_id
from .config import DatasetSpec

DATASET_DIR = "dataset"


def dataset_tracker(out_dir: Path) -> Tracker:
    return Tracker(Path(out_dir) / DATASET_DIR)


def dataset_signature(spec: DatasetSpec, seed: int) -> dict:
    """What the manifest records about how the dataset was generated."""
    return {**spec.model_dump(mode="json"), "seed": int(seed)}


def dataset_is_current(out_dir: Path, spec: DatasetSpec, seed: int) -> bool:
    """True when a manifest exists and was generated from exactly this spec and seed."""
    tracker = dataset_tracker(out_dir)
    return tracker.manifest_file.exists() and tracker.data.get("spec") == dataset_signature(spec, seed)


def generate_dataset(spec: DatasetSpec, out_dir: Path, seed: int = 0, workers: int = 1) -> Tracker:
    """
    Generate and store every graph of `spec`.

    Args:
        spec: Dataset spec
        out_dir: Output root; graphs go under dataset/scale_<n>/
        seed: Master seed
        workers: Thread-pool size

    Returns:
        Tracker over the written manifest
    """
    tracker = dataset_tracker(out_dir)
    tracker.reset(dataset_signature(spec, seed))
    total = spec.graphs_per_scale + spec.eval_graphs

    for scale in spec.scales:
        grid = make_grid(grid_for_nodes(scale, spec.spacing, spec.radius, spec.torus))

        def build(index: int) -> tuple[str, str, GeometricGraph, int]:
            split = "train" if index < spec.graphs_per_scale else "eval"
            graph_seed = derive_seed(seed, "graph", scale, index)
            return graph_id(scale, index), split, drop_isolated(perturb_to_rgg(grid, spec.sigma, graph_seed)), graph_seed

        with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
            built = list(tqdm(executor.map(build, range(total)), total=total, desc=f"Scale {scale}", leave=False))

        for gid, split, graph, graph_seed in built:
            rel = f"scale_{scale}/{gid}.json"
            data = graph_to_dict(graph)
            data["graph_id"] = gid
            data["split"] = split
            save_json(data, tracker.dataset_path / rel)
            tracker.add_graph(gid, scale=scale, split=split, n=graph.n, seed=graph_seed, path=rel)

    tracker.save()
    return tracker


def load_split(tracker: Tracker, split: str, scale: int) -> list[GeometricGraph]:
    """Graphs of one split at one scale, in ID order."""
    tracker.require()
    return [load_graph(tracker.graph_path(gid)) for gid in sorted(tracker.get_by_split(split, scale))]
