"""
Dataset Tracker - manifest of the generated graphs, their splits and realized sizes.

Usage:
    from src.tracking import Tracker

    tracker = Tracker(dataset_path)
    tracker.add_graph("s00100_g0003", scale=100, split="eval", n=98, seed=..., path="scale_100/s00100_g0003.json")
    tracker.get_by_split("train", scale=100)
"""

import json
from pathlib import Path
from typing import Optional, List

from ..errors import DatasetNotFound

SPLITS = ("train", "eval")


def graph_id(scale: int, index: int) -> str:
    return f"s{scale:05d}_g{index:04d}"


class Tracker:
    def __init__(self, dataset_path: Path):
        self.dataset_path = Path(dataset_path)
        self.manifest_file = self.dataset_path / "manifest.json"
        self._data = None

    @property
    def data(self) -> dict:
        if self._data is None:
            self.load()
        return self._data

    def load(self):
        """Load manifest from file (empty manifest when absent)."""
        if self.manifest_file.exists():
            with open(self.manifest_file, encoding="utf-8") as f:
                self._data = json.load(f)
        else:
            self._data = {"spec": None, "graphs": {}}

    def save(self):
        """Save manifest; graphs are written in sorted-ID order."""
        self.dataset_path.mkdir(parents=True, exist_ok=True)
        self._data["graphs"] = dict(sorted(self.data["graphs"].items()))
        with open(self.manifest_file, "w", encoding="utf-8") as f:
            json.dump(self._data, f, indent=2)
            f.write("\n")

    def require(self):
        """Raise DatasetNotFound unless a manifest exists on disk."""
        if not self.manifest_file.exists():
            raise DatasetNotFound(f"no dataset manifest at {self.manifest_file}")

    # -------------------------------------------------------------------------
    # Graph operations
    # -------------------------------------------------------------------------

    def set_spec(self, spec: dict):
        self.data["spec"] = spec

    def reset(self, spec: dict):
        """Start an empty manifest for a new dataset."""
        self._data = {"spec": spec, "graphs": {}}

    def add_graph(self, gid: str, scale: int, split: str, n: int, seed: int, path: str):
        """Add a generated graph to the manifest."""
        if split not in SPLITS:
            raise ValueError(f"unknown split {split!r}")
        self.data["graphs"][gid] = {"scale": scale, "split": split, "n": n, "seed": seed, "path": path}

    def get_graph(self, gid: str) -> Optional[dict]:
        return self.data["graphs"].get(gid)

    def graph_path(self, gid: str) -> Path:
        entry = self.get_graph(gid)
        if entry is None:
            raise DatasetNotFound(f"graph {gid} is not in {self.manifest_file}")
        return self.dataset_path / entry["path"]

    # -------------------------------------------------------------------------
    # Query operations
    # -------------------------------------------------------------------------

    def get_by_split(self, split: str, scale: Optional[int] = None) -> List[str]:
        """Graph IDs of a split, optionally restricted to one target scale."""
        return [
            gid for gid, entry in self.data["graphs"].items()
            if entry["split"] == split and (scale is None or entry["scale"] == scale)
        ]

    def scales(self) -> List[int]:
        return sorted({entry["scale"] for entry in self.data["graphs"].values()})

    def get_all_graph_ids(self) -> List[str]:
        return list(self.data["graphs"].keys())

    def splits_disjoint(self) -> bool:
        return not set(self.get_by_split("train")) & set(self.get_by_split("eval"))

    # -------------------------------------------------------------------------
    # Stats
    # -------------------------------------------------------------------------

    def stats(self) -> dict:
        """Per-scale graph counts and realized node counts."""
        by_scale = {}
        for entry in self.data["graphs"].values():
            s = by_scale.setdefault(entry["scale"], {"train": 0, "eval": 0, "nodes": []})
            s[entry["split"]] += 1
            s["nodes"].append(entry["n"])
        return {
            "total": len(self.data["graphs"]),
            "by_scale": {
                scale: {
                    "train": s["train"],
                    "eval": s["eval"],
                    "min_n": min(s["nodes"]),
                    "mean_n": sum(s["nodes"]) / len(s["nodes"]),
                    "max_n": max(s["nodes"]),
                }
                for scale, s in sorted(by_scale.items())
            },
        }

    def print_stats(self):
        """Print a nice summary."""
        s = self.stats()
        print()
        print("=" * 50)
        print("DATASET MANIFEST")
        print("=" * 50)
        print(f"Total graphs: {s['total']:,}")
        print()
        print(f"{'scale':>7} {'train':>6} {'eval':>6} {'min n':>7} {'mean n':>8} {'max n':>7}")
        for scale, row in s["by_scale"].items():
            print(f"{scale:>7} {row['train']:>6} {row['eval']:>6} {row['min_n']:>7} {row['mean_n']:>8.1f} {row['max_n']:>7}")
        print("=" * 50)

    # -------------------------------------------------------------------------
    # Rebuild from files
    # -------------------------------------------------------------------------

    def rebuild_from_files(self):
        """Rebuild the manifest by scanning scale_* folders; splits come from each graph file."""
        print("Rebuilding manifest from files...")
        spec = self.data.get("spec") if self.manifest_file.exists() else None
        self._data = {"spec": spec, "graphs": {}}

        for folder in sorted(d for d in self.dataset_path.glob("scale_*") if d.is_dir()):
            scale = int(folder.name.split("_", 1)[1])
            for path in sorted(folder.glob("*.json")):
                with open(path, encoding="utf-8") as f:
                    meta = json.load(f)
                self.add_graph(
                    path.stem,
                    scale=scale,
                    split=meta.get("split", "train"),
                    n=meta["n"],
                    seed=meta["seed"],
                    path=str(path.relative_to(self.dataset_path)),
                )

        self.save()
        print(f"✓ Rebuilt manifest with {len(self._data['graphs'])} graphs")
