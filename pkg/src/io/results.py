"""Save metrics, bound reports, training traces and plot data to CSV files."""

from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import pandas as pd

from ..bounds import BOUNDS_COLUMNS, BoundReport
from ..policy import METRICS_COLUMNS, TRACE_COLUMNS, MetricsRecord, TrainingTrace

# ============== CONFIGURATION ==============
SCHEMA_VERSION = 1
HISTOGRAM_BINS = 30

HISTOGRAM_COLUMNS = ["bin_left", "bin_right", "count"]
TRANSFER_COLUMNS = ["scale", "model", "sum_rate_mean", "sum_rate_std", "per_node_sum_rate", "violation_mean", "violation_std", "relative_gap"]


def _write_csv(frame: pd.DataFrame, save_path: Path) -> Path:
    save_path = Path(save_path)
    save_path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(save_path, index=False, lineterminator="\n")
    return save_path


def save_metrics(records: Sequence[MetricsRecord], save_path: Path) -> Path:
    """
    Save per-scale metrics records to CSV.

    Args:
        records: MetricsRecords in output order
        save_path: Target CSV file

    Returns:
        Path to the saved CSV file
    """
    frame = pd.DataFrame([r.row() for r in records], columns=METRICS_COLUMNS)
    path = _write_csv(frame, save_path)
    print(f"💾 Metrics saved to: {path}")
    return path


def save_bound_reports(reports: Iterable[BoundReport], save_path: Path) -> Path:
    """Bound reports as CSV; an empty suite still gets the header."""
    frame = pd.DataFrame([r.row() for r in reports], columns=BOUNDS_COLUMNS)
    path = _write_csv(frame, save_path)
    print(f"💾 Bound reports saved to: {path}")
    return path


def save_trace(trace: TrainingTrace, save_path: Path) -> Path:
    return _write_csv(trace.to_frame()[TRACE_COLUMNS], save_path)


def save_histogram(record: MetricsRecord, save_path: Path, bins: int = HISTOGRAM_BINS) -> Path:
    """Sum-rate histogram over every (trial, graph) evaluation of one policy at one scale."""
    samples = np.asarray(record.sum_rates, dtype=float).ravel()
    if samples.size:
        counts, edges = np.histogram(samples, bins=bins)
    else:
        counts, edges = np.zeros(0, dtype=int), np.zeros(1)
    frame = pd.DataFrame({"bin_left": edges[:-1], "bin_right": edges[1:], "count": counts}, columns=HISTOGRAM_COLUMNS)
    return _write_csv(frame, save_path)


def save_transfer_curve(rows: Sequence[dict], save_path: Path) -> Path:
    return _write_csv(pd.DataFrame(list(rows), columns=TRANSFER_COLUMNS), save_path)


def read_csv_header(path: Path) -> list[str]:
    with open(path, "r", encoding="utf-8") as f:
        return f.readline().rstrip("\n").split(",")
