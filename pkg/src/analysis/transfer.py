"""
Transfer analysis: how far the model trained at one scale falls from models
trained in-distribution at every evaluation scale.
"""

from dataclasses import dataclass
from typing import Sequence

from ..policy import MetricsRecord


@dataclass
class TransferGap:
    """Per-node sum-rate gap of the transferred model at one scale."""
    scale: int
    transferred: float
    in_distribution: float
    relative_gap: float
    violation: float

    def __str__(self) -> str:
        return (
            f"n={self.scale}: transferred {self.transferred:.4f} vs in-distribution "
            f"{self.in_distribution:.4f} per node ({self.relative_gap:+.1%})"
        )


def relative_gap(transferred: float, in_distribution: float) -> float:
    """(transferred - in_distribution) / |in_distribution|; 0 when both are 0."""
    if in_distribution == 0:
        return 0.0 if transferred == 0 else float("inf")
    return (transferred - in_distribution) / abs(in_distribution)


def analyze_transfer(transferred: Sequence[MetricsRecord], in_distribution: Sequence[MetricsRecord]) -> list[TransferGap]:
    """
    Pair records by scale and compute the relative per-node sum-rate gap.

    Args:
        transferred: Records of the model trained at the train scale
        in_distribution: Records of the per-scale models (same scales)

    Returns:
        One TransferGap per scale present in both inputs, in scale order
    """
    reference = {r.scale: r for r in in_distribution}
    gaps = []
    for rec in sorted(transferred, key=lambda r: r.scale):
        ref = reference.get(rec.scale)
        if ref is None:
            continue
        gaps.append(TransferGap(
            scale=rec.scale,
            transferred=rec.per_node_sum_rate,
            in_distribution=ref.per_node_sum_rate,
            relative_gap=relative_gap(rec.per_node_sum_rate, ref.per_node_sum_rate),
            violation=rec.violation_mean,
        ))
    return gaps


def transfer_curve_rows(records: dict[str, Sequence[MetricsRecord]], gaps: Sequence[TransferGap], transferred_model: str) -> list[dict]:
    """Rows of the transfer-curve CSV; relative_gap is filled only for the transferred model."""
    gap_by_scale = {g.scale: g.relative_gap for g in gaps}
    rows = []
    for model, recs in records.items():
        for rec in sorted(recs, key=lambda r: r.scale):
            rows.append({
                "scale": rec.scale,
                "model": model,
                "sum_rate_mean": rec.sum_rate_mean,
                "sum_rate_std": rec.sum_rate_std,
                "per_node_sum_rate": rec.per_node_sum_rate,
                "violation_mean": rec.violation_mean,
                "violation_std": rec.violation_std,
                "relative_gap": gap_by_scale.get(rec.scale, 0.0) if model == transferred_model else 0.0,
            })
    return rows


def print_transfer_analysis(gaps: Sequence[TransferGap], tolerance: float) -> str:
    """
    Format the transfer gaps as a string report.

    Args:
        gaps: Output of analyze_transfer
        tolerance: Relative gap considered on par

    Returns:
        Formatted report string
    """
    lines = []
    lines.append("=" * 80)
    lines.append("TRANSFER ANALYSIS")
    lines.append("=" * 80)
    lines.append(f"\n{'Scale':<10} {'Transferred':<14} {'In-dist':<14} {'Gap':<10} {'Violation':<12}")
    lines.append("-" * 80)
    for g in gaps:
        marker = "" if abs(g.relative_gap) <= tolerance else " ◄ OFF PAR"
        lines.append(
            f"{g.scale:<10} {g.transferred:<14.4f} {g.in_distribution:<14.4f} "
            f"{g.relative_gap:<+10.1%} {g.violation:<+12.3e}{marker}"
        )
    worst = max((abs(g.relative_gap) for g in gaps), default=0.0)
    lines.append("\n" + "=" * 80)
    lines.append(f"WORST RELATIVE GAP: {worst:.1%} (tolerance {tolerance:.0%})")
    lines.append("=" * 80)
    return "\n".join(lines)
