"""Per-bound pass counts and the human-readable bound summary table."""

from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

from ..bounds import BoundReport


@dataclass
class BoundSummary:
    name: str
    instances: int
    holding: int
    out_of_regime: int
    worst_ratio: float  # max lhs_ucb / rhs over instances with rhs > 0

    @property
    def all_hold(self) -> bool:
        return self.holding == self.instances

    def __str__(self) -> str:
        return f"{self.name}: {self.holding}/{self.instances} hold (worst lhs/rhs {self.worst_ratio:.3g})"


def summarize_bounds(reports: Sequence[BoundReport]) -> list[BoundSummary]:
    """Group reports by bound name, keeping first-seen order."""
    grouped = defaultdict(list)
    for r in reports:
        grouped[r.name.value].append(r)
    summaries = []
    for name, group in grouped.items():
        ratios = [r.lhs_ucb / r.rhs for r in group if r.rhs > 0]
        summaries.append(BoundSummary(
            name=name,
            instances=len(group),
            holding=sum(r.holds for r in group),
            out_of_regime=sum(not r.in_regime for r in group),
            worst_ratio=max(ratios, default=0.0),
        ))
    return summaries


def print_bounds_summary(summaries: Sequence[BoundSummary]) -> str:
    """Format bound summaries as a string report."""
    lines = []
    lines.append("=" * 80)
    lines.append("BOUND VERIFICATION")
    lines.append("=" * 80)
    lines.append(f"\n{'Bound':<24} {'Instances':<11} {'Hold':<8} {'Out of regime':<15} {'Worst lhs/rhs':<14}")
    lines.append("-" * 80)
    for s in summaries:
        marker = "" if s.all_hold else " ◄ VIOLATED"
        lines.append(f"{s.name:<24} {s.instances:<11} {s.holding:<8} {s.out_of_regime:<15} {s.worst_ratio:<14.3g}{marker}")
    lines.append("=" * 80)
    return "\n".join(lines)
