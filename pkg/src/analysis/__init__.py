"""
Analysis module for transfer gaps and bound-verification summaries.
"""

from .transfer import TransferGap, relative_gap, analyze_transfer, transfer_curve_rows, print_transfer_analysis
from .bounds_summary import BoundSummary, summarize_bounds, print_bounds_summary

__all__ = [
    "TransferGap",
    "relative_gap",
    "analyze_transfer",
    "transfer_curve_rows",
    "print_transfer_analysis",
    "BoundSummary",
    "summarize_bounds",
    "print_bounds_summary",
]
