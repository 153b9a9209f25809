"""Plot emitters for sum-rate histograms and transfer curves (PNG, optional SVG)."""

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

# Style configuration
plt.style.use('seaborn-v0_8-whitegrid')
plt.rcParams['font.size'] = 11
plt.rcParams['figure.facecolor'] = 'white'

# ============== CONFIGURATION ==============
PLOT_DPI = 150
SVG_METADATA = {"Date": None}  # keeps SVG output byte-stable


def _save(fig, output_path: Path, svg: bool) -> list[Path]:
    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    plt.tight_layout()
    fig.savefig(output_path.with_suffix(".png"), dpi=PLOT_DPI, bbox_inches='tight')
    saved = [output_path.with_suffix(".png")]
    if svg:
        fig.savefig(output_path.with_suffix(".svg"), bbox_inches='tight', metadata=SVG_METADATA)
        saved.append(output_path.with_suffix(".svg"))
    plt.close(fig)
    return saved


def plot_sum_rate_histograms(histograms: dict[str, pd.DataFrame], title: str, output_path: Path, svg: bool = False) -> list[Path]:
    """
    Overlay sum-rate histograms of several policies at one scale.

    Args:
        histograms: policy name -> frame with bin_left, bin_right, count
        title: Figure title
        output_path: Path without suffix
        svg: Also write an SVG copy

    Returns:
        Paths of the written images
    """
    fig, ax = plt.subplots(figsize=(8, 5))
    colors = plt.cm.viridis(np.linspace(0, 0.85, max(len(histograms), 1)))
    for color, (name, frame) in zip(colors, histograms.items()):
        total = frame["count"].sum()
        if total == 0:
            continue
        widths = frame["bin_right"] - frame["bin_left"]
        density = frame["count"] / (total * widths)
        ax.bar(frame["bin_left"], density, width=widths, align="edge", alpha=0.55, color=color, label=name, edgecolor="white")
    ax.set_xlabel("Sum rate")
    ax.set_ylabel("Density")
    ax.set_title(title, fontsize=14, fontweight='bold')
    ax.legend()
    return _save(fig, output_path, svg)


def plot_transfer_curve(curve: pd.DataFrame, output_path: Path, svg: bool = False) -> list[Path]:
    """Per-node sum rate and violation against scale, one line per model."""
    fig, axes = plt.subplots(1, 2, figsize=(14, 5))
    for model, group in curve.groupby("model", sort=False):
        group = group.sort_values("scale")
        axes[0].errorbar(group["scale"], group["per_node_sum_rate"], yerr=group["sum_rate_std"] / group["scale"], marker="o", capsize=3, label=model)
        axes[1].errorbar(group["scale"], group["violation_mean"], yerr=group["violation_std"], marker="o", capsize=3, label=model)
    axes[0].set_xlabel("Nodes n")
    axes[0].set_ylabel("Sum rate per node")
    axes[0].set_title("Sum rate", fontweight='bold')
    axes[1].axhline(0.0, color="gray", linewidth=1, linestyle="--")
    axes[1].set_xlabel("Nodes n")
    axes[1].set_ylabel("Per-node violation")
    axes[1].set_title("Power constraint", fontweight='bold')
    for ax in axes:
        ax.legend()
    return _save(fig, output_path, svg)


def plot_alpha_fit(sizes: Sequence[float], means: Sequence[float], alpha: float, intercept: float, output_path: Path, svg: bool = False) -> list[Path]:
    """Log-log scatter of mean ||W^2|| with the fitted power law."""
    fig, ax = plt.subplots(figsize=(7, 5))
    sizes = np.asarray(sizes, dtype=float)
    ax.loglog(sizes, means, "o", label="measured")
    if np.isfinite(alpha):
        ax.loglog(sizes, np.exp(intercept) * sizes ** (-alpha), "--", label=f"fit, alpha={alpha:.3f}")
    ax.set_xlabel("Nodes n")
    ax.set_ylabel("mean ||W_n^2||")
    ax.set_title("Discrepancy decay", fontsize=14, fontweight='bold')
    ax.legend()
    return _save(fig, output_path, svg)
