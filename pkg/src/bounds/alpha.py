# Decay-rate fit E||W_n^2|| ~ n^-alpha over an RGG ensemble

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from loguru import logger

from ..geometry import GridSpec, discrepancy, make_grid, perturb_to_rgg
from ..seeding import derive_seed


@dataclass
class AlphaFit:
    alpha: float
    intercept: float
    r_squared: float
    sizes: list = field(default_factory=list)
    means: list = field(default_factory=list)
    infinite: bool = False  # some mean is exactly zero

    def __str__(self) -> str:
        if self.infinite:
            return "alpha = inf (perfectly matching graphs at some size)"
        lines = [f"alpha = {self.alpha:.6g} (R^2 = {self.r_squared:.6f})"]
        for n, mean in zip(self.sizes, self.means):
            lines.append(f"  n={n:>6}: mean ||W^2|| = {mean:.6e}")
        return "\n".join(lines)


def fit_alpha(sizes: Sequence[float], means: Sequence[float]) -> AlphaFit:
    """Least-squares slope of log(mean) against log(n); alpha is minus the slope."""
    sizes = [float(s) for s in sizes]
    means = [float(v) for v in means]
    if len(sizes) != len(means):
        raise ValueError("sizes and means must have equal length")
    if len(sizes) < 3:
        raise ValueError(f"alpha fit needs at least 3 sizes, got {len(sizes)}")
    if any(v == 0 for v in means):
        logger.warning("mean ||W^2|| is zero at some size; alpha is infinite")
        return AlphaFit(alpha=math.inf, intercept=math.nan, r_squared=math.nan, sizes=sizes, means=means, infinite=True)

    log_n, log_w = np.log(sizes), np.log(means)
    slope, intercept = np.polyfit(log_n, log_w, 1)
    resid = log_w - (slope * log_n + intercept)
    total = np.sum((log_w - log_w.mean()) ** 2)
    r_squared = 1.0 - float(np.sum(resid ** 2) / total) if total > 0 else 1.0
    return AlphaFit(alpha=-float(slope), intercept=float(intercept), r_squared=r_squared, sizes=sizes, means=means)


def estimate_alpha(
    sigma: float,
    sides: Sequence[int],
    seeds_per_size: int,
    spacing: float = 1.0,
    radius: float = 1.2,
    seed: int = 0,
    workers: int = 1,
) -> AlphaFit:
    """Mean ||W_n^2|| over Gaussian perturbations of non-toroidal B x B grids, then fit_alpha."""
    def mean_norm(side: int) -> float:
        grid = make_grid(GridSpec(side=side, spacing=spacing, radius=radius))
        norms = [
            discrepancy(perturb_to_rgg(grid, sigma, derive_seed(seed, side, s))).spectral_norm_w2
            for s in range(seeds_per_size)
        ]
        return float(np.mean(norms))

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        means = list(executor.map(mean_norm, sides))
    return fit_alpha([side * side for side in sides], means)
