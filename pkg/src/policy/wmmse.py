"""
WMMSE baseline for sum-rate power allocation with a total-power budget.

Amplitudes v_i = sqrt(power_i) are updated block-wise (u, w, v). The v-update
solves the per-iteration quadratic subproblem under sum(v^2) <= Pmax and
0 <= v_i <= sqrt(p0); the multiplier mu of the sum constraint is found by
bisection.
"""

from dataclasses import dataclass, field

import numpy as np
from loguru import logger

from ..channel import ChannelRealization, rates
from ..errors import BisectionError

# ============== CONFIGURATION ==============
DEFAULT_ITERS = 50
MAX_HALVINGS = 100
MAX_DOUBLINGS = 200
BISECTION_TOLERANCE = 1e-12
MONOTONE_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class WmmseResult:
    powers: np.ndarray  # v^2
    probs: np.ndarray  # v^2 / p0
    surrogate: list = field(default_factory=list)  # sum rate of v after each iteration

    @property
    def monotone(self) -> bool:
        s = np.asarray(self.surrogate)
        return bool(np.all(np.diff(s) >= -MONOTONE_TOLERANCE * np.maximum(1.0, np.abs(s[1:]))))


def _box_amplitudes(num: np.ndarray, den: np.ndarray, mu: float, v_max: float) -> np.ndarray:
    total = den + mu
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.where(num > 0, num / total, 0.0)
    return np.clip(v, 0.0, v_max)


def _solve_amplitudes(num: np.ndarray, den: np.ndarray, pmax: float, v_max: float) -> np.ndarray:
    """min_v sum(den v^2 - 2 num v) over the box with sum(v^2) <= Pmax."""
    def power(mu: float) -> float:
        return float(np.sum(_box_amplitudes(num, den, mu, v_max) ** 2))

    if power(0.0) <= pmax:
        return _box_amplitudes(num, den, 0.0, v_max)

    lo, hi = 0.0, 1.0
    for _ in range(MAX_DOUBLINGS):
        if power(hi) <= pmax:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise BisectionError("could not bracket the power-budget multiplier")

    for _ in range(MAX_HALVINGS):
        if hi - lo <= BISECTION_TOLERANCE * max(1.0, hi):
            return _box_amplitudes(num, den, hi, v_max)
        mid = 0.5 * (lo + hi)
        if power(mid) <= pmax:
            hi = mid
        else:
            lo = mid
    raise BisectionError(f"multiplier bisection did not converge after {MAX_HALVINGS} halvings")


def wmmse_solve(
    real: ChannelRealization,
    p0: float,
    pmax: float,
    iters: int = DEFAULT_ITERS,
    check_monotone: bool = False,
) -> WmmseResult:
    """
    Run `iters` WMMSE iterations from the equal-power point sqrt(min(p0, Pmax/n)).

    Args:
        real: channel draw (power gains)
        p0: per-user power cap
        pmax: total power budget
        iters: number of (u, w, v) sweeps, >= 1
        check_monotone: log a warning whenever the sum rate decreases

    Returns:
        WmmseResult with powers, probabilities and the per-iteration sum rate
    """
    if iters < 1:
        raise ValueError(f"WMMSE needs at least one iteration, got {iters}")
    n = real.n
    amp_direct = np.sqrt(real.direct)
    # g[i, j]: power gain from transmitter i to receiver j, direct links on the diagonal
    g = real.gains.copy()
    np.fill_diagonal(g, real.direct)
    v_max = np.sqrt(p0)
    v = np.full(n, np.sqrt(min(p0, pmax / n)))

    surrogate = []
    for it in range(iters):
        received = real.noise_power + g.T @ (v * v)
        u = amp_direct * v / received
        w = 1.0 / (1.0 - u * amp_direct * v)
        v = _solve_amplitudes(w * u * amp_direct, g @ (w * u * u), pmax, v_max)

        surrogate.append(float(rates(real, v * v).sum()))
        if check_monotone and it > 0 and surrogate[-1] < surrogate[-2] - MONOTONE_TOLERANCE * max(1.0, abs(surrogate[-2])):
            logger.warning(f"WMMSE sum rate decreased at iteration {it}: {surrogate[-2]:.6g} -> {surrogate[-1]:.6g}")

    powers = v * v
    return WmmseResult(powers=powers, probs=np.clip(powers / p0, 0.0, 1.0), surrogate=surrogate)


def wmmse_policy(real: ChannelRealization, p0: float, pmax: float, iters: int = DEFAULT_ITERS) -> tuple[np.ndarray, np.ndarray]:
    """Continuous WMMSE powers v^2 and their use as Bernoulli probabilities v^2 / p0."""
    result = wmmse_solve(real, p0, pmax, iters)
    return result.powers, result.probs
