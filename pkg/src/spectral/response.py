"""
Filter frequency responses and integral-Lipschitz constants.

Two constants are reported for a filter on a positive interval [lo, hi]:

- pairwise: max over a sample grid of |h(a) - h(b)| (a + b) / (2 |a - b|)
- derivative_bound: the exact sup of |lambda h'(lambda)|, found from the
  interval endpoints and the real critical points of lambda h'(lambda)

With D the derivative bound, |h(b) - h(a)| <= D ln(b/a), so for any taps the
pairwise value is at most D * g(hi / lo) with g(r) = ln(r) (r + 1) / (2 (r - 1)),
which is >= 1. Nonnegative (or nonpositive) taps make h' monotone and give
pairwise <= D; signed taps can exceed D, e.g. h = lambda - lambda^2 + lambda^3/3
on (0.001, 1].
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from ..errors import DomainError
from ..gnn.schemas import TapsLike, as_taps

# ============== CONFIGURATION ==============
DEFAULT_SAMPLES = 256
DOMAIN_FLOOR_RATIO = 1e-3  # spectrum domain is (ratio * lambda_max, lambda_max]
ROOT_IMAG_TOLERANCE = 1e-9


@dataclass(frozen=True)
class LipschitzEstimate:
    pairwise: float
    derivative_bound: float
    domain: tuple[float, float]

    @property
    def pairwise_ceiling(self) -> float:
        """Upper bound on `pairwise` implied by `derivative_bound` for any taps."""
        return self.derivative_bound * log_ratio_factor(*self.domain)

    def __str__(self) -> str:
        lo, hi = self.domain
        return f"C on [{lo:.3g}, {hi:.3g}]: pairwise={self.pairwise:.6g}, derivative={self.derivative_bound:.6g}"


def log_ratio_factor(lo: float, hi: float) -> float:
    """ln(r) (r + 1) / (2 (r - 1)) at r = hi / lo; tends to 1 as r -> 1."""
    r = hi / lo
    if r <= 1.0:
        raise DomainError(f"domain must satisfy 0 < lo < hi, got ({lo}, {hi})")
    return float(np.log(r) * (r + 1.0) / (2.0 * (r - 1.0)))


def frequency_response(taps: TapsLike, lambdas) -> np.ndarray:
    """h(lambda) = sum_k h_k lambda^k."""
    return P.polyval(np.asarray(lambdas, dtype=float), as_taps(taps).h)


def lambda_derivative_coeffs(taps: TapsLike) -> np.ndarray:
    """Coefficients of lambda h'(lambda) = sum_k k h_k lambda^k."""
    h = as_taps(taps).h
    return np.arange(h.size) * h


def sup_abs_on_interval(coeffs: np.ndarray, lo: float, hi: float) -> float:
    """Exact max of |p| over [lo, hi] for a polynomial given by ascending coefficients."""
    candidates = [lo, hi]
    if coeffs.size > 2 and np.any(coeffs[2:] != 0):
        for root in P.polyroots(P.polyder(coeffs)):
            if abs(root.imag) <= ROOT_IMAG_TOLERANCE and lo <= root.real <= hi:
                candidates.append(root.real)
    return float(np.max(np.abs(P.polyval(np.array(candidates), coeffs))))


def integral_lipschitz_constant(
    taps: TapsLike,
    domain: tuple[float, float],
    samples: int = DEFAULT_SAMPLES,
    fold_negative: bool = False,
) -> LipschitzEstimate:
    """
    Integral-Lipschitz constant of a filter on a positive interval.

    Args:
        taps: filter coefficients
        domain: (lo, hi) with 0 < lo < hi
        samples: grid size for the pairwise estimate (>= 2)
        fold_negative: also take the derivative sup over [-hi, -lo]

    Returns:
        LipschitzEstimate with both constants
    """
    lo, hi = float(domain[0]), float(domain[1])
    if lo <= 0 or hi <= lo:
        raise DomainError(f"domain must satisfy 0 < lo < hi, got ({lo}, {hi})")
    if samples < 2:
        raise ValueError(f"samples must be >= 2, got {samples}")

    grid = np.linspace(lo, hi, samples)
    resp = frequency_response(taps, grid)
    a, b = np.triu_indices(samples, k=1)
    pairwise = np.abs(resp[a] - resp[b]) * (grid[a] + grid[b]) / (2.0 * (grid[b] - grid[a]))

    coeffs = lambda_derivative_coeffs(taps)
    bound = sup_abs_on_interval(coeffs, lo, hi)
    if fold_negative:
        bound = max(bound, sup_abs_on_interval(coeffs, -hi, -lo))
    return LipschitzEstimate(pairwise=float(pairwise.max()), derivative_bound=bound, domain=(lo, hi))


def spectrum_domain(eigenvalues: np.ndarray, floor_ratio: float = DOMAIN_FLOOR_RATIO) -> tuple[float, float]:
    """(floor_ratio * lambda_max, lambda_max] with lambda_max the spectral radius."""
    top = float(np.max(np.abs(eigenvalues)))
    if top <= 0:
        raise DomainError("spectrum is identically zero")
    return floor_ratio * top, top


def lipschitz_over_spectrum(taps: TapsLike, eigenvalues: np.ndarray, samples: int = DEFAULT_SAMPLES) -> LipschitzEstimate:
    """Constants over the folded spectrum |lambda| in (floor, lambda_max]."""
    return integral_lipschitz_constant(taps, spectrum_domain(eigenvalues), samples, fold_negative=True)
