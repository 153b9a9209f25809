import numpy as np
import pytest

from src.errors import AsymmetricGso, DomainError
from src.geometry import GridSpec, make_grid, mask_matrix
from src.gnn import filter_apply
from src.spectral import (
    circulant_eigenvalues,
    decompose,
    frequency_response,
    integral_lipschitz_constant,
    log_ratio_factor,
    lipschitz_over_spectrum,
    spectral_extremes,
    spectrum_domain,
    sup_abs_on_interval,
)


def _random_gso(rng, n):
    a = rng.normal(size=(n, n))
    s = 0.5 * (a + a.T)
    return s / np.linalg.norm(s, 2)


def test_spectral_route_matches_filter():
    rng = np.random.default_rng(0)
    for _ in range(50):
        n = int(rng.integers(2, 65))
        S = _random_gso(rng, n)
        taps = rng.normal(size=int(rng.integers(1, 6)))
        x = rng.standard_normal(n)
        spectral = decompose(S).apply_filter(taps, x)
        assert np.max(np.abs(spectral - filter_apply(taps, S, x))) <= 1e-9


def test_decomposition_reconstructs(rng):
    S = _random_gso(rng, 20)
    dec = decompose(S)
    assert np.allclose(dec.reconstruct(), S, atol=1e-12)
    assert np.all(np.diff(dec.eigenvalues) >= 0)
    assert dec.spectral_radius == pytest.approx(1.0)


def test_decompose_rejects_asymmetric(rng):
    with pytest.raises(AsymmetricGso):
        decompose(rng.normal(size=(5, 5)))


def test_spectral_extremes(rgg8):
    lo, hi = spectral_extremes(rgg8.adjacency)
    eig = np.linalg.eigvalsh(rgg8.dense())
    assert lo == pytest.approx(eig[0])
    assert hi == pytest.approx(eig[-1])


@pytest.mark.parametrize("side,radius", [(6, 1.2), (8, 1.5), (9, 2.0)])
def test_circulant_spectrum_matches_eigendecomposition(side, radius):
    grid = make_grid(GridSpec(side=side, radius=radius, torus=True))
    expected = np.linalg.eigvalsh(grid.dense())
    assert np.allclose(circulant_eigenvalues(mask_matrix(grid), side), expected, atol=1e-10)


def test_frequency_response():
    assert np.allclose(frequency_response([1.0, 2.0, 3.0], [0.0, 1.0, 2.0]), [1.0, 6.0, 17.0])


def test_sup_abs_uses_interior_critical_point():
    # lambda - lambda^2 peaks at 1/2
    assert sup_abs_on_interval(np.array([0.0, 1.0, -1.0]), 0.0, 1.0) == pytest.approx(0.25)


def test_lipschitz_of_identity_filter():
    est = integral_lipschitz_constant([0.0, 1.0], (0.1, 1.0))
    assert est.derivative_bound == pytest.approx(1.0)
    assert est.pairwise <= est.derivative_bound
    assert est.pairwise > 0.99


def test_lipschitz_of_constant_filter():
    est = integral_lipschitz_constant([0.7], (0.1, 1.0), fold_negative=True)
    assert est.pairwise == 0.0
    assert est.derivative_bound == 0.0


def test_lipschitz_of_quadratic():
    # lambda h'(lambda) = 2 lambda^2
    assert integral_lipschitz_constant([0.0, 0.0, 1.0], (0.5, 2.0)).derivative_bound == pytest.approx(8.0)


def test_fold_negative_covers_odd_taps():
    taps = [0.0, 1.0, -1.0]  # lambda h' = lambda - 2 lambda^2
    plain = integral_lipschitz_constant(taps, (0.1, 1.0))
    folded = integral_lipschitz_constant(taps, (0.1, 1.0), fold_negative=True)
    assert plain.derivative_bound == pytest.approx(1.0)
    assert folded.derivative_bound == pytest.approx(3.0)


def test_pairwise_below_derivative_for_nonnegative_taps():
    rng = np.random.default_rng(4)
    for _ in range(20):
        taps = rng.uniform(0.0, 1.0, size=int(rng.integers(1, 6)))
        est = integral_lipschitz_constant(taps, (0.01, 1.5), samples=64)
        assert est.pairwise <= est.derivative_bound * (1 + 1e-9)


def test_pairwise_below_ceiling_for_signed_taps():
    rng = np.random.default_rng(9)
    for _ in range(50):
        taps = rng.normal(size=int(rng.integers(2, 7)))
        lo = float(rng.uniform(0.001, 0.5))
        hi = lo + float(rng.uniform(0.1, 2.0))
        est = integral_lipschitz_constant(taps, (lo, hi), samples=64)
        assert est.pairwise <= est.pairwise_ceiling * (1 + 1e-9) + 1e-12


def test_signed_taps_can_exceed_derivative_bound():
    # lambda h'(lambda) = lambda (1 - lambda)^2 peaks at 4/27, while the
    # pair (0.001, 1) gives about h(1) / 2 = 1/6
    est = integral_lipschitz_constant([0.0, 1.0, -1.0, 1.0 / 3.0], (0.001, 1.0))
    assert est.derivative_bound == pytest.approx(4.0 / 27.0)
    assert est.pairwise == pytest.approx(0.1665, abs=1e-3)
    assert est.derivative_bound < est.pairwise <= est.pairwise_ceiling


def test_log_ratio_factor():
    assert log_ratio_factor(0.5, 1.0) == pytest.approx(1.5 * np.log(2.0))
    assert 1.0 <= log_ratio_factor(1.0, 1.0 + 1e-6) <= 1.0 + 1e-6
    with pytest.raises(DomainError):
        log_ratio_factor(1.0, 1.0)


@pytest.mark.parametrize("domain", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.5)])
def test_lipschitz_domain_errors(domain):
    with pytest.raises(DomainError):
        integral_lipschitz_constant([1.0, 1.0], domain)


def test_spectrum_domain():
    lo, hi = spectrum_domain(np.array([-0.8, 0.1, 0.5]))
    assert hi == pytest.approx(0.8)
    assert lo == pytest.approx(0.8e-3)
    with pytest.raises(DomainError):
        spectrum_domain(np.zeros(3))


def test_lipschitz_over_grid_spectrum(torus8):
    eig = decompose(torus8.adjacency).eigenvalues
    est = lipschitz_over_spectrum([0.0, 1.0], eig)
    assert est.derivative_bound == pytest.approx(1.0)
