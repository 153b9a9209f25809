import math

import numpy as np
import pytest

from src.bounds import estimate_alpha, fit_alpha
from src.geometry import GridSpec, discrepancy, make_grid, perturb_to_rgg
from src.harness import AlphaConfig, run_alpha
from src.io import load_json
from src.seeding import derive_seed


def test_fit_recovers_planted_rate():
    sizes = [16, 64, 256, 1024]
    means = [3.0 * n ** -0.7 for n in sizes]
    fit = fit_alpha(sizes, means)
    assert fit.alpha == pytest.approx(0.7, abs=1e-6)
    assert fit.r_squared == pytest.approx(1.0)
    assert not fit.infinite
    assert "alpha" in str(fit)


def test_zero_mean_gives_infinite_rate():
    fit = fit_alpha([16, 64, 256], [0.1, 0.0, 0.01])
    assert fit.infinite
    assert math.isinf(fit.alpha)


@pytest.mark.parametrize("sizes,means", [([16, 64], [0.1, 0.05]), ([16, 64, 256], [0.1, 0.05])])
def test_fit_input_errors(sizes, means):
    with pytest.raises(ValueError):
        fit_alpha(sizes, means)


def test_estimate_is_deterministic_across_workers():
    serial = estimate_alpha(0.2, [4, 5, 6], seeds_per_size=3, seed=1, workers=1)
    threaded = estimate_alpha(0.2, [4, 5, 6], seeds_per_size=3, seed=1, workers=3)
    assert serial.sizes == [16.0, 25.0, 36.0]
    assert np.array_equal(serial.means, threaded.means)
    assert all(v > 0 for v in serial.means)


def test_unperturbed_ensemble_is_infinite():
    assert estimate_alpha(0.0, [3, 4, 5], seeds_per_size=2).infinite


def test_estimate_matches_direct_computation():
    sides, seeds, sigma = [4, 5, 6], 3, 0.2
    fit = estimate_alpha(sigma, sides, seeds_per_size=seeds, seed=1)
    means = []
    for side in sides:
        grid = make_grid(GridSpec(side=side))
        norms = [discrepancy(perturb_to_rgg(grid, sigma, derive_seed(1, side, s))).spectral_norm_w2 for s in range(seeds)]
        means.append(float(np.mean(norms)))
    slope = np.polyfit(np.log([16.0, 25.0, 36.0]), np.log(means), 1)[0]
    assert fit.means == pytest.approx(means, rel=1e-12)
    assert fit.alpha == pytest.approx(-slope, rel=1e-9)


@pytest.mark.slow
def test_default_ensemble_rate_is_recorded(tmp_path):
    config = AlphaConfig()
    fit = run_alpha(config, tmp_path, seed=0, workers=4)
    assert fit.sizes == [64.0, 144.0, 256.0, 400.0]
    assert not fit.infinite and math.isfinite(fit.alpha)
    assert all(v > 0 for v in fit.means)
    saved = load_json(tmp_path / "alpha.json")
    assert saved["alpha"] == pytest.approx(fit.alpha)
    assert estimate_alpha(config.sigma, config.sides, config.seeds_per_size, seed=0, workers=1).means == fit.means
