import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from srquant import sr_theory as th
from srquant.errors import NumericFailure


def test_mu_against_oracle():
    for g in (0.2, 0.7, 1.0637, 1.5, 2.5):
        assert th.theoretical_mu(g, 0.1) == pytest.approx(oracles.output_snr(g, 0.1), rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(1e-3, 1.0))
def test_mu_scales_with_amplitude_squared(g, amp):
    assert th.theoretical_mu(g, 2 * amp) == pytest.approx(4 * th.theoretical_mu(g, amp), rel=1e-12)


def test_mu_rejects_and_nan():
    with pytest.raises(ValueError):
        th.theoretical_mu(0.0)
    assert math.isnan(th.theoretical_mu(60.0))


@settings(max_examples=100, deadline=None)
@given(st.floats(0.2, 2.8))
def test_slope_matches_finite_difference(g):
    h = 1e-6
    fd = (th.theoretical_mu(g + h) - th.theoretical_mu(g - h)) / (2 * h)
    assert th.mu_slope(g) == pytest.approx(fd, rel=1e-5, abs=1e-10)


def test_optimal_threshold():
    t0 = time.perf_counter()
    th.optimal_threshold.cache_clear()
    g = th.optimal_threshold()
    assert time.perf_counter() - t0 < 1.0
    assert g == pytest.approx(1.064, abs=0.005)
    grid = np.arange(0.2, 3.0, 1e-4)
    mu = np.array([oracles.output_snr(x, 0.1) for x in grid[::10]])
    assert abs(grid[::10][np.argmax(mu)] - g) <= 1e-3
    lhs, rhs = th.stationarity_sides(g)
    assert abs(lhs - rhs) <= 1e-8


def test_optimal_threshold_bad_bracket():
    with pytest.raises(NumericFailure):
        th.optimal_threshold((1.2, 2.0))


def test_curve_csv_roundtrip(tmp_path):
    curve = th.theory_curve(np.linspace(0.5, 2.0, 151), 0.1)
    path = tmp_path / "mu.csv"
    curve.to_csv(path)
    assert path.read_text().splitlines()[0] == "gamma,mu"
    back = th.SnrCurve.from_csv(path)
    np.testing.assert_array_equal(back.gammas, curve.gammas)
    np.testing.assert_array_equal(back.mu_values, curve.mu_values)
    assert curve.argmax == pytest.approx(1.06)
    with pytest.raises(ValueError):
        th.SnrCurve([1.0, 2.0], [1.0])


def test_empirical_snr_pure_tone_and_noise():
    n = np.arange(4096)
    tone = np.cos(2 * np.pi * 0.125 * n)
    assert th.empirical_snr(tone, 0.125) > 1e20
    assert th.empirical_snr(np.zeros(64) + 1.0, 0.125) == math.inf
    rng = np.random.default_rng(0)
    ratios = [th.empirical_snr(rng.standard_normal(2**16), 0.125) for _ in range(40)]
    # three bins at each of f0, 2f0, 3f0 plus 1.5 bins at Nyquist
    assert np.mean(ratios) == pytest.approx(10.5 / 32757, rel=0.1)
    with pytest.raises(ValueError):
        th.empirical_snr(tone, 0.6)
    with pytest.raises(ValueError):
        th.empirical_snr(tone[:10], 0.125)


def test_sweep_small_and_deterministic():
    gammas = np.arange(0.8, 1.3, 0.05)
    r1 = th.threshold_sweep(0.3, 1.0, 3, 4096, gammas, seed=2)
    r2 = th.threshold_sweep(0.3, 1.0, 3, 4096, gammas, seed=2)
    np.testing.assert_array_equal(r1.argmaxes, r2.argmaxes)
    assert r1.curve.gammas.size == gammas.size
    with pytest.raises(ValueError):
        th.threshold_sweep(0.3, 1.0, 1, 100, [1.2, 1.1])
