import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

import oracles
from srquant.quantizer import (QuantizedCounts, QuantizerConfig, expected_output_mean, quantize,
                               threshold_stats, time_avg_output_variance)
from srquant.signal_synth import SignalSpec, synthesize

samples = hnp.arrays(np.float64, st.integers(1, 300), elements=st.floats(0.0, 8.0))


def test_threshold_values_and_ties():
    cfg = QuantizerConfig(1.0, 2.0)
    assert cfg.upper == pytest.approx(2 * (oracles.M + 1))
    assert cfg.lower == pytest.approx(2 * (oracles.M - 1))
    y, c = quantize([cfg.upper, cfg.lower, cfg.upper + 1e-9, cfg.lower - 1e-9, 3.8], cfg)
    assert y.tolist() == [0, 0, 1, -1, 0]
    assert (c.n_plus, c.n_minus, c.n_zero) == (1, 1, 3)
    assert y.dtype == np.int8


def test_stats_against_oracle():
    for g in (0.3, 1.0637, 1.8):
        st_ = threshold_stats(QuantizerConfig(g))
        ref = oracles.threshold_terms(g)
        got = (st_.F_plus, st_.F_minus, st_.f_plus, st_.f_minus, st_.fp_plus, st_.fp_minus)
        np.testing.assert_allclose(got, ref, rtol=1e-7, atol=1e-10)


def test_variance_formula_matches_oracle():
    for g in (0.5, 1.0, 1.5):
        Fp, Fm, *_ = oracles.threshold_terms(g)
        ref = (1 - Fp) + Fm - ((1 - Fp) - Fm) ** 2
        assert time_avg_output_variance(QuantizerConfig(g)) == pytest.approx(ref, rel=1e-12)


def test_expected_mean_matches_simulation():
    cfg = QuantizerConfig(1.0)
    spec = SignalSpec(0.4, 0.125, 0.0, 1.0, 400_000, seed=3)
    y, _ = quantize(synthesize(spec), cfg)
    phase_means = y.reshape(-1, 8).mean(axis=0)
    np.testing.assert_allclose(phase_means, expected_output_mean(cfg, 0.4, 0.125, np.arange(8)),
                               atol=0.006)
    lin = expected_output_mean(cfg, 0.01, 0.1, np.arange(10), linearized=True)
    np.testing.assert_allclose(lin, expected_output_mean(cfg, 0.01, 0.1, np.arange(10)), atol=1e-4)


def test_config_and_counts_validation():
    for bad in ({"gamma": 0.0}, {"gamma": 1.0, "sigma": -1.0}, {"gamma": np.inf}):
        with pytest.raises(ValueError):
            QuantizerConfig(**bad)
    with pytest.raises(ValueError):
        QuantizedCounts(0, 0, 0)
    with pytest.raises(ValueError):
        QuantizedCounts(-1, 2, 3)
    with pytest.raises(ValueError):
        quantize([], QuantizerConfig(1.0))
    c = QuantizedCounts(2, 3, 5)
    assert (c.total, c.frac_plus, c.frac_minus, c.power) == (10, 0.2, 0.3, 0.5)


@settings(max_examples=200, deadline=None)
@given(samples, st.floats(0.05, 3.0))
def test_conservation(x, gamma):
    y, c = quantize(x, QuantizerConfig(gamma))
    assert c.n_plus + c.n_minus + c.n_zero == x.size
    assert set(np.unique(y)) <= {-1, 0, 1}
    assert c == QuantizedCounts.from_ternary(y)


@settings(max_examples=200, deadline=None)
@given(samples, st.floats(0.05, 3.0), st.sampled_from([0.25, 0.5, 2.0, 4.0, 1024.0]))
def test_scale_invariance(x, gamma, c):
    # powers of two keep the products exact, so ties stay ties
    y1, _ = quantize(x, QuantizerConfig(gamma, 1.0))
    y2, _ = quantize(c * x, QuantizerConfig(gamma, c))
    np.testing.assert_array_equal(y1, y2)
