import math

import numpy as np
import pytest

from srquant import signal_synth as ss
from srquant.noise_model import M_MEAN


def test_snr_conversion():
    assert ss.snr_db_to_amplitude(-23) == pytest.approx(0.10012, abs=5e-5)
    assert ss.amplitude_to_snr_db(ss.snr_db_to_amplitude(-17.5)) == pytest.approx(-17.5)
    assert ss.amplitude_to_snr_db(0.0) == -math.inf


def test_synthesize_deterministic_and_moments():
    spec = ss.SignalSpec(0.1, 0.1, 0.3, 2.0, 50_000, seed=9)
    a, b = ss.synthesize(spec), ss.synthesize(spec)
    assert a == b
    assert len(a) == 50_000
    assert a.samples.mean() == pytest.approx(2.0 * M_MEAN, rel=5e-3)
    assert ss.synthesize(ss.SignalSpec(seed=10)) != ss.synthesize(ss.SignalSpec(seed=11))


def test_synthesize_embeds_sinusoid():
    spec = ss.SignalSpec(0.5, 0.125, 0.0, 1.0, 80_000, seed=1)
    x = ss.synthesize(spec).samples
    n = np.arange(x.size)
    amp = 2 * np.mean(x * np.cos(2 * np.pi * 0.125 * n))
    assert amp == pytest.approx(0.5, abs=0.02)


@pytest.mark.parametrize("kwargs", [
    {"amplitude_A": -0.1}, {"freq_f0": 0.0}, {"freq_f0": 0.5}, {"phase_phi": 7.0},
    {"sigma": 0.0}, {"n_samples": 0}, {"n_samples": 2.5},
])
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        ss.SignalSpec(**kwargs)


def test_timeseries():
    ts = ss.TimeSeries([1.0, 2.0], 100.0)
    assert ts.scaled(3.0).samples.tolist() == [3.0, 6.0]
    with pytest.raises(ValueError):
        ss.TimeSeries([])
    with pytest.raises(ValueError):
        ss.TimeSeries([1.0], -1.0)


def test_rod_phantom_shape():
    ph = ss.rod_phantom()
    prof = ph.profile_array()
    assert len(ph.positions) == 41
    assert ph.rod_edges == (11.0, 29.0)
    assert prof.max() == pytest.approx(0.10)
    assert prof[20] == pytest.approx(0.10)
    assert prof[11] == prof[29] == pytest.approx(0.005)
    assert np.all(prof[:11] == pytest.approx(0.02))
    assert np.all(prof[12:29] >= 0.06 - 1e-12)
    np.testing.assert_allclose(prof, prof[::-1])
    low = ss.low_turbidity_phantom().profile_array()
    np.testing.assert_allclose(low, 3 * prof)


def test_phantom_validation():
    with pytest.raises(ValueError):
        ss.Phantom((0.0, 0.0), {0.0: 1.0})
    with pytest.raises(ValueError):
        ss.Phantom((0.0, 1.0), {0.0: 1.0})
    with pytest.raises(ValueError):
        ss.rod_phantom(5)
    with pytest.raises(ValueError):
        ss.make_phantom("disk")


def test_phantom_scan_seeds_differ_per_position():
    ph = ss.flat_phantom(8, 0.0)
    scan = ss.phantom_scan(ph, ss.SignalSpec(n_samples=100, seed=4))
    assert list(scan) == list(ph.positions)
    assert scan[0.0] != scan[1.0]
    again = ss.phantom_scan(ph, ss.SignalSpec(n_samples=100, seed=4))
    assert all(scan[p] == again[p] for p in scan)
    assert ss.position_seed(4, 0) != ss.position_seed(4, 1) != ss.position_seed(5, 1)
