"""Test-signal generation: weak sinusoid on a Rayleigh pedestal, SNR
conversions and synthetic rod phantoms for scan experiments."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .noise_model import UNIT_SCALE, sample

DEFAULT_F0 = 0.1
DEFAULT_SAMPLES = 100_000


@dataclass(frozen=True)
class SignalSpec:
    """Parameters of ``x_n = sigma * (A cos(2 pi f0 n + phi) + w_n)``."""

    amplitude_A: float = 0.0
    freq_f0: float = DEFAULT_F0
    phase_phi: float = 0.0
    sigma: float = 1.0
    n_samples: int = DEFAULT_SAMPLES
    seed: int = 0

    def __post_init__(self):
        if not (self.amplitude_A >= 0 and math.isfinite(self.amplitude_A)):
            raise ValueError(f"amplitude_A must be >= 0, got {self.amplitude_A!r}")
        if not 0 < self.freq_f0 < 0.5:
            raise ValueError(f"freq_f0 must lie in (0, 0.5) cycles/sample, got {self.freq_f0!r}")
        if not 0 <= self.phase_phi < 2 * math.pi:
            raise ValueError(f"phase_phi must lie in [0, 2pi), got {self.phase_phi!r}")
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")
        if int(self.n_samples) != self.n_samples or self.n_samples < 1:
            raise ValueError(f"n_samples must be a positive integer, got {self.n_samples!r}")


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """A uniformly sampled intensity record."""

    samples: np.ndarray
    sample_rate_hz: float | None = None

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float).ravel()
        if arr.size == 0:
            raise ValueError("a time series needs at least one sample")
        if self.sample_rate_hz is not None and not self.sample_rate_hz > 0:
            raise ValueError(f"sample_rate_hz must be positive, got {self.sample_rate_hz!r}")
        object.__setattr__(self, "samples", arr)

    def __len__(self):
        return self.samples.size

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (self.sample_rate_hz == other.sample_rate_hz
                and np.array_equal(self.samples, other.samples))

    def scaled(self, c: float) -> TimeSeries:
        return TimeSeries(self.samples * c, self.sample_rate_hz)


@dataclass(frozen=True)
class Phantom:
    """True amplitude profile A(x) over PMT positions.

    ``rod_edges`` holds the positions of the two edge notches when the
    phantom contains a rod; ``turbidity_label`` is descriptive only.
    """

    positions: tuple
    amplitude_profile: dict
    turbidity_label: str = ""
    name: str = "custom"
    rod_edges: tuple | None = None

    def __post_init__(self):
        pos = tuple(float(p) for p in self.positions)
        if len(pos) == 0:
            raise ValueError("phantom needs at least one position")
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ValueError("phantom positions must be strictly increasing")
        missing = [p for p in pos if p not in self.amplitude_profile]
        if missing:
            raise ValueError(f"amplitude_profile undefined at positions {missing[:5]}")
        if any(not self.amplitude_profile[p] >= 0 for p in pos):
            raise ValueError("amplitude_profile values must be non-negative")
        object.__setattr__(self, "positions", pos)

    def profile_array(self) -> np.ndarray:
        return np.array([self.amplitude_profile[p] for p in self.positions])


def synthesize(spec: SignalSpec, sample_rate_hz: float | None = None) -> TimeSeries:
    n = np.arange(spec.n_samples)
    w = sample(spec.n_samples, UNIT_SCALE, spec.seed)
    x = spec.sigma * (spec.amplitude_A * np.cos(2 * np.pi * spec.freq_f0 * n + spec.phase_phi) + w)
    return TimeSeries(x, sample_rate_hz)


def snr_db_to_amplitude(snr_db: float) -> float:
    """Normalised amplitude for an input SNR defined as ``A^2 / 2`` over unit noise variance."""
    return math.sqrt(2.0 * 10.0 ** (snr_db / 10.0))


def amplitude_to_snr_db(amplitude: float) -> float:
    if amplitude <= 0:
        return -math.inf
    return 10.0 * math.log10(amplitude * amplitude / 2.0)


def position_seed(base_seed: int, index: int) -> int:
    """Per-position seed: SeedSequence entropy ``(base_seed, index)``, first 64-bit word.

    Stable across numpy releases because SeedSequence hashing is specified.
    """
    ss = np.random.SeedSequence([int(base_seed) & 0xFFFFFFFFFFFFFFFF, int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def rod_phantom(n_positions: int = 41, a_peak: float = 0.10, *, a_bg: float = 0.02,
                plateau: float = 0.06, notch: float = 0.005,
                turbidity_label: str = "") -> Phantom:
    """Glass-rod stand-in: baseline, raised plateau, a focusing bump in the
    middle and sharp notches at both rod edges.

    The default levels describe ``a_peak = 0.10``; every level is scaled by
    ``a_peak / 0.10`` so the same shape serves both turbidity regimes.
    The rod spans the central ~45% of the scan (edges at indices
    ``round(0.275 (P - 1))`` and ``P - 1 -`` that).
    """
    if n_positions < 7:
        raise ValueError("a rod phantom needs at least 7 positions")
    k = a_peak / 0.10
    idx = np.arange(n_positions)
    profile = np.full(n_positions, a_bg * k)
    left = int(round(0.275 * (n_positions - 1)))
    right = n_positions - 1 - left
    centre = (n_positions - 1) / 2.0
    half = max((right - left) / 4.0, 1.0)
    inside = (idx > left) & (idx < right)
    profile[inside] = plateau * k
    dist = np.abs(idx - centre)
    bump = inside & (dist < half)
    profile[bump] = (plateau + (0.10 - plateau) * np.cos(0.5 * np.pi * dist[bump] / half) ** 2) * k
    profile[[left, right]] = notch * k
    positions = tuple(float(i) for i in idx)
    return Phantom(positions, dict(zip(positions, profile.tolist())),
                   turbidity_label=turbidity_label, name="rod",
                   rod_edges=(float(left), float(right)))


def flat_phantom(n_positions: int = 41, level: float = 0.0, turbidity_label: str = "") -> Phantom:
    positions = tuple(float(i) for i in range(n_positions))
    return Phantom(positions, {p: float(level) for p in positions},
                   turbidity_label=turbidity_label, name="flat")


def high_turbidity_phantom(n_positions: int = 41) -> Phantom:
    """Weak residual sinusoid regime (lock-in fails, SR methods are needed)."""
    return rod_phantom(n_positions, 0.10, turbidity_label="L/l* = 5.05")


def low_turbidity_phantom(n_positions: int = 41) -> Phantom:
    return rod_phantom(n_positions, 0.30, turbidity_label="L/l* = 2.14")


def phantom_scan(phantom: Phantom, spec_template: SignalSpec,
                 sample_rate_hz: float | None = None) -> dict:
    """Synthesize one series per phantom position.

    The template's ``amplitude_A`` is ignored; position ``i`` uses
    ``phantom.amplitude_profile`` and seed ``position_seed(template.seed, i)``.
    """
    out = {}
    for i, pos in enumerate(phantom.positions):
        spec = replace(spec_template, amplitude_A=float(phantom.amplitude_profile[pos]),
                       seed=position_seed(spec_template.seed, i))
        out[pos] = synthesize(spec, sample_rate_hz)
    return out


def make_phantom(name: str, n_positions: int = 41, amplitude: float | None = None) -> Phantom:
    """Phantom by name: ``rod`` (``amplitude`` is the peak, default 0.1),
    ``high``/``low`` turbidity rods, or ``flat`` (constant ``amplitude``, default 0)."""
    if name == "rod":
        return rod_phantom(n_positions, 0.10 if amplitude is None else amplitude)
    if name == "high":
        return high_turbidity_phantom(n_positions)
    if name == "low":
        return low_turbidity_phantom(n_positions)
    if name == "flat":
        return flat_phantom(n_positions, 0.0 if amplitude is None else amplitude)
    raise ValueError(f"unknown phantom {name!r}; choose rod, high, low or flat")
