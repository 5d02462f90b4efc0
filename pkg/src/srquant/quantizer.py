"""Symmetric 3-level quantizer centred on the Rayleigh mean, and the
statistics of its output."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .noise_model import M_MEAN, cdf_unit, pdf_unit, pdf_unit_deriv


@dataclass(frozen=True)
class QuantizerConfig:
    """Thresholds at ``sigma * (m + gamma)`` and ``sigma * (m - gamma)``.

    For ``gamma > m`` the lower threshold is negative; the unit Rayleigh
    cdf is zero there, so no sample is expected below it.
    """

    gamma: float
    sigma: float = 1.0
    m: float = M_MEAN

    def __post_init__(self):
        for name in ("gamma", "sigma", "m"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")

    @property
    def upper(self) -> float:
        return self.sigma * (self.gamma + self.m)

    @property
    def lower(self) -> float:
        return self.sigma * (-self.gamma + self.m)

    def with_sigma(self, sigma: float) -> QuantizerConfig:
        return QuantizerConfig(self.gamma, sigma, self.m)


@dataclass(frozen=True)
class QuantizedCounts:
    n_plus: int
    n_minus: int
    n_zero: int

    def __post_init__(self):
        for name in ("n_plus", "n_minus", "n_zero"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.total == 0:
            raise ValueError("counts are empty")

    @property
    def total(self) -> int:
        return self.n_plus + self.n_minus + self.n_zero

    @property
    def frac_plus(self) -> float:
        return self.n_plus / self.total

    @property
    def frac_minus(self) -> float:
        return self.n_minus / self.total

    @property
    def power(self) -> float:
        """Empirical output power, the fraction of non-zero outputs."""
        return (self.n_plus + self.n_minus) / self.total

    @classmethod
    def from_ternary(cls, y) -> QuantizedCounts:
        y = np.asarray(y)
        n_plus = int(np.count_nonzero(y == 1))
        n_minus = int(np.count_nonzero(y == -1))
        return cls(n_plus, n_minus, int(y.size) - n_plus - n_minus)


@dataclass(frozen=True)
class ThresholdStats:
    """Unit-Rayleigh cdf, pdf and pdf slope at ``gamma + m`` and ``m - gamma``."""

    F_plus: float
    F_minus: float
    f_plus: float
    f_minus: float
    fp_plus: float
    fp_minus: float


def _samples(series) -> np.ndarray:
    values = getattr(series, "samples", series)
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError("cannot quantize an empty series")
    return arr


def quantize(series, cfg: QuantizerConfig):
    """Map samples to {-1, 0, +1}.

    Samples exactly on a threshold map to 0.  Returns ``(y, counts)`` with
    ``y`` an int8 array.
    """
    x = _samples(series)
    y = np.zeros(x.size, dtype=np.int8)
    y[x > cfg.upper] = 1
    y[x < cfg.lower] = -1
    return y, QuantizedCounts.from_ternary(y)


def threshold_stats(cfg: QuantizerConfig) -> ThresholdStats:
    hi = cfg.gamma + cfg.m
    lo = -cfg.gamma + cfg.m
    return ThresholdStats(
        F_plus=cdf_unit(hi), F_minus=cdf_unit(lo),
        f_plus=pdf_unit(hi), f_minus=pdf_unit(lo),
        fp_plus=pdf_unit_deriv(hi), fp_minus=pdf_unit_deriv(lo),
    )


def expected_output_mean(cfg: QuantizerConfig, A: float, f0: float, n, linearized: bool = False):
    """E[y_n] for a normalised input of amplitude ``A`` at sample index ``n``.

    The exact form is ``1 - F(gamma+m-A c_n) - F(-gamma+m-A c_n)`` with
    ``c_n = cos(2 pi f0 n)``; ``linearized=True`` gives the small-A expansion
    ``1 - F+ - F- + A c_n (f+ + f-)``.
    """
    c = A * np.cos(2 * np.pi * f0 * np.asarray(n, dtype=float))
    if linearized:
        st = threshold_stats(cfg)
        out = 1.0 - st.F_plus - st.F_minus + c * (st.f_plus + st.f_minus)
    else:
        out = 1.0 - cdf_unit(cfg.gamma + cfg.m - c) - cdf_unit(-cfg.gamma + cfg.m - c)
    return float(out) if np.ndim(out) == 0 else out


def time_avg_output_variance(cfg: QuantizerConfig) -> float:
    """Time-averaged output variance ``(1 - F+ + F-) - (1 - F+ - F-)^2`` (signal-free limit)."""
    st = threshold_stats(cfg)
    value = (1.0 - st.F_plus + st.F_minus) - (1.0 - st.F_plus - st.F_minus) ** 2
    return max(value, 0.0)
