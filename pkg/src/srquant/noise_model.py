"""Rayleigh noise pedestal: unit-variance form, sampling and scale fitting.

All quantizer and estimator formulas work with the unit-variance Rayleigh
variable ``w`` whose pdf is ``a^2 w exp(-a^2 w^2 / 2)``.  The physical
Rayleigh scale ``s`` of raw intensities only enters at the boundary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: normalisation constant of the unit-variance Rayleigh form, sqrt(2 - pi/2)
A_NORM = math.sqrt(2.0 - math.pi / 2.0)
#: mean of the unit-variance Rayleigh variable, sqrt(pi / (4 - pi))
M_MEAN = math.sqrt(math.pi / (4.0 - math.pi))
#: Rayleigh scale of the unit-variance form
UNIT_SCALE = 1.0 / A_NORM


@dataclass(frozen=True)
class RayleighParams:
    """Scale and normalisation constants of the noise model.

    ``s`` is the Rayleigh scale of the raw intensity noise in physical
    units; ``a`` and ``m`` are the fixed constants of the unit-variance
    form.  The noise standard deviation is ``s * a``.
    """

    s: float = UNIT_SCALE
    a: float = A_NORM
    m: float = M_MEAN

    def __post_init__(self):
        for name in ("s", "a", "m"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")

    @property
    def sigma(self) -> float:
        """Standard deviation of the physical noise."""
        return self.s * self.a

    @classmethod
    def from_sigma(cls, sigma: float) -> RayleighParams:
        return cls(s=sigma / A_NORM)


def _wrap(result, like):
    return float(result) if np.ndim(like) == 0 else result


def pdf_unit(w):
    """Density of the unit-variance Rayleigh variable (zero for ``w <= 0``)."""
    w_arr = np.asarray(w, dtype=float)
    pos = np.where(w_arr > 0, w_arr, 0.0)
    out = A_NORM**2 * pos * np.exp(-0.5 * A_NORM**2 * pos * pos)
    return _wrap(out, w)


def cdf_unit(w):
    """Cumulative distribution of the unit-variance Rayleigh variable."""
    w_arr = np.asarray(w, dtype=float)
    pos = np.where(w_arr > 0, w_arr, 0.0)
    out = -np.expm1(-0.5 * A_NORM**2 * pos * pos)
    return _wrap(out, w)


def pdf_unit_deriv(w):
    """Analytic derivative of :func:`pdf_unit` with respect to its argument.

    ``a^2 exp(-a^2 w^2 / 2) (1 - a^2 w^2)`` for ``w > 0``, zero otherwise.
    """
    w_arr = np.asarray(w, dtype=float)
    pos = np.where(w_arr > 0, w_arr, 0.0)
    a2w2 = A_NORM**2 * pos * pos
    out = np.where(w_arr > 0, A_NORM**2 * np.exp(-0.5 * a2w2) * (1.0 - a2w2), 0.0)
    return _wrap(out, w)


def sample(n: int, scale: float = UNIT_SCALE, seed=None) -> np.ndarray:
    """Draw ``n`` i.i.d. Rayleigh variates with the given scale.

    ``seed`` is anything accepted by :func:`numpy.random.default_rng`;
    a fixed seed gives a fixed sequence.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if not (scale > 0 and math.isfinite(scale)):
        raise ValueError(f"scale must be positive, got {scale!r}")
    rng = np.random.default_rng(seed)
    return rng.rayleigh(scale, int(n))


def fit_scale(samples) -> float:
    """Maximum-likelihood Rayleigh scale, ``sqrt(sum r^2 / (2 N))``."""
    r = np.asarray(samples, dtype=float).ravel()
    if r.size < 2:
        raise ValueError("need at least 2 samples to fit a Rayleigh scale")
    if not np.all(np.isfinite(r)):
        raise ValueError("samples contain non-finite values")
    if np.any(r < 0):
        raise ValueError("Rayleigh samples must be non-negative")
    s = math.sqrt(math.fsum(r * r) / (2.0 * r.size))
    if s == 0:
        raise ValueError("all samples are zero; scale is undefined")
    return s
