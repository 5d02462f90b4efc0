"""Output SNR of the 3-level quantizer, the optimal threshold, and
periodogram-based empirical SNR for validating the theory."""
from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import NumericFailure
from .noise_model import M_MEAN, cdf_unit, pdf_unit, pdf_unit_deriv
from .quantizer import QuantizerConfig, quantize
from .signal_synth import DEFAULT_F0, SignalSpec, position_seed, synthesize

OPT_BRACKET = (0.2, 3.0)


def _terms(gamma):
    g = np.asarray(gamma, dtype=float)
    hi, lo = g + M_MEAN, M_MEAN - g
    F_p, F_m = cdf_unit(hi), cdf_unit(lo)
    f_p, f_m = pdf_unit(hi), pdf_unit(lo)
    d_p, d_m = pdf_unit_deriv(hi), pdf_unit_deriv(lo)
    # numerator sum S = f+ + f-, denominator D = time-averaged output variance
    S = f_p + f_m
    D = F_p + 3 * F_m - (F_p + F_m) ** 2
    # derivatives in gamma; the lower argument moves opposite to gamma
    dS = d_p - d_m
    dD = f_p - 3 * f_m - 2 * (F_p + F_m) * (f_p - f_m)
    return S, D, dS, dD


def theoretical_mu(gamma, A: float = 0.1):
    """Low-SNR output SNR ``A^2 (f+ + f-)^2 / (2 <var y>)``.

    Where the output variance vanishes (very large ``gamma``) the ratio is
    undefined and NaN is returned instead of dividing by zero.
    """
    if np.any(np.asarray(gamma) <= 0):
        raise ValueError("gamma must be positive")
    S, D, _, _ = _terms(gamma)
    with np.errstate(divide="ignore", invalid="ignore"):
        mu = np.where(D > 1e-300, A * A * S * S / (2 * np.where(D > 1e-300, D, 1.0)), np.nan)
    return float(mu) if np.ndim(gamma) == 0 else mu


def mu_slope(gamma, A: float = 0.1):
    """Analytic d(mu)/d(gamma)."""
    S, D, dS, dD = _terms(gamma)
    out = 0.5 * A * A * (2 * S * dS * D - S * S * dD) / (D * D)
    return float(out) if np.ndim(gamma) == 0 else out


def stationarity_sides(gamma: float) -> tuple[float, float]:
    """Both sides of the optimal-threshold identity.

    ``(f+ + f-) / (2 (f'+ - f'-))`` against
    ``(F+ + 3F- - (F+ + F-)^2) / (f+ - 3f- - 2 (F+ + F-)(f+ - f-))``,
    with f' the pdf slope in its own argument.
    """
    S, D, dS, dD = _terms(gamma)
    return float(S / (2 * dS)), float(D / dD)


def _slope_numerator(gamma: float) -> float:
    S, D, dS, dD = _terms(gamma)
    return float(2 * dS * D - S * dD)


@functools.lru_cache(maxsize=8)
def optimal_threshold(bracket: tuple[float, float] = OPT_BRACKET, xtol: float = 1e-14) -> float:
    """Threshold maximising :func:`theoretical_mu`, independent of ``A``.

    Solves d(mu)/d(gamma) = 0 on ``bracket`` using the pole-free numerator
    ``2 S' D - S D'``.
    """
    lo, hi = bracket
    g_lo, g_hi = _slope_numerator(lo), _slope_numerator(hi)
    if not g_lo * g_hi < 0:
        raise NumericFailure(f"d(mu)/d(gamma) does not change sign on [{lo}, {hi}]")
    root, info = optimize.brentq(_slope_numerator, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps,
                                 maxiter=500, full_output=True)
    if not info.converged:
        raise NumericFailure(f"optimal threshold search did not converge on [{lo}, {hi}]")
    return float(root)


@dataclass(frozen=True, eq=False)
class SnrCurve:
    gammas: np.ndarray
    mu_values: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=float)
        mu = np.asarray(self.mu_values, dtype=float)
        if g.shape != mu.shape or g.ndim != 1:
            raise ValueError("gammas and mu_values must be 1-D and of equal length")
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "mu_values", mu)

    @property
    def argmax(self) -> float:
        return float(self.gammas[np.nanargmax(self.mu_values)])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["gamma", "mu"])
            for g, mu in zip(self.gammas, self.mu_values):
                w.writerow([repr(float(g)), repr(float(mu))])

    @classmethod
    def from_csv(cls, path) -> SnrCurve:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(data[:, 0], data[:, 1])


def theory_curve(gammas, A: float = 0.1) -> SnrCurve:
    g = np.asarray(gammas, dtype=float)
    return SnrCurve(g, theoretical_mu(g, A))


@functools.lru_cache(maxsize=64)
def _harmonic_mask(n: int, f0: float) -> np.ndarray:
    k_max = n // 2
    mask = np.zeros(k_max + 1, dtype=bool)
    h = 1
    while h * f0 <= 0.5 + 1e-12:
        k = int(round(h * f0 * n))
        mask[max(k - 1, 1):min(k + 1, k_max) + 1] = True
        h += 1
    mask[0] = False
    return mask


def empirical_snr(series, f0: float) -> float:
    """Periodogram SNR: power within +-1 bin of f0, 2 f0, ... up to Nyquist
    over the power in every other non-DC bin (rectangular window)."""
    if not 0 < f0 < 0.5:
        raise ValueError(f"f0 must lie in (0, 0.5), got {f0!r}")
    x = np.asarray(getattr(series, "samples", series), dtype=float).ravel()
    n = x.size
    if n < 2 / f0:
        raise ValueError(f"series of length {n} is shorter than two periods of f0={f0}")
    p = np.abs(np.fft.rfft(x)) ** 2
    # one-sided weights: Nyquist (even n) is not mirrored
    p[1:] *= 2.0
    if n % 2 == 0:
        p[-1] *= 0.5
    mask = _harmonic_mask(n, float(f0))
    rest = p[1:][~mask[1:]].sum()
    signal = p[mask].sum()
    if rest == 0:
        return math.inf
    return float(signal / rest)


@dataclass(frozen=True, eq=False)
class SweepResult:
    curve: SnrCurve
    argmaxes: np.ndarray

    @property
    def mean_argmax(self) -> float:
        return float(np.mean(self.argmaxes))


def threshold_sweep(A: float, sigma: float, n_trials: int, n_samples: int, gammas,
                    f0: float = DEFAULT_F0, seed: int = 0) -> SweepResult:
    """Monte Carlo search for the empirically optimal threshold.

    Each trial draws a random phase and a fresh noise record, quantizes it
    at every ``gamma`` and keeps the ``gamma`` with the largest empirical
    SNR.  Returns the trial-averaged SNR curve and the per-trial argmaxes.
    """
    gammas = np.asarray(gammas, dtype=float)
    if gammas.ndim != 1 or gammas.size == 0:
        raise ValueError("gammas must be a non-empty 1-D sequence")
    if np.any(np.diff(gammas) <= 0) or np.any(gammas <= 0):
        raise ValueError("gammas must be positive and strictly ascending")
    if n_trials < 1 or n_samples < 1 or sigma <= 0 or A < 0:
        raise ValueError("n_trials, n_samples and sigma must be positive; A non-negative")
    snr = np.empty((n_trials, gammas.size))
    for t in range(n_trials):
        rng = np.random.default_rng(position_seed(seed, t))
        spec = SignalSpec(A, f0, rng.uniform(0, 2 * np.pi), sigma, n_samples,
                          int(rng.integers(2**63)))
        x = synthesize(spec)
        for j, g in enumerate(gammas):
            y, _ = quantize(x, QuantizerConfig(g, sigma))
            snr[t, j] = empirical_snr(y.astype(float), f0)
    argmaxes = gammas[np.argmax(snr, axis=1)]
    return SweepResult(SnrCurve(gammas, snr.mean(axis=0)), argmaxes)
