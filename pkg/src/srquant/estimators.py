"""Amplitude estimators for a weak sinusoid on a Rayleigh pedestal.

Two linear (coherent) estimators work on the raw series: a quadrature
lock-in and the Rayleigh maximum-likelihood fixed point.  The stochastic
resonance estimators work on the 3-level quantizer output: crossover
probability (numeric and closed form), quantized-data likelihood
(iterative and closed form) and expected output power.

Every estimator works on the series divided by the noise level ``sigma``
and reports both the normalised amplitude ``A`` and the physical
amplitude ``A * sigma``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._numerics import golden_max, period_average, solve_increasing
from .errors import InvalidConfiguration, NumericFailure
from .noise_model import A_NORM, M_MEAN, cdf_unit
from .quantizer import QuantizedCounts, QuantizerConfig, quantize, threshold_stats
from .sr_theory import optimal_threshold


class Method(str, Enum):
    LOCKIN = "lockin"
    MLE_LINEAR = "mle_linear"
    CROSSOVER_NUMERIC = "crossover_numeric"
    CROSSOVER_CLOSED = "crossover_closed"
    QMLE_ITERATIVE = "qmle_iterative"
    QMLE_CLOSED = "qmle_closed"
    POWER = "power"

    def __str__(self):
        return self.value


COHERENT_METHODS = frozenset({Method.LOCKIN, Method.MLE_LINEAR})
COUNT_METHODS = frozenset({Method.CROSSOVER_NUMERIC, Method.CROSSOVER_CLOSED,
                           Method.QMLE_CLOSED, Method.POWER})


@dataclass(frozen=True)
class AmplitudeEstimate:
    method: Method
    amplitude_normalized: float
    sigma_used: float
    converged: bool = True
    iterations: int = 0
    clamped: bool = False

    def __post_init__(self):
        if not self.amplitude_normalized >= 0:
            raise ValueError(f"negative amplitude {self.amplitude_normalized!r}")
        object.__setattr__(self, "method", Method(self.method))

    @property
    def amplitude_physical(self) -> float:
        return self.amplitude_normalized * self.sigma_used

    def as_row(self) -> dict:
        return {
            "method": str(self.method),
            "amplitude_physical": self.amplitude_physical,
            "amplitude_normalized": self.amplitude_normalized,
            "sigma_used": self.sigma_used,
            "converged": self.converged,
            "iterations": self.iterations,
            "clamped": self.clamped,
        }


def _samples(series) -> np.ndarray:
    return np.asarray(getattr(series, "samples", series), dtype=float).ravel()


def estimate_sigma(series, method: str = "mean") -> float:
    """Noise standard deviation from the data.

    ``"mean"`` (default) uses ``mean(x) / m``: the sinusoid averages out, so
    this is unbiased under any amplitude.  ``"std"`` is the sample standard
    deviation, inflated by a factor ``sqrt(1 + A^2 / 2)`` when a sinusoid
    is present.
    """
    x = _samples(series)
    if x.size < 2:
        raise ValueError("need at least 2 samples to estimate sigma")
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite samples")
    if np.all(x == x[0]):
        raise ValueError("constant series: noise level is undefined")
    if method == "mean":
        sigma = math.fsum(x) / x.size / M_MEAN
    elif method == "std":
        mu = math.fsum(x) / x.size
        d = x - mu
        sigma = math.sqrt(math.fsum(d * d) / (x.size - 1))
    else:
        raise ValueError(f"unknown sigma method {method!r}")
    if not sigma > 0:
        raise ValueError("series mean is not positive; cannot scale to a Rayleigh pedestal")
    return sigma


def _normalized(series, sigma):
    x = _samples(series)
    s = estimate_sigma(x) if sigma is None else float(sigma)
    if not s > 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    return x / s, s


def _check_f0(f0, n):
    if f0 is None or not 0 < f0 < 0.5:
        raise ValueError(f"f0 must lie in (0, 0.5) cycles/sample, got {f0!r}")
    if n < 2 / f0:
        raise ValueError(f"series of length {n} is shorter than two periods of f0={f0}")


def _quadratures(f0: float, n: int) -> np.ndarray:
    phase = 2 * np.pi * f0 * np.arange(n)
    return np.stack([np.cos(phase), np.sin(phase)])


def lockin_estimate(series, f0: float, sigma: float | None = None) -> AmplitudeEstimate:
    """Quadrature correlators ``(2/N) sum x_n cos``, ``(2/N) sum x_n sin``."""
    x, s = _normalized(series, sigma)
    _check_f0(f0, x.size)
    alpha = (2.0 / x.size) * (_quadratures(f0, x.size) @ x)
    return AmplitudeEstimate(Method.LOCKIN, float(np.hypot(*alpha)), s)


def mle_linear_estimate(series, f0: float, sigma: float | None = None,
                        tol: float = 1e-8, max_iter: int = 1000) -> AmplitudeEstimate:
    """Rayleigh-noise maximum likelihood for the quadrature amplitudes.

    Solves the implicit equations

        alpha = (2/N) sum_n (x_n - (1/a^2) / r_n) [cos, sin]_n,
        r_n = x_n - alpha_c cos_n - alpha_s sin_n,

    starting from the lock-in correlators.  The map's residual is the
    gradient of a potential that is concave wherever no ``r_n`` changes
    sign, so each step is a Newton step on the residual with backtracking
    that keeps every ``r_n`` on its starting side.  Stops when the update is
    below ``tol``; ``converged`` is False when ``max_iter`` is hit or a
    denominator falls below 1e-12.
    """
    x, s = _normalized(series, sigma)
    n = x.size
    _check_f0(f0, n)
    cs = _quadratures(f0, n)
    alpha0 = (2.0 / n) * (cs @ x)
    k = 2.0 / (n * A_NORM**2)
    eye = np.eye(2)

    def potential(al, r):
        return al @ alpha0 - 0.5 * al @ al + k * np.sum(np.log(np.abs(r)))

    alpha = alpha0.copy()
    r = x - alpha @ cs
    if np.min(np.abs(r)) < 1e-12:
        return AmplitudeEstimate(Method.MLE_LINEAR, float(np.hypot(*alpha)), s, False, 0)
    side = r > 0
    phi = potential(alpha, r)
    converged = False
    it = 0
    while it < max_iter:
        it += 1
        inv = 1.0 / r
        resid = alpha0 - k * (cs @ inv) - alpha
        hess = -k * ((cs * inv * inv) @ cs.T) - eye
        step = -np.linalg.solve(hess, resid)
        slope = resid @ step
        t = 1.0
        accepted = False
        while t > 1e-12:
            cand = alpha + t * step
            rc = x - cand @ cs
            if np.array_equal(rc > 0, side) and np.min(np.abs(rc)) >= 1e-12:
                phic = potential(cand, rc)
                if phic >= phi + 1e-4 * t * slope:
                    accepted = True
                    break
            t *= 0.5
        if not accepted:
            break
        delta = cand - alpha
        alpha, r, phi = cand, rc, phic
        if np.max(np.abs(delta)) < tol:
            converged = True
            break
    return AmplitudeEstimate(Method.MLE_LINEAR, float(np.hypot(*alpha)), s, converged, it)


def _crossover_model(cfg):
    lo = cfg.m - cfg.gamma
    return lambda A: period_average(lambda c: cdf_unit(lo - c), A)


def _power_model(cfg):
    hi, lo = cfg.m + cfg.gamma, cfg.m - cfg.gamma
    return lambda A: period_average(lambda c: 1.0 - cdf_unit(hi - c) + cdf_unit(lo - c), A)


def _invert_period_average(model, observed, cfg, method, xtol=1e-9):
    null = model(0.0)
    if observed < null:
        return AmplitudeEstimate(method, 0.0, cfg.sigma, clamped=True)
    if observed == null:
        return AmplitudeEstimate(method, 0.0, cfg.sigma)
    A = solve_increasing(model, observed, 0.0, cfg.gamma + cfg.m, xtol=xtol)
    return AmplitudeEstimate(method, A, cfg.sigma)


def crossover_estimate_numeric(counts: QuantizedCounts, cfg: QuantizerConfig,
                               f0: float | None = None) -> AmplitudeEstimate:
    """Match the period-averaged lower-crossover probability to ``N-/N``.

    The period average does not depend on the frequency; ``f0`` is accepted
    for interface symmetry and only range-checked.
    """
    if f0 is not None and not 0 < f0 < 0.5:
        raise ValueError(f"f0 must lie in (0, 0.5), got {f0!r}")
    return _invert_period_average(_crossover_model(cfg), counts.frac_minus, cfg,
                                  Method.CROSSOVER_NUMERIC)


def crossover_estimate_closed(counts: QuantizedCounts, cfg: QuantizerConfig) -> AmplitudeEstimate:
    """Small-A closed form ``A = sqrt(4 (N-/N - F-) / f'-)``."""
    st = threshold_stats(cfg)
    if not st.fp_minus > 0:
        raise InvalidConfiguration(
            f"pdf slope at the lower threshold is {st.fp_minus:.3g}; the closed form needs it positive "
            f"(gamma={cfg.gamma}: lower threshold outside the rising part of the density)")
    radicand = 4.0 * (counts.frac_minus - st.F_minus) / st.fp_minus
    if radicand < 0:
        return AmplitudeEstimate(Method.CROSSOVER_CLOSED, 0.0, cfg.sigma, clamped=True)
    return AmplitudeEstimate(Method.CROSSOVER_CLOSED, math.sqrt(radicand), cfg.sigma)


def power_estimate(counts: QuantizedCounts, cfg: QuantizerConfig,
                   f0: float | None = None) -> AmplitudeEstimate:
    """Match the period-averaged expected output power to ``(N+ + N-)/N``."""
    if f0 is not None and not 0 < f0 < 0.5:
        raise ValueError(f"f0 must lie in (0, 0.5), got {f0!r}")
    return _invert_period_average(_power_model(cfg), counts.power, cfg, Method.POWER)


def qmle_coefficients(counts: QuantizedCounts, cfg: QuantizerConfig):
    """Coefficients of ``a A^4 + b A^2 + c = 0``, the stationarity condition
    of the count likelihood with small-A expected probabilities."""
    st = threshold_stats(cfg)
    Fp, Fm, dp, dm = st.F_plus, st.F_minus, st.fp_plus, st.fp_minus
    n_p, n_m, n_0 = counts.n_plus, counts.n_minus, counts.n_zero
    n = counts.total
    inner = -n_p * dp * Fm + n_m * dm * (1 - Fp)
    a = -n * dp * dm * (dp - dm) / 16.0
    b = 0.25 * (-dp * dm * (Fp - Fm) * (n_p + n_m)
                + (dp - dm) * (inner + n_0 * (dm * (1 - Fp) - Fm * dp)))
    c = (Fp - Fm) * inner + Fm * n_0 * (dp - dm) * (1 - Fp)
    return a, b, c


def qmle_score(A: float, counts: QuantizedCounts, cfg: QuantizerConfig) -> float:
    """Derivative of the small-A count log-likelihood (up to a positive factor)."""
    st = threshold_stats(cfg)
    u = 0.25 * A * A
    p_plus = 1 - st.F_plus - u * st.fp_plus
    p_minus = st.F_minus + u * st.fp_minus
    p_zero = st.F_plus - st.F_minus + u * (st.fp_plus - st.fp_minus)
    return (-counts.n_plus * st.fp_plus / p_plus + counts.n_minus * st.fp_minus / p_minus
            + counts.n_zero * (st.fp_plus - st.fp_minus) / p_zero)


def qmle_closed(counts: QuantizedCounts, cfg: QuantizerConfig) -> AmplitudeEstimate:
    """Closed-form quantized-data ML amplitude,
    ``A^2 = (-b - sqrt(b^2 - 4ac)) / (2a)``.

    A negative discriminant or negative ``A^2`` gives 0 with ``clamped`` set.
    """
    a, b, c = qmle_coefficients(counts, cfg)
    A2 = None
    if a != 0:
        disc = b * b - 4 * a * c
        if disc >= 0:
            A2 = (-b - math.sqrt(disc)) / (2 * a)
    elif b != 0:
        A2 = -c / b
    if A2 is None or A2 < 0:
        return AmplitudeEstimate(Method.QMLE_CLOSED, 0.0, cfg.sigma, clamped=True)
    return AmplitudeEstimate(Method.QMLE_CLOSED, math.sqrt(A2), cfg.sigma)


def _phase_tables(y, f0, n_bins):
    n = np.arange(y.size)
    frac = np.mod(f0 * n, 1.0)
    k = np.minimum((frac * n_bins).astype(np.int64), n_bins - 1)
    occupied = np.bincount(k, minlength=n_bins)
    keep = occupied > 0
    # centroid phase of the samples in each bin; exact when phases repeat
    theta = 2 * np.pi * np.bincount(k, weights=frac, minlength=n_bins)[keep] / occupied[keep]
    cls = np.asarray(y, dtype=np.int64) + 1
    table = np.bincount(cls * n_bins + k, minlength=3 * n_bins).reshape(3, n_bins)[:, keep]
    return theta, table.astype(float)


def qmle_iterative(y, cfg: QuantizerConfig, f0: float, n_phase: int = 64,
                   phase_bins: int = 4096, tol: float = 1e-7) -> AmplitudeEstimate:
    """Maximise the ternary-sequence likelihood over amplitude and phase.

    ``P(y=1) = 1 - F(gamma + m - A cos(2 pi f0 n + phi))``,
    ``P(y=-1) = F(-gamma + m - A cos(...))``, ``P(y=0)`` the remainder.
    Samples are pooled into ``phase_bins`` bins of ``f0 n mod 1`` (each bin
    evaluated at its sample centroid).  Golden-section search on ``A`` in
    ``[0, gamma + m]`` is run for each of ``n_phase`` grid phases, the best
    phase is refined once, then ``A`` is re-optimised.  Candidates with a
    zero probability for an observed symbol score ``-inf``.
    """
    y = np.asarray(y).ravel()
    if y.size == 0:
        raise ValueError("empty ternary sequence")
    if not np.all(np.isin(y, (-1, 0, 1))):
        raise ValueError("ternary sequence must contain only -1, 0, 1")
    _check_f0(f0, y.size)
    theta, table = _phase_tables(y, f0, phase_bins)
    hi, lo = cfg.gamma + cfg.m, cfg.m - cfg.gamma
    c_minus, c_zero, c_plus = table

    def loglik(A, phi):
        c = A * np.cos(theta + phi)
        p_minus = cdf_unit(lo - c)
        p_plus = 1.0 - cdf_unit(hi - c)
        p_zero = 1.0 - p_minus - p_plus
        total = 0.0
        for cnt, p in ((c_minus, p_minus), (c_plus, p_plus), (c_zero, p_zero)):
            used = cnt > 0
            if np.any(p[used] <= 0):
                return -math.inf
            total += float(cnt[used] @ np.log(p[used]))
        return total

    a_max = cfg.gamma + cfg.m
    iterations = 0
    converged = True
    best = (-math.inf, 0.0, 0.0)
    for phi in np.arange(n_phase) * (2 * np.pi / n_phase):
        A, val, it, ok = golden_max(lambda A: loglik(A, phi), 0.0, a_max, tol)
        iterations += it
        converged &= ok
        if val > best[0]:
            best = (val, A, phi)
    _, A, phi = best
    step = 2 * np.pi / n_phase
    phi, _, it, ok = golden_max(lambda p: loglik(A, p), phi - step, phi + step, tol)
    iterations += it
    converged &= ok
    A, val, it, ok = golden_max(lambda a: loglik(a, phi), 0.0, a_max, tol)
    iterations += it
    converged &= ok
    if loglik(0.0, 0.0) >= val:
        A = 0.0
    return AmplitudeEstimate(Method.QMLE_ITERATIVE, float(A), cfg.sigma, bool(converged), iterations)


def estimate(series, method, f0: float | None = None, gamma: float | None = None,
             sigma: float | None = None) -> AmplitudeEstimate:
    """Run one estimator on a raw series.

    ``sigma`` defaults to :func:`estimate_sigma`; ``gamma`` to the optimal
    threshold.  Count-based methods only see the quantizer counts.
    """
    method = Method(method)
    x = _samples(series)
    s = estimate_sigma(x) if sigma is None else float(sigma)
    if method is Method.LOCKIN:
        return lockin_estimate(x, f0, s)
    if method is Method.MLE_LINEAR:
        return mle_linear_estimate(x, f0, s)
    if gamma is None:
        gamma = optimal_threshold()
    cfg = QuantizerConfig(gamma, s)
    y, counts = quantize(x, cfg)
    if method is Method.CROSSOVER_NUMERIC:
        return crossover_estimate_numeric(counts, cfg, f0)
    if method is Method.CROSSOVER_CLOSED:
        return crossover_estimate_closed(counts, cfg)
    if method is Method.QMLE_CLOSED:
        return qmle_closed(counts, cfg)
    if method is Method.POWER:
        return power_estimate(counts, cfg, f0)
    if method is Method.QMLE_ITERATIVE:
        return qmle_iterative(y, cfg, f0)
    raise NumericFailure(f"unhandled method {method}")  # pragma: no cover
