"""Reference implementations that share no code with the package.

Rayleigh quantities come from scipy.stats; the slope of the density is a
central difference.
"""
import math

import numpy as np
from scipy import optimize, stats

A = math.sqrt(2 - math.pi / 2)
M = math.sqrt(math.pi / (4 - math.pi))
_RAY = stats.rayleigh(scale=1 / A)


def dens(w):
    return float(_RAY.pdf(w))


def cdf(w):
    return float(_RAY.cdf(w))


def dens_slope(w, h=1e-5):
    return (dens(w + h) - dens(w - h)) / (2 * h)


def threshold_terms(gamma):
    hi, lo = M + gamma, M - gamma
    return cdf(hi), cdf(lo), dens(hi), dens(lo), dens_slope(hi), dens_slope(lo)


def output_snr(gamma, amp):
    Fp, Fm, fp, fm, _, _ = threshold_terms(gamma)
    p_plus, p_minus = 1 - Fp, Fm
    var = p_plus + p_minus - (p_plus - p_minus) ** 2
    return amp**2 * (fp + fm) ** 2 / (2 * var)


def count_score(u, n_plus, n_minus, n_zero, gamma, terms=None):
    """Derivative in A of the small-A count log-likelihood divided by A/2, at A^2 = u."""
    Fp, Fm, _, _, dp, dm = threshold_terms(gamma) if terms is None else terms
    return (-n_plus * dp / (1 - Fp - u * dp / 4) + n_minus * dm / (Fm + u * dm / 4)
            + n_zero * (dp - dm) / (Fp - Fm + u * (dp - dm) / 4))


def count_mle(n_plus, n_minus, n_zero, gamma):
    """Brute force: scan A^2 over the region where all three probabilities
    are positive and return sqrt of the first + to - crossing of the score."""
    terms = threshold_terms(gamma)
    Fp, Fm, _, _, dp, dm = terms
    u_max = (gamma + M) ** 2
    for p0, slope in ((1 - Fp, -dp / 4), (Fm, dm / 4), (Fp - Fm, (dp - dm) / 4)):
        if slope < 0:
            u_max = min(u_max, -p0 / slope)
    grid = np.linspace(0, u_max * (1 - 1e-9), 200001)
    vals = count_score(grid, n_plus, n_minus, n_zero, gamma, terms)
    if vals[0] <= 0:
        return 0.0
    idx = np.flatnonzero((vals[:-1] > 0) & (vals[1:] <= 0))
    if idx.size == 0:
        return math.sqrt(grid[-1])
    i = idx[0]
    u = optimize.brentq(count_score, grid[i], grid[i + 1],
                        args=(n_plus, n_minus, n_zero, gamma, terms), xtol=1e-16, rtol=1e-15)
    return math.sqrt(u)


def expected_fraction_minus(amp, gamma, n_theta=4096):
    theta = 2 * np.pi * (np.arange(n_theta) + 0.5) / n_theta
    return float(np.mean(_RAY.cdf(M - gamma - amp * np.cos(theta))))


def expected_fraction_plus(amp, gamma, n_theta=4096):
    theta = 2 * np.pi * (np.arange(n_theta) + 0.5) / n_theta
    return float(np.mean(_RAY.sf(M + gamma - amp * np.cos(theta))))
