"""Small numerical kernels: period averages, bracketed roots, golden section."""
from __future__ import annotations

import math

import numpy as np
from scipy import optimize

from .errors import NumericFailure

N_QUAD = 1024
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def period_nodes(n: int = N_QUAD) -> np.ndarray:
    """cos(theta) at the midpoints of ``n`` equal slices of one period."""
    theta = (np.arange(n) + 0.5) * (2.0 * np.pi / n)
    return np.cos(theta)


_COS = period_nodes()


def period_average(func, A: float) -> float:
    """Average of ``func(A cos theta)`` over one period (midpoint rule).

    The integrand is smooth and periodic, so the midpoint rule converges
    spectrally.
    """
    return float(np.mean(func(A * _COS)))


def solve_increasing(func, target: float, lo: float, hi: float, xtol: float = 1e-9) -> float:
    """Root of ``func(x) = target`` on ``[lo, hi]`` by bisection.

    Raises :class:`NumericFailure` if the bracket has no sign change.
    """
    f_lo = func(lo) - target
    f_hi = func(hi) - target
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if f_lo * f_hi > 0:
        raise NumericFailure(f"no sign change on [{lo:g}, {hi:g}] "
                             f"(residuals {f_lo:.3g}, {f_hi:.3g})")
    return float(optimize.bisect(lambda x: func(x) - target, lo, hi, xtol=xtol, maxiter=200))


def golden_max(func, lo: float, hi: float, tol: float = 1e-7, max_iter: int = 200):
    """Maximise a unimodal ``func`` on ``[lo, hi]``.

    ``-inf`` values are allowed (excluded candidates).  Returns
    ``(x, f(x), iterations, converged)``.
    """
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = func(c), func(d)
    it = 0
    while hi - lo > tol and it < max_iter:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = func(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = func(d)
        it += 1
    x, fx = (c, fc) if fc >= fd else (d, fd)
    return x, fx, it, hi - lo <= tol
