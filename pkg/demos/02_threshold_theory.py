"""
Where to put the thresholds
===========================

The 3-level quantizer outputs +1 above sigma (m + gamma), -1 below
sigma (m - gamma) and 0 in between.  For a weak sinusoid its output SNR
has a single maximum in gamma.  We locate it, print the curve around it,
and compare with a periodogram measurement on a single record
(which scatters by several percent around the expectation).
"""
import numpy as np

from srquant.quantizer import QuantizerConfig, quantize
from srquant.signal_synth import SignalSpec, snr_db_to_amplitude, synthesize
from srquant.sr_theory import empirical_snr, optimal_threshold, theoretical_mu, theory_curve

g_opt = optimal_threshold()
print(f"optimal threshold gamma = {g_opt:.6f}")

A = snr_db_to_amplitude(-23)
curve = theory_curve(np.arange(0.6, 1.6, 0.1), A)
for g, mu in zip(curve.gammas, curve.mu_values):
    print(f"  gamma={g:.1f}  mu={mu:.5f}")

# one long record, quantized at the optimum
x = synthesize(SignalSpec(A, 0.1, 0.7, 1.0, 2**18, seed=3))
y, counts = quantize(x, QuantizerConfig(g_opt))
print(f"counts +1/-1/0: {counts.n_plus}/{counts.n_minus}/{counts.n_zero}")
print(f"periodogram SNR {empirical_snr(y.astype(float), 0.1):.5f} "
      f"vs theory {theoretical_mu(g_opt, A):.5f}")
