"""
The Rayleigh pedestal
=====================

Photomultiplier intensity noise is modelled as Rayleigh.  Normalised to
unit variance it has mean m = sqrt(pi / (4 - pi)) and scale 1/a with
a = sqrt(2 - pi/2).  Here we draw a noise record, fit its scale and check
the normalised moments.
"""
import numpy as np

from srquant import noise_model as nm

print(f"a = {nm.A_NORM:.6f}, m = {nm.M_MEAN:.6f}, unit scale = {nm.UNIT_SCALE:.6f}")

# a raw record with the scale measured on the dark cuvette
raw = nm.sample(100_000, scale=0.026, seed=1)
s_hat = nm.fit_scale(raw)
print(f"fitted scale {s_hat:.5f} (true 0.026)")

# dividing by sigma = s * a gives the unit-variance form
w = raw / (s_hat * nm.A_NORM)
print(f"normalised mean {w.mean():.4f}, std {w.std():.4f}")

# histogram against the analytic density
edges = np.linspace(0, 6, 25)
hist, _ = np.histogram(w, edges, density=True)
mid = 0.5 * (edges[1:] + edges[:-1])
for x, h, f in zip(mid[::4], hist[::4], nm.pdf_unit(mid[::4])):
    print(f"  w={x:4.2f}  empirical {h:.4f}  model {f:.4f}")
