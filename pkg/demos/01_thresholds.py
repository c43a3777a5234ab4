"""
RDT thresholds
==============

The two-sided test compares ``|sum(y)|`` with ``sqrt(n) * lambda``. The
threshold grows with the tolerated interference because the statistic may be
shifted by up to ``tau * sqrt(n)`` before any signal is present.
"""

import math

import numpy as np

from mpdetect import phi_inv, rdt_threshold, threshold_residual

# with no tolerated interference the threshold is the two-sided normal quantile
print("lambda(0.05, 0) =", rdt_threshold(0.05, 0.0))
print("phi_inv(0.975)  =", phi_inv(0.975))

# as the shift a = tau * sqrt(n) grows, lambda approaches a + phi_inv(1 - gamma)
print(f"\n{'a':>6} {'lambda':>12} {'a + z_0.95':>12} {'residual':>10}")
for a in np.linspace(0.0, 6.0, 7):
    lam = rdt_threshold(0.05, a)
    print(f"{a:6.2f} {lam:12.8f} {a + phi_inv(0.95):12.8f} {threshold_residual(lam, 0.05, a):10.1e}")

# the per-sample threshold on the mean, lambda / sqrt(n), tends to tau
tau = 0.25
print(f"\n{'n':>6} {'lambda/sqrt(n)':>15}")
for n in (4, 16, 64, 256, 1024, 4096):
    print(f"{n:6d} {rdt_threshold(0.05, tau * math.sqrt(n)) / math.sqrt(n):15.6f}")
