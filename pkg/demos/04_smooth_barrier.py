"""
A Gaussian barrier as a staircase
=================================

Any potential that decays at both ends can be cut into equal steps and fed
to the same solver.  Midpoint sampling converges at second order.
"""

# %%
import numpy as np

from multibarrier import sample_smooth, scatter


def v(x):
    return 10 * np.exp(-(x**2))


def t(n):
    return scatter(sample_smooth(v, -4, 4, n), 5.0).transmission


ref = t(4096)
prev = None
for n in (16, 32, 64, 128, 256, 512, 1024):
    err = abs(t(n) - ref)
    order = "" if prev is None else f"order {np.log2(prev / err):.2f}"
    print(f"{n:5d} steps  T = {t(n):.12f}  |T - T_4096| = {err:.2e}  {order}")
    prev = err

# %%
# Same barrier across energies: below and above the peak height of 10
for E in (2.0, 5.0, 8.0, 10.0, 12.0, 20.0):
    print(E, scatter(sample_smooth(v, -4, 4, 512), E).transmission)
