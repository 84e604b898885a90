"""
One barrier against two
=======================

A single barrier of height 40 transmits smoothly below the top.  Adding a
second one opens a well between them, and T jumps to one at the energies of
its quasi-bound states.
"""

# %%
import numpy as np

from multibarrier import UniformBarrierSpec
from multibarrier.analysis import find_resonances, sweep

k0 = np.sqrt(40.0)
one = UniformBarrierSpec(1, 1.0, 1.0, 40.0)
two = UniformBarrierSpec(2, 1.0, 1.0, 40.0)

# %%
# ln T on the same grid, every 200th point
s1 = sweep(one, 0.05, 9.0, 2000)
s2 = sweep(two, 0.05, 9.0, 2000)
print(" kappa    ln T (N=1)   ln T (N=2)")
for i in range(0, 2000, 200):
    print(f"{s1.kappa_grid[i]:6.3f}  {s1.ln_t[i]:11.4f}  {s2.ln_t[i]:11.4f}")

# %%
# The spikes are far narrower than the grid step.  Each grid maximum is
# refined by golden-section search on the exact ln T.
rep = find_resonances(sweep(two, 0.05, k0, 4000), two)
for p in rep.peaks:
    print(f"spike at kappa = {p.kappa:.8f}, T = {p.t_peak:.10f}, FWHM = {p.width:.2e}")
print("l pi / tau ladder:", [(round(k, 4), hit) for k, hit in rep.predicted])

# %%
# More barriers split each spike into N - 1 components
for n in range(2, 7):
    spec = UniformBarrierSpec(n, 1.0, 1.0, 40.0)
    r = find_resonances(sweep(spec, 0.05, k0, 6000), spec)
    print(n, [round(p.kappa, 4) for p in r.cluster_near(4.6)])
