"""
Probability wells above the barrier top
=======================================

For a low barrier (V0 = 5) the over-barrier transmission of a long array
collapses in a few intervals of kappa.  They are the gaps of the infinite
lattice and deepen in proportion to the number of barriers.
"""

# %%
import numpy as np

from multibarrier import UniformBarrierSpec
from multibarrier.analysis import find_resonances, find_wells, kronig_penney_bands, sweep

k0 = np.sqrt(5.0)

for n in (1, 10, 100, 200):
    spec = UniformBarrierSpec(n, 1.0, 1.0, 5.0)
    rep = find_wells(sweep(spec, 0.05, 9.0, 6000), k0, -5.0)
    print(f"N={n}")
    for w in rep.wells:
        print(f"   {w.kappa_lo:.4f} .. {w.kappa_hi:.4f}  floor ln T = {w.ln_t_floor:.1f}")

# %%
# Allowed bands from the one-period half-trace
spec = UniformBarrierSpec(10, 1.0, 1.0, 5.0)
bands = kronig_penney_bands(spec, np.linspace(0.05, 9.0, 4000))
print("bands:", [(round(a, 4), round(b, 4)) for a, b in bands])

# %%
# The N = 10 spikes below kappa_0 sit inside the first band
rep = find_resonances(sweep(spec, 0.05, k0, 8000), spec)
for p in rep.peaks:
    inside = any(a <= p.kappa <= b for a, b in bands)
    print(f"{p.kappa:.6f}  T = {p.t_peak:.6f}  in band: {inside}")
