"""Periodic Gibbs measures weighted by soliton counts are invariant under T.

Enumerate a small ring, push the law forward by one step and compare.
"""

from boxball.exactdist import enumerate_gibbs, pushforward_T, tv_distance
from boxball.samplers import CyclicMarkov, GibbsPeriodic, PeriodicBounded, PeriodicIID

for spec in (PeriodicIID(12, 0.35), CyclicMarkov(12, 0.11, 0.8), PeriodicBounded(12, 0.5, 2),
             GibbsPeriodic(12, (0.4, 1.5, -0.3))):
    law = enumerate_gibbs(spec)
    print(f"{type(spec).__name__:16s} states={len(law.support):5d}  TV(law, T law) = {tv_distance(law, pushforward_T(law)):.2e}")
