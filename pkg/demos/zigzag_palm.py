"""Continuous paths: the zigzag process and its Palm version under T.

Sojourn lengths of TS keep their exponential laws, and re-rooting TS at its
first local maximum maps the Palm path to a path with the same law.
"""

import numpy as np
from scipy import stats

from boxball.continuum import ZigzagSpec, pl_tstar, sample_zigzag, sample_zigzag_palm, sojourn_lengths

z = ZigzagSpec(1.0, 2.0)
s = sample_zigzag(z, (-2000, 2000), seed=0)
down, up = sojourn_lengths(s.transformed().restrict(-1500, 1500))
print("TS down-sojourns vs Exp(2): KS p =", round(stats.kstest(down, "expon", args=(0, 0.5)).pvalue, 3))
print("TS up-sojourns   vs Exp(1): KS p =", round(stats.kstest(up, "expon").pvalue, 3))

first_down = []
for seed in range(2000):
    p = sample_zigzag_palm(z, (-40, 40), seed=seed)
    image, tau = pl_tstar(p.path, p.past_max)
    segs = image.simplify().segments()
    k = image.simplify().times.index(0.0)
    first_down.append(float(segs[k][0]))
print("first block after T* vs Exp(2): KS p =",
      round(stats.kstest(np.array(first_down), "expon", args=(0, 0.5)).pvalue, 3))
