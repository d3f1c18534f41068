"""
Cocycle deviation on resonant convergents
=========================================
"""

# %%
import warnings

import numpy as np

from mobskew import cfrac, estimates, fourier, skew

warnings.simplefilter("ignore")
spec, lv = cfrac.construct_liouville(1.0, 10)
h = fourier.furstenberg_like(lv, 1.0)
T = skew.SkewProduct(spec, h)

# %%
# the constant is calibrated at k = 1 and then held fixed
for r in estimates.deviation_series(h, lv, [1, 2, 3]):
    print(r.to_json())

# %%
cfg = estimates.EstimateConfig(1.0)
pts = np.linspace(0, 1, 64, endpoint=False)
for k in (1, 2, 3):
    r = estimates.almost_period_deviation(T, cfg, lv, k, 1, pts)
    print(f"k={k}: d(T^q_k p, p) <= {r.total:.3e}  (below delta={cfg.delta}: {r.below_delta})")
