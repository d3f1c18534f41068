"""
Mobius correlations along orbits
================================
"""

# %%
import warnings

import numpy as np

from mobskew import arith, cfrac, correlate, fourier, skew

warnings.simplefilter("ignore")
mu = arith.mobius_sieve(10**6 + 20_000)
spec, lv = cfrac.construct_liouville(1.0, 10)
T = skew.SkewProduct(spec, fourier.furstenberg_like(lv, 1.0))

# %%
s = correlate.mobius_orbit_average(T, skew.Observable(0, 1), skew.TorusPoint(0, 0), [10**3, 10**4, 10**5, 10**6], mu)
print(s.to_csv())

# %%
print("Davenport, golden alpha:")
print(correlate.davenport_series(cfrac.golden(), [10**3, 10**4, 10**5, 10**6], mu).to_csv())

# %%
g = cfrac.golden()
Tg = skew.SkewProduct(g, fourier.random_analytic(100, 1.0, 3))
r = correlate.bsz_correlation(Tg, skew.Observable(1, 1), skew.TorusPoint(0.1, 0.2), 2, 3, 10**4)
print(f"two-prime correlation (2, 3): {abs(r.direct):.4e}; routes differ by {r.route_residual:.1e}")

# %%
# periodic blocks of length A q_k
b = correlate.block_decompose(T, skew.Observable(0, 1), skew.TorusPoint(0, 0), mu, 10**6, 10**4, lv.q[3], 100)
print(f"lhs {b.lhs:.3e}  blocks {b.blocks:.3e}  periodic {b.periodic:.3e}  boundary {b.boundary_discrepancy:.1e} <= {b.boundary_bound:.1e}")

# %%
F = correlate.PeriodicObservable.random_unimodular(44, np.random.default_rng(0))
d = correlate.dirichlet_decompose(F, 5000, 20, mu)
print(f"|E mu F|^2 = {d.lhs:.3e} <= {d.rhs_all:.3e} (identity residual {d.identity_residual:.1e})")
