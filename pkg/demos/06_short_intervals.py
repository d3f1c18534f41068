"""
Short-interval averages of mu
=============================

Sliding windows with exact integer prefix sums, and the comparison bound
e^{-M} M + (log X)^{-1/50} + (log log l / log l)^2.
"""

# %%
from mobskew import arith, correlate

X = 10**6
mu = arith.mobius_sieve(2 * X + 1000)
nu = arith.mobius_function(mu)
M = arith.m_nonpretentious(nu, X, arith.PretentiousConfig(X, grid_step=0.1))
print(f"M(mu, 1e6) = {M:.6f}")

# %%
for l in (10, 100, 1000):
    r = correlate.short_interval_avg(mu, X, l, M_value=M)
    print(f"l={l:5d}  lhs={r.lhs:.6e}  exact={r.lhs_exact}  bound={r.rhs:.4f}")
