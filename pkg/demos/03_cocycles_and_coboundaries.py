"""
Skew products, cocycles and the coboundary split
================================================

T(x, y) = (x + alpha, y + h(x)) with h analytic.  The non-resonant part of h
is a coboundary; removing it conjugates T to a system driven only by the
resonant frequencies.
"""

# %%
import numpy as np

from mobskew import cfrac, fourier, skew

g = cfrac.golden()
cfg = cfrac.expand_cf(g, 40)
h = fourier.random_analytic(200, 1.0, seed=0)
T = skew.SkewProduct(g, h)

# %%
x = np.random.default_rng(1).random(5)
for n in (10, 1000, 10**5):
    gap = np.abs(skew.cocycle_direct(T, n, x) - skew.cocycle_fourier(T, n, x)).max()
    print(f"H({n}, x): direct vs closed form differ by {gap:.1e}")

# %%
M = fourier.resonant_set(cfg, 1.0, 1, 1, 200)
h1, h2 = fourier.split_resonant(h, M)
phi = fourier.coboundary_phi(h2, g)
print("resonant frequencies:", M.members)
print("coboundary residual:", fourier.coboundary_residual(phi, h2, g))

# %%
# with b1 = 5 nothing is resonant and T is conjugate to a rotation product
M5 = fourier.resonant_set(cfg, 1.0, 5, 1, 200)
print("empty:", len(M5) == 0, " conjugation error over 1e5 steps:",
      skew.conjugation_check(T, M5, skew.TorusPoint(0.3, 0.6), 10**5))

# %%
# two-prime derived system, built from its coefficient table
D = skew.derived_system(T, 2, 3, x0=0.31)
print("psi(0) =", D.h.mean, "= -h(0) =", -h.mean)
print("orbit agreement:", skew.derived_orbit_check(T, 2, 3, 0.31, 10**4))
