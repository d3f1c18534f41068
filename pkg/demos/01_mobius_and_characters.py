"""
The Mobius function and Dirichlet characters
=============================================

A segmented sieve for mu, the Mertens function, and the character group
mod Q with conductors.
"""

# %%
import time

import numpy as np

from mobskew import arith

t = time.perf_counter()
mu = arith.mobius_sieve(10**7)
print(f"sieve to 1e7 in {time.perf_counter() - t:.2f}s")
for N in (10, 100, 10**4, 10**6, 10**7):
    print(f"M({N}) = {mu.mertens(N)}")

# %%
# mu against trial division on a small range
assert all(mu[n] == arith.mobius_from_factorization(n) for n in range(1, 5000))

# %%
G = arith.character_group(12)
for chi in G:
    tag = "principal" if chi.principal else ("primitive" if chi.primitive else "induced")
    print(chi.index, "conductor", chi.conductor, tag, np.round(chi.values.real, 3))

# %%
# orthogonality over the units
M = G.matrix()
units = np.gcd(np.arange(12), 12) == 1
print(np.round(M[:, units] @ M[:, units].conj().T, 12).real)

# %%
chi4 = arith.find_character(4, at3=-1)
nu = arith.mobius_function(mu) * arith.character_function(chi4)
r = arith.nonpretentious_search(nu, 10**5, arith.PretentiousConfig(10**5))
print(f"M(mu chi4, 1e5) = {r.value:.6f} at t = {r.t:.3f}")
