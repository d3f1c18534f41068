"""
Convergents and Liouville-type rotation numbers
===============================================
"""

# %%
import warnings

from mobskew import cfrac

g = cfrac.golden()
cf = cfrac.expand_cf(g, 30)
for k in (1, 5, 10, 20, 25):
    r = cfrac.qnorm_check(cf, g, k)
    print(f"k={k:2d} q={cf.q[k]:>8d}  1/(q_k+q_(k+1)) < ||q_k alpha|| < 1/q_(k+1): {r.holds}")

# %%
pi3 = cfrac.pi_minus_3(200)
print("pi - 3 =", list(cfrac.expand_cf(pi3, 10).quotients))

# %%
# q_(k+1) > exp(q_k / 2) at every k; the expansion is cut once q needs ~1M bits
with warnings.catch_warnings(record=True) as w:
    warnings.simplefilter("always")
    spec, lv = cfrac.construct_liouville(1.0, 10)
print("quotients", lv.quotients, "denominators", lv.q)
print("capped:", bool(w))
print("resonant indices:", cfrac.resonant_indices(lv, 1.0))
print("golden, b1=1:", cfrac.resonant_indices(cf, 1.0), " b1=5:", cfrac.resonant_indices(cf, 1.0, 5))
