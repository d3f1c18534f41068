"""Regression values computed by independent oracles (tools/freeze_oracles.py). Do not edit."""

from fractions import Fraction

ORBIT_AVG_1E4 = (-0.002048522006102113-0.0011072264603910404j)
ORBIT_AVG_1E6 = (-0.00031107967357336274-0.0003033548468545953j)
DAVENPORT_GOLDEN_1E5 = (0.0028227416401133405+0.0008221195509643948j)
SHORT_MU_1E6_L1000 = Fraction(594705141, 1000000000000)
SHORT_MU_1E6_L10 = Fraction(762229, 12500000)
M_MU_CHI4_1E5 = 1.6593283171129278
M_MU_CHI4_1E5_T = -9047.619392284905
ALMOST_PERIOD_K1 = 0.4957173272274791
BLOCK_LHS = (-0.0022659617133624346-0.00109131078507012j)
BLOCK_PERIODIC = (-0.0015514152624781178-0.001296190599420237j)
BLOCK_PARAMS = {'N': 20000, 'N0': 200, 'k': 3, 'A': 20}
