import math
from fractions import Fraction

import pytest

from mobskew import cfrac
from mobskew.errors import OutOfDomain, PrecisionExhausted


def test_golden_expansion(golden_cf):
    g, cf = golden_cf
    assert set(cf.quotients) == {1}
    assert cf.q[:8] == (1, 1, 2, 3, 5, 8, 13, 21)


def test_pi_minus_3_quotients():
    cf = cfrac.expand_cf(cfrac.pi_minus_3(200), 5)
    assert list(cf.quotients) == [7, 15, 1, 292, 1]
    assert cf.q[:5] == (1, 7, 106, 113, 33102)


def test_decimal_too_short_raises():
    spec = cfrac.IrrationalSpec.from_decimal("0.14159", 20)
    with pytest.raises(PrecisionExhausted):
        cfrac.expand_cf(spec, 30)


@pytest.mark.parametrize("k", range(1, 20))
def test_qnorm_bounds_golden(golden_cf, k):
    g, cf = golden_cf
    assert cfrac.qnorm_check(cf, g, k).holds


def test_determinant_identity(golden_cf):
    _, cf = golden_cf
    for k in range(0, cf.K + 1):
        assert cfrac.determinant(cf, k) == (-1) ** ((k - 1) % 2)


def test_liouville_growth(liouville):
    spec, cf = liouville
    assert cf.q == (1, 2, 7, 44, 3584912899)
    for k in range(1, cf.K):
        assert math.log(cf.q[k + 1]) > cf.q[k] / 2
    assert cfrac.resonant_indices(cf, 1.0) == [1, 2, 3]


def test_liouville_cap_warns():
    with pytest.warns(UserWarning):
        cfrac.construct_liouville(1.0, 10)


def test_golden_resonant_only_at_small_q(golden_cf):
    _, cf = golden_cf
    assert cfrac.resonant_indices(cf, 1.0) == [1, 2, 3]
    assert cfrac.resonant_indices(cf, 1.0, b1=5) == []


def test_tail_unknown_is_out_of_domain(liouville):
    spec, cf = liouville
    with pytest.raises(OutOfDomain):
        cfrac.qnorm_check(cf, spec, cf.K)


def test_json_roundtrip(liouville):
    _, cf = liouville
    back = cfrac.ContinuedFraction.from_json(cf.to_json())
    assert back.q == cf.q and back.p == cf.p


def test_exceeds_exp_boundary():
    assert cfrac.exceeds_exp(13, 1, 5)  # e^2.5 = 12.18
    assert not cfrac.exceeds_exp(12, 1, 5)
    assert cfrac.exceeds_exp(10**40, Fraction(1), 150)


def test_irrational_spec_roundtrip():
    g = cfrac.golden()
    assert cfrac.IrrationalSpec.from_dict(g.to_dict()).fixed() == g.fixed()
    lo, hi = g.interval(128)
    assert lo < Fraction(int((math.sqrt(5) - 1) / 2 * 2**52), 2**52) + Fraction(1, 2**50) and hi > lo
