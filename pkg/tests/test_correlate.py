from fractions import Fraction

import numpy as np
import pytest

from mobskew import _frozen, arith, cfrac, correlate, fourier, skew


def test_davenport_trivial_cases(mu):
    g = cfrac.golden()
    assert abs(correlate.davenport_sum(g, 1, mu) - np.exp(2j * np.pi * float(g))) < 1e-15
    assert correlate.davenport_sum(0, 10, mu) == -0.1


def test_davenport_frozen(mu):
    v = correlate.davenport_sum(cfrac.golden(), 10**5, mu)
    assert abs(v - _frozen.DAVENPORT_GOLDEN_1E5) < 1e-13


def test_main_sum_reduces_to_mertens(mu, golden_cf):
    T = skew.SkewProduct(golden_cf[0], fourier.AnalyticCircleFunction.zero())
    s = correlate.mobius_orbit_average(T, skew.Observable(0, 1), skew.TorusPoint(0, 0), [10, 100, 1000], mu)
    assert [s.value(n) for n in (10, 100, 1000)] == [-0.1, 0.01, 0.002]


def test_orbit_average_frozen_and_decreasing(mu, furstenberg):
    T = furstenberg[3]
    s = correlate.mobius_orbit_average(T, skew.Observable(0, 1), skew.TorusPoint(0, 0), [10**4, 10**6], mu)
    assert abs(s.value(10**4) - _frozen.ORBIT_AVG_1E4) < 1e-9
    assert abs(s.value(10**6) - _frozen.ORBIT_AVG_1E6) < 1e-9
    assert abs(s.value(10**6)) < abs(s.value(10**4))


def test_series_csv(mu):
    s = correlate.davenport_series(cfrac.golden(), [10, 100], mu)
    lines = s.to_csv().split("\n")
    assert lines[0] == "N,re,im,abs" and len(lines) == 4


def test_bsz_routes(golden_cf):
    T = skew.SkewProduct(golden_cf[0], fourier.random_analytic(100, 1.0, 9))
    r = correlate.bsz_correlation(T, skew.Observable(1, 2), skew.TorusPoint(0.2, 0.4), 3, 7, 2000)
    assert r.route_residual < 1e-9
    r0 = correlate.bsz_correlation(T, skew.Observable(1, 0), skew.TorusPoint(0.2, 0.4), 2, 5, 2000)
    assert r0.geometric_residual < 1e-12


def test_block_decompose_against_per_window_oracle(mu, furstenberg):
    _, cf, _, T = furstenberg
    bp = _frozen.BLOCK_PARAMS
    r = correlate.block_decompose(T, skew.Observable(0, 1), skew.TorusPoint(0, 0), mu, bp["N"], bp["N0"], cf.q[bp["k"]], bp["A"])
    assert abs(r.lhs - _frozen.BLOCK_LHS) < 1e-10
    assert abs(r.periodic - _frozen.BLOCK_PERIODIC) < 1e-10
    assert r.boundary_ok and r.boundary_discrepancy <= r.boundary_bound_coarse


def test_char_coefficients_parseval():
    rng = np.random.default_rng(0)
    F = correlate.PeriodicObservable.random_unimodular(30, rng)
    for d in arith.divisors(30):
        G, w = correlate.char_coefficients(F, d)
        assert np.sum(np.abs(w) ** 2) <= 1 + 1e-12


@pytest.mark.parametrize("Q,L,A", [(1, 0, 5), (12, 1000, 7), (30, 77, 3), (60, 99_000, 50)])
def test_dirichlet_identity_and_bound(mu, Q, L, A):
    F = correlate.PeriodicObservable.random_unimodular(Q, np.random.default_rng(Q))
    r = correlate.dirichlet_decompose(F, L, A, mu)
    assert r.identity_residual < 1e-10 and r.character_residual < 1e-10
    assert r.holds_all
    assert r.pairs_all == Q


def test_primitive_only_variant_counterexample(mu):
    # with only primitive characters the bound can fail: for Q = 3 the
    # imprimitive principal character carries the whole d = 1 term
    F = correlate.PeriodicObservable(np.array([1, 1, 1], dtype=complex))
    r = correlate.dirichlet_decompose(F, 5856, 4, mu)
    assert r.lhs == 0.25 and r.rhs_primitive == 0.0
    assert not r.holds_primitive
    assert r.holds_all


def test_short_interval_exact_and_naive_agree(mu):
    fast, exact = correlate.short_interval_lhs(mu, 10**4, 100)
    assert exact == correlate.short_interval_naive(mu, 10**4, 100)


def test_short_interval_frozen(mu):
    assert correlate.short_interval_lhs(mu, 10**6, 1000)[1] == _frozen.SHORT_MU_1E6_L1000
    assert correlate.short_interval_lhs(mu, 10**6, 10)[1] == _frozen.SHORT_MU_1E6_L10
    assert _frozen.SHORT_MU_1E6_L1000 == Fraction(594705141, 10**12)


def test_short_interval_stride(mu):
    a = correlate.short_interval_lhs(mu, 10**4, 50, stride=1)[0]
    b = correlate.short_interval_lhs(mu, 10**4, 50, stride=7)[0]
    assert abs(a - b) < 0.01


def test_mu_chi_sums(mu):
    chi4 = arith.find_character(4, at3=-1)
    assert correlate.mu_chi_sum(chi4, 10, mu) == 2
    assert correlate.mu_chi_sum(arith.character_group(1).principal, 10, mu) == -1
    env = correlate.rho_envelope(5, [10, 100, 1000], mu)
    assert all(a[1] >= b[1] for a, b in zip(env, env[1:]))
