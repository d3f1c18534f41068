import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mobskew import _numeric, cfrac, fourier, skew


@pytest.fixture(scope="module")
def T(golden_cf):
    return skew.SkewProduct(golden_cf[0], fourier.random_analytic(200, 1.0, 0))


def test_observe_quarter_turns_exact():
    f = skew.Observable(0, 1)
    assert skew.observe(f, 0.0, 0.25) == 1j
    assert skew.observe(f, 0.3, 0.5) == -1


def test_observable_rejects_fractional_frequency():
    with pytest.raises(ValueError):
        skew.Observable(0.5, 1)


def test_orbit_first_steps(T):
    o = skew.orbit(T, skew.TorusPoint(0.1, 0.2), 3)
    assert abs(o.x[1] - (0.1 + T.alpha_float) % 1) < 1e-15
    assert abs(o.y_unreduced[1] - (0.2 + T.h(0.1))) < 1e-14


def test_orbit_csv_header(T):
    text = skew.orbit_csv(T, skew.TorusPoint(0, 0), 3)
    assert text.splitlines()[0] == "n,x,y"
    assert len(text.splitlines()) == 4


@settings(max_examples=20)
@given(st.integers(0, 3000), st.floats(0, 1, exclude_max=True))
def test_cocycle_routes_agree(n, x):
    g = cfrac.golden()
    T = skew.SkewProduct(g, fourier.random_analytic(50, 1.0, 1))
    assert abs(skew.cocycle_direct(T, n, x) - skew.cocycle_fourier(T, n, x)) < 1e-10


@settings(max_examples=20)
@given(st.integers(1, 500), st.integers(1, 500), st.floats(0, 1, exclude_max=True))
def test_cocycle_composition(n1, n2, x):
    g = cfrac.golden()
    T = skew.SkewProduct(g, fourier.random_analytic(50, 1.0, 2))
    assert skew.cocycle_compose_check(T, n1, n2, x) < 1e-10


def test_derived_system_mean_and_orbits(T):
    for p1, p2 in ((2, 3), (5, 3)):
        D = skew.derived_system(T, p1, p2, 0.31, 2)
        assert D.h.mean == 2 * (p1 - p2) * T.h.mean
        assert skew.derived_orbit_check(T, p1, p2, 0.31, 2000) < 1e-9


def test_derived_system_rejects_equal_primes(T):
    with pytest.raises(ValueError):
        skew.derived_system(T, 3, 3, 0.0)


def test_psi_coefficients_match_direct(T):
    D = skew.derived_system(T, 2, 3, 0.2, 1)
    x = np.linspace(0, 1, 50, endpoint=False)
    assert np.abs(D.h(x) - skew.psi_direct(T, 2, 3, 0.2, x, 1)).max() < 1e-12


def test_conjugation_tracks_product(golden_cf, T):
    M = fourier.resonant_set(golden_cf[1], 1.0, 5, 1, 200)
    assert skew.conjugation_check(T, M, skew.TorusPoint(0.3, 0.6), 20_000) < 1e-9


def test_orbit_thread_invariant(T):
    p0 = skew.TorusPoint(0.4, 0.1)
    with _numeric.threads(1):
        a = skew.orbit(T, p0, 200_000)
    with _numeric.threads(8):
        b = skew.orbit(T, p0, 200_000)
    assert np.array_equal(a.y_unreduced, b.y_unreduced) and np.array_equal(a.x, b.x)
