import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mobskew import cfrac, fourier
from mobskew.errors import InvariantError, NearResonance


def test_from_dict_fills_conjugates():
    h = fourier.AnalyticCircleFunction.from_dict({1: 0.5j, 3: 0.1}, tau=1.0)
    assert h[-1] == np.conj(h[1]) and h[-3] == 0.1
    assert abs(h(0.25) - (2 * (0.5j * 1j).real + 2 * 0.1 * math.cos(1.5 * math.pi))) < 1e-15


def test_non_real_table_rejected():
    c = np.zeros(5, dtype=complex)
    c[3] = 1.0
    with pytest.raises(InvariantError):
        fourier.AnalyticCircleFunction(c, 1.0)


def test_certificate_is_enforced():
    c = np.zeros(5, dtype=complex)
    c[0] = c[4] = 1.0
    with pytest.raises(InvariantError):
        fourier.AnalyticCircleFunction(c, 1.0, C=1.0)


@settings(max_examples=25)
@given(st.integers(0, 2**16))
def test_evaluate_matches_reference(seed):
    h = fourier.random_analytic(60, 0.7, seed)
    x = np.random.default_rng(seed).random(5)
    fast = h(x)
    for xi, v in zip(x, fast):
        assert abs(v - fourier.evaluate_reference(h, float(xi))) < 1e-13


def test_truncation_bound_covers_tail():
    full = fourier.random_analytic(200, 1.0, 3)
    cut = full.restrict(np.abs(np.arange(-200, 201)) <= 20)
    x = np.linspace(0, 1, 999)
    tail = float(np.abs(full(x) - cut(x)).max())
    assert tail <= 2 * full.C * math.exp(-21) / (1 - math.exp(-1))


def test_csv_and_json_roundtrip():
    h = fourier.random_analytic(10, 1.0, 1)
    assert np.array_equal(fourier.AnalyticCircleFunction.from_csv(h.to_csv(), 1.0).coef, h.coef)
    assert np.array_equal(fourier.AnalyticCircleFunction.from_json(h.to_json()).coef, h.coef)


def test_resonant_set_liouville(liouville):
    _, cf = liouville
    M = fourier.resonant_set(cf, 1.0, 1, 1, 200)
    assert M.indices == (1, 2, 3)
    assert {2, 4, 6, 7, 14, 42, 44, 176} <= set(M.members)
    assert 3 not in M and 45 not in M


def test_resonant_set_needs_long_expansion(golden_cf):
    g = cfrac.golden()
    short = cfrac.expand_cf(g, 5)
    with pytest.raises(ValueError):
        fourier.resonant_set(short, 1.0, 1, 1, 200)


def test_split_is_a_partition(liouville):
    _, cf = liouville
    h = fourier.random_analytic(200, 1.0, 4)
    h1, h2 = fourier.split_resonant(h, fourier.resonant_set(cf, 1.0, 1, 1, 200))
    assert np.array_equal(h1.coef + h2.coef, h.coef)
    assert not np.any((h1.coef != 0) & (h2.coef != 0))


@pytest.mark.parametrize("which", ["golden", "liouville"])
def test_coboundary_solves_cohomological_equation(which, golden_cf, liouville):
    spec, cf = golden_cf if which == "golden" else liouville
    h = fourier.random_analytic(200, 1.0, 7)
    _, h2 = fourier.split_resonant(h, fourier.resonant_set(cf, 1.0, 1, 1, 200))
    phi = fourier.coboundary_phi(h2, spec)
    assert fourier.coboundary_residual(phi, h2, spec) < 1e-10


def test_near_resonance_raises(liouville):
    spec, cf = liouville
    h = fourier.AnalyticCircleFunction.from_dict({44: 1e-19}, tau=1.0)
    with pytest.raises(NearResonance):
        fourier.coboundary_phi(h, spec, floor=1e-3)


def test_gap_bound_for_nonresonant_frequencies(liouville, golden_cf):
    assert fourier.nonresonant_gap_witness(liouville[1], 200) == []
    assert fourier.nonresonant_gap_witness(golden_cf[1], 200) == []


def test_furstenberg_support(liouville):
    _, cf = liouville
    h = fourier.furstenberg_like(cf, 1.0)
    assert sorted(int(m) for m in h.support()) == [-44, -7, -2, 2, 7, 44]
    assert h.mean == 0
