import json
from fractions import Fraction

import numpy as np
import pytest

from mobskew import _frozen, cfrac, estimates, fourier, skew
from mobskew.errors import NonResonantIndex, OutOfDomain, SupportViolation


def test_deviation_decays_along_resonant_indices(furstenberg):
    _, cf, h, _ = furstenberg
    reps = estimates.deviation_series(h, cf, [1, 2, 3])
    assert abs(reps[0].C - 0.817863709174554) < 1e-12
    assert all(r.passed for r in reps)
    assert reps[2].sup_deviation < 1e-8


def test_deviation_report_json(furstenberg):
    _, cf, h, _ = furstenberg
    r = estimates.cocycle_deviation(h, cf, 2)
    d = json.loads(r.to_json())
    assert set(d) == {"k", "q_k", "sup_deviation", "bound", "C", "grid_size", "pass"}
    assert estimates.DeviationReport.from_json(r.to_json()) == r


def test_off_support_mass_rejected(liouville):
    _, cf = liouville
    h = fourier.random_analytic(200, 1.0, 0)
    with pytest.raises(SupportViolation):
        estimates.cocycle_deviation(h, cf, 1)


def test_nonresonant_index_rejected(golden_cf):
    g, cf = golden_cf
    h = fourier.AnalyticCircleFunction.zero()
    with pytest.raises(NonResonantIndex):
        estimates.cocycle_deviation(h, cf, 6)


def test_config_domain():
    assert estimates.EstimateConfig(1.0).eta == 1 / 8
    assert estimates.EstimateConfig(1.0, p2=3).eta < 1 / 24
    with pytest.raises(ValueError):
        estimates.EstimateConfig(1.0, eta=0.3)


def test_rotation_resonance_golden_example(golden_cf):
    _, cf = golden_cf
    r = estimates.rotation_resonance(cf.convergent(cf.K), estimates.EstimateConfig(1.0), cf, 4, A=3, strict=False)
    assert abs(r.max_norm - 0.2705098312) < 1e-9
    assert r.argmax_a == 3 and r.triangle_ok


def test_rotation_resonance_enforces_a_limit(liouville):
    _, cf = liouville
    with pytest.raises(OutOfDomain):
        estimates.rotation_resonance(Fraction(1, 3), estimates.EstimateConfig(1.0), cf, 1, A=10)


def test_almost_period_regression_and_chain(furstenberg):
    _, cf, _, T = furstenberg
    pts = np.linspace(0, 1, 64, endpoint=False)
    r1 = estimates.almost_period_deviation(T, estimates.EstimateConfig(1.0), cf, 1, 1, pts)
    r3 = estimates.almost_period_deviation(T, estimates.EstimateConfig(1.0), cf, 3, 1, pts)
    assert abs(r1.total - _frozen.ALMOST_PERIOD_K1) < 1e-10
    assert not r1.below_delta  # the first resonant index is too coarse
    assert r3.below_delta and r3.chain_ok


def test_mrt_bound_value():
    assert abs(estimates.mrt_bound(0, 10, 10) - 1.114657907925558) < 1e-15
    with pytest.raises(ValueError):
        estimates.mrt_bound(0, 5, 10)
