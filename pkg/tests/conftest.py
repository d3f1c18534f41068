import warnings

import pytest
from hypothesis import settings

from mobskew import arith, cfrac, fourier, skew

# numba compiles on first call, which would trip per-example deadlines
settings.register_profile("mobskew", deadline=None)
settings.load_profile("mobskew")


@pytest.fixture(scope="session")
def mu():
    return arith.mobius_sieve(2 * 10**6 + 2000)


@pytest.fixture(scope="session")
def liouville():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return cfrac.construct_liouville(1.0, 10)


@pytest.fixture(scope="session")
def golden_cf():
    g = cfrac.golden()
    return g, cfrac.expand_cf(g, 40)


@pytest.fixture(scope="session")
def furstenberg(liouville):
    spec, cf = liouville
    h = fourier.furstenberg_like(cf, 1.0, 200)
    return spec, cf, h, skew.SkewProduct(spec, h)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    from test_acceptance import LINES

    lines = config.stash.get(LINES, None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
