"""Compute regression values by independent routes and write src/mobskew/_frozen.py.

Each value is produced by an oracle that shares no summation path with the
library (mpmath, closed-form Fourier orbits, per-window or per-L loops), then
the library is checked against it before the file is written.

    python3 tools/freeze_oracles.py
"""

from __future__ import annotations

import math
import sys
import warnings
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from mobskew import arith, cfrac, correlate, estimates, fourier, skew

OUT = Path(__file__).resolve().parents[1] / "src" / "mobskew" / "_frozen.py"
ONE = 1 << 128


def liouville_system():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        spec, lv = cfrac.construct_liouville(1.0, 10)
    h = fourier.furstenberg_like(lv, 1.0, 200)
    return spec, lv, h, skew.SkewProduct(spec, h)


def closed_form_y(T, x0, y0, N):
    """y_n for n < N from H(n, x0) = n hhat(0) + sum_m hhat(m) e(m x0) (e(m n alpha) - 1) / (e(m alpha) - 1)."""
    af = T.alpha_fixed
    theta = (np.arange(N, dtype=object) * af) % ONE
    frac = np.array([int(t) >> 64 for t in theta], dtype=np.float64) / 2.0**64
    y = np.full(N, y0, dtype=np.float64) + np.arange(N) * float(T.h.mean)
    alpha = af / ONE
    for m in T.h.support():
        m = int(m)
        if m == 0:
            continue
        c = complex(T.h[m]) * complex(mpmath.expjpi(2 * m * x0))
        den = complex(mpmath.expjpi(2 * m * alpha)) - 1
        y += (c * (np.exp(2j * np.pi * m * frac) - 1) / den).real
    return y


def orbit_average_oracle(mu, Ns):
    _, _, _, T = liouville_system()
    N = max(Ns)
    y = closed_form_y(T, 0.0, 0.0, N + 1)
    z = mu.values[: N + 1] * np.exp(2j * np.pi * y)
    out = {}
    for n in Ns:
        out[n] = complex(math.fsum(z[1 : n + 1].real), math.fsum(z[1 : n + 1].imag)) / n
    return out


def davenport_oracle(mu, N):
    with mpmath.workdps(40):
        alpha = (mpmath.sqrt(5) - 1) / 2
        s = mpmath.mpc(0)
        for n in range(1, N + 1):
            m = int(mu.values[n])
            if m:
                s += m * mpmath.expjpi(2 * n * alpha)
        return complex(s / N)


def short_oracle(mu, X, l):
    v = mu.values[X : 2 * X + l - 1].astype(np.int64)
    w = sliding_window_view(v, l).sum(axis=1)
    return Fraction(int((w * w).sum()), X * l * l)


def m_oracle(mu, t):
    chi = arith.find_character(4, at3=-1)
    primes = arith.primes_up_to(10**5)
    terms = []
    for p in primes:
        p = int(p)
        nu = int(mu.values[p]) * complex(chi(p))
        terms.append((1 - (nu * complex(mpmath.expj(-t * math.log(p)))).real) / p)
    return math.fsum(terms)


def almost_period_oracle():
    _, lv, h, T = liouville_system()
    xs = np.linspace(0, 1, 64, endpoint=False)
    n = lv.q[1]  # a = S = 1
    Hs = [skew.cocycle_direct(T, n, float(x)) for x in xs]
    y_part = max(abs(H - round(H)) for H in Hs)
    a = Fraction(lv.p[-1], lv.q[-1]) * n
    x_part = float(abs(a - round(a)))
    return max(x_part, y_part)


BLOCK = dict(N=20_000, N0=200, k=3, A=20)


def block_oracle(mu):
    _, lv, h, T = liouville_system()
    N, N0, A = BLOCK["N"], BLOCK["N0"], BLOCK["A"]
    P = lv.q[BLOCK["k"]]
    W = A * P
    y = closed_form_y(T, 0.0, 0.0, N + W)
    fv = np.exp(2j * np.pi * y)
    muv = mu.values[: N + W].astype(np.float64)
    lhs = complex(math.fsum((muv[:N] * fv[:N]).real), math.fsum((muv[:N] * fv[:N]).imag)) / N
    re, im = [], []
    for L in range(N0, N):
        ls = np.arange(L, L + P)
        F = np.empty(P, dtype=np.complex128)
        F[ls % P] = fv[ls]
        n = np.arange(L, L + W)
        s = muv[n] * F[n % P]
        re.append(math.fsum(s.real))
        im.append(math.fsum(s.imag))
    periodic = complex(math.fsum(re), math.fsum(im)) / (W * (N - N0))
    return lhs, periodic


def main():
    mu = arith.mobius_sieve(2 * 10**6 + 1000)
    vals: dict[str, object] = {}
    problems = []

    def check(name, lib, oracle, tol):
        gap = abs(complex(lib) - complex(oracle)) if not isinstance(oracle, Fraction) else (0 if lib == oracle else 1)
        print(f"{name:<22} oracle={oracle!s:<45} library gap={gap:.2e}")
        if gap > tol:
            problems.append(name)

    orb = orbit_average_oracle(mu, [10**4, 10**6])
    _, _, _, T = liouville_system()
    lib = correlate.mobius_orbit_average(T, skew.Observable(0, 1), skew.TorusPoint(0, 0), [10**4, 10**6], mu)
    for n, key in ((10**4, "ORBIT_AVG_1E4"), (10**6, "ORBIT_AVG_1E6")):
        check(key, lib.value(n), orb[n], 1e-9)
        vals[key] = orb[n]

    dav = davenport_oracle(mu, 10**5)
    check("DAVENPORT_GOLDEN_1E5", correlate.davenport_sum(cfrac.golden(), 10**5, mu), dav, 1e-12)
    vals["DAVENPORT_GOLDEN_1E5"] = dav

    for l, key in ((1000, "SHORT_MU_1E6_L1000"), (10, "SHORT_MU_1E6_L10")):
        o = short_oracle(mu, 10**6, l)
        check(key, correlate.short_interval_lhs(mu, 10**6, l)[1], o, 0)
        vals[key] = o

    chi = arith.find_character(4, at3=-1)
    nu = arith.mobius_function(mu) * arith.character_function(chi)
    r = arith.nonpretentious_search(nu, 10**5, arith.PretentiousConfig(10**5))
    o = m_oracle(mu, float(r.t))
    check("M_MU_CHI4_1E5", r.value, o, 1e-10)
    vals["M_MU_CHI4_1E5"] = o
    vals["M_MU_CHI4_1E5_T"] = float(r.t)

    o = almost_period_oracle()
    _, lv, h, T = liouville_system()
    ap = estimates.almost_period_deviation(T, estimates.EstimateConfig(1.0), lv, 1, 1, np.linspace(0, 1, 64, endpoint=False))
    check("ALMOST_PERIOD_K1", ap.total, o, 1e-10)
    vals["ALMOST_PERIOD_K1"] = o

    lhs, periodic = block_oracle(mu)
    rep = correlate.block_decompose(
        T, skew.Observable(0, 1), skew.TorusPoint(0, 0), mu, BLOCK["N"], BLOCK["N0"], lv.q[BLOCK["k"]], BLOCK["A"]
    )
    check("BLOCK_LHS", rep.lhs, lhs, 1e-10)
    check("BLOCK_PERIODIC", rep.periodic, periodic, 1e-10)
    vals["BLOCK_LHS"], vals["BLOCK_PERIODIC"] = lhs, periodic

    if problems:
        print("library disagrees with oracle:", ", ".join(problems))
        return 1
    lines = ['"""Regression values computed by independent oracles (tools/freeze_oracles.py). Do not edit."""', ""]
    lines.append("from fractions import Fraction")
    lines.append("")
    for k, v in vals.items():
        if isinstance(v, Fraction):
            lines.append(f"{k} = Fraction({v.numerator}, {v.denominator})")
        else:
            lines.append(f"{k} = {v!r}")
    lines.append(f"BLOCK_PARAMS = {BLOCK!r}")
    OUT.write_text("\n".join(lines) + "\n")
    print("wrote", OUT)
    return 0


if __name__ == "__main__":
    sys.exit(main())
