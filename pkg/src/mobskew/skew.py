"""Skew products T(x, y) = (x + alpha, y + h(x)) on the 2-torus.

x_n is always formed as frac(x0 + n alpha) from the 128-bit phase of alpha, so it
carries no accumulated error.  y_n = y0 + H(n, x0) is accumulated with a Neumaier
running sum in the unreduced reals and only reduced mod 1 on output.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import _numeric
from .cfrac import ContinuedFraction, IrrationalSpec
from .errors import BudgetExceeded
from .fourier import AnalyticCircleFunction, ResonantSet, coboundary_phi, small_divisors, split_resonant

ORBIT_CHUNK = 1 << 16
ORBIT_BUDGET = 1 << 31


@dataclass(frozen=True)
class TorusPoint:
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x) % 1.0)
        object.__setattr__(self, "y", float(self.y) % 1.0)


@dataclass(frozen=True)
class Observable:
    """f(x, y) = e(xi1 x + xi2 y)."""

    xi1: int
    xi2: int

    def __post_init__(self):
        if int(self.xi1) != self.xi1 or int(self.xi2) != self.xi2:
            raise ValueError("frequencies must be integers")


def observe(f: Observable, x, y=None):
    """f at a TorusPoint, or at coordinate arrays ``x``, ``y``."""
    if isinstance(x, TorusPoint):
        x, y = x.x, x.y
    theta = (f.xi1 * np.asarray(x, dtype=np.float64)) % 1.0 + (f.xi2 * np.asarray(y, dtype=np.float64)) % 1.0
    theta = theta % 1.0
    out = np.cos(2 * np.pi * theta) + 1j * np.sin(2 * np.pi * theta)
    # exact values at quarter turns (y = 1/4 gives exactly i)
    q = theta * 4
    exact = q == np.round(q)
    if np.any(exact):
        table = np.array([1, 1j, -1, -1j])
        out = np.where(exact, table[np.round(q).astype(np.int64) % 4], out)
    return complex(out) if np.ndim(out) == 0 else out


def torus_distance(x1, y1, x2, y2):
    """max(||x1 - x2||, ||y1 - y2||)."""
    return np.maximum(_numeric.circle_norm(np.asarray(x1) - x2), _numeric.circle_norm(np.asarray(y1) - y2))


@dataclass(frozen=True, eq=False)
class SkewProduct:
    alpha: IrrationalSpec | ContinuedFraction
    h: AnalyticCircleFunction

    @property
    def alpha_fixed(self) -> int:
        a = self.alpha
        return a.fixed() if isinstance(a, IrrationalSpec) else a.alpha_fixed()

    @property
    def alpha_float(self) -> float:
        return _numeric.fixed_to_float(self.alpha_fixed)

    def x_points(self, n, x0: float = 0.0) -> np.ndarray:
        """frac(x0 + n alpha) for an index array."""
        return _numeric.frac_points(self.alpha_fixed, n, _numeric.to_fixed(float(x0)))

    def with_h(self, h: AnalyticCircleFunction) -> "SkewProduct":
        return SkewProduct(self.alpha, h)


# --------------------------------------------------------------------------
# orbits


@dataclass(frozen=True)
class OrbitChunk:
    n: np.ndarray
    x: np.ndarray
    y_unreduced: np.ndarray

    @property
    def y(self) -> np.ndarray:
        return self.y_unreduced % 1.0


def iter_orbit(T: SkewProduct, p0: TorusPoint, N: int, chunk: int = ORBIT_CHUNK) -> Iterator[OrbitChunk]:
    """T^n(p0) for n = 0..N-1 in ascending chunks.

    h is evaluated chunk by chunk (parallel inside), and the running y-sum is
    carried sequentially, so every thread count gives the same bits.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if N > ORBIT_BUDGET:
        raise BudgetExceeded(f"orbit length {N} exceeds {ORBIT_BUDGET}")
    a, x0f = T.alpha_fixed, _numeric.to_fixed(p0.x)
    acc = _numeric.CompensatedAccumulator(p0.y)
    y_prev = p0.y
    for start in range(0, N, chunk):
        n = np.arange(start, min(N, start + chunk), dtype=np.int64)
        x = _numeric.frac_points(a, n, x0f)
        hv = T.h(x)
        run = acc.prefix(hv)
        # y_n = y0 + sum_{l<n} h(x_l): shift the running totals by one
        y = np.empty_like(run)
        y[0] = y_prev
        y[1:] = run[:-1]
        y_prev = run[-1]
        yield OrbitChunk(n, x, y)


def orbit(T: SkewProduct, p0: TorusPoint, N: int) -> OrbitChunk:
    parts = list(iter_orbit(T, p0, N))
    return OrbitChunk(
        np.concatenate([c.n for c in parts]),
        np.concatenate([c.x for c in parts]),
        np.concatenate([c.y_unreduced for c in parts]),
    )


def orbit_csv(T: SkewProduct, p0: TorusPoint, N: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "x", "y"])
    for c in iter_orbit(T, p0, N):
        for n, x, y in zip(c.n, c.x, c.y):
            w.writerow([int(n), repr(float(x)), repr(float(y))])
    return buf.getvalue()


# --------------------------------------------------------------------------
# the cocycle H(n, x)


def h_along_orbit(T: SkewProduct, n: int, x: float) -> np.ndarray:
    """h(x + l alpha) for l = 0..n-1."""
    if n > ORBIT_BUDGET:
        raise BudgetExceeded(f"orbit length {n} exceeds {ORBIT_BUDGET}")
    return T.h(_numeric.frac_points(T.alpha_fixed, np.arange(n, dtype=np.int64), _numeric.to_fixed(float(x))))


def cocycle_direct(T: SkewProduct, n: int, x) -> float | np.ndarray:
    """H(n, x) = sum_{l<n} h(x + l alpha), Neumaier-summed, not reduced mod 1."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if np.ndim(x) > 0:
        return np.array([cocycle_direct(T, n, xi) for xi in np.asarray(x)])
    if n == 0:
        return 0.0
    return _numeric.compensated_sum(h_along_orbit(T, n, x))


def geometric_factors(T: SkewProduct, n: int, ms: np.ndarray, floor: float = 1e-30) -> np.ndarray:
    """(e(n m alpha) - 1) / (e(m alpha) - 1), both phases taken from exact integer products."""
    a = T.alpha_fixed
    den = small_divisors(ms, a, floor)
    num = np.array([complex(_numeric.expm1_phase(_numeric.centered_float(n * int(m) * a))) for m in ms])
    return num / den


def cocycle_fourier(T: SkewProduct, n: int, x, floor: float = 1e-30, centered: bool = False):
    """n hhat(0) + sum_{m != 0} hhat(m) (e(n m alpha) - 1)/(e(m alpha) - 1) e(m x).

    Cost is O(M_max) per point, independent of n.  With ``centered`` the term
    n hhat(0) is dropped, giving H(n, x) - n hhat(0) without cancellation.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    ms, cs = T.h.positive_part()
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if n == 0:
        out = np.zeros_like(xs)
    else:
        g = cs * geometric_factors(T, n, ms, floor) if ms.size else cs
        c0 = 0.0 if centered else n * T.h.mean
        out = _numeric.eval_real_trig(xs, c0, ms, g, T.h.M_max)
    return float(out[0]) if scalar else out


def cocycle_compose_check(T: SkewProduct, n1: int, n2: int, x: float) -> float:
    """|H(n1 n2, x) - sum_{l<n1} H(n2, x + l n2 alpha)| with both sides summed directly."""
    if n1 < 1 or n2 < 1:
        raise ValueError("n1, n2 must be >= 1")
    lhs = cocycle_direct(T, n1 * n2, x)
    a = T.alpha_fixed
    xs = _numeric.frac_points(a, np.arange(n1, dtype=np.int64) * n2, _numeric.to_fixed(float(x)))
    if n1 == 1:
        return abs(lhs - cocycle_direct(T, n2, x))
    parts = np.array([cocycle_direct(T, n2, xi) for xi in xs])
    return abs(lhs - _numeric.compensated_sum(parts))


def compose_sweep(T: SkewProduct, n_max: int, x: float) -> tuple[float, tuple[int, int]]:
    """Largest composition residual over all n1 n2 <= n_max, and where it occurs.

    The terms h(x + j alpha) for j < n_max are evaluated once.  For each n2 the
    blocks H(n2, x + l n2 alpha) are segment sums of that array; the right-hand
    sides for all n1 are their running sums, the left-hand sides are running sums
    of the terms themselves.
    """
    hv = h_along_orbit(T, n_max, x)
    lhs = _numeric.CompensatedAccumulator().prefix(hv)  # lhs[j-1] = H(j, x)
    worst, where = 0.0, (1, 1)
    for n2 in range(1, n_max + 1):
        L = n_max // n2
        bounds = np.arange(L + 1, dtype=np.int64) * n2
        blocks = _numeric.segment_sums(hv, bounds)
        rhs = _numeric.CompensatedAccumulator().prefix(blocks)  # rhs[n1-1]
        idx = np.arange(1, L + 1) * n2 - 1
        dev = np.abs(lhs[idx] - rhs)
        i = int(np.argmax(dev))
        if dev[i] > worst:
            worst, where = float(dev[i]), (i + 1, n2)
    return worst, where


# --------------------------------------------------------------------------
# derived two-prime system


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, math.isqrt(p) + 1))


def derived_system(T: SkewProduct, p1: int, p2: int, x0: float, s: int = 1) -> SkewProduct:
    """Fiber map psi(x) = s (H(p1, x0 + p1 x) - H(p2, x0 + p2 x)) as a coefficient table.

    H(p, x0 + p x) = sum_j hhat(j) [sum_{l<p} e(j (x0 + l alpha))] e(j p x), so
    psihat(j p1) collects s hhat(j) sum_{l<p1} e(j (x0 + l alpha)) and likewise for
    p2 with a minus sign.  psihat(0) = s (p1 - p2) hhat(0) is set directly.
    """
    if p1 == p2:
        raise ValueError("p1 and p2 must differ")
    if not (_is_prime(p1) and _is_prime(p2)):
        raise ValueError("p1 and p2 must be prime")
    if s < 1:
        raise ValueError("s must be >= 1")
    h = T.h
    M = h.M_max
    Mt = max(p1, p2) * M
    coef = np.zeros(2 * Mt + 1, dtype=np.complex128)
    a, xf = T.alpha_fixed, _numeric.to_fixed(float(x0))
    one = _numeric.ONE
    for p, sign in ((p1, 1), (p2, -1)):
        for j in h.support():
            j = int(j)
            if j == 0:
                continue
            phases = [(j * (xf + l * a)) % one for l in range(p)]
            ssum = sum(complex(_numeric.e(_numeric.centered_float(ph))) for ph in phases)
            coef[j * p + Mt] += sign * s * h[j] * ssum
    coef[Mt] = s * (p1 - p2) * h.mean
    # enforce the reality pairing exactly
    pos = coef[Mt + 1 :]
    coef[:Mt] = np.conj(pos[::-1])
    return SkewProduct(T.alpha, AnalyticCircleFunction(coef, h.tau / max(p1, p2)))


def psi_direct(T: SkewProduct, p1: int, p2: int, x0: float, x, s: int = 1):
    """s (H(p1, x0 + p1 x) - H(p2, x0 + p2 x)) by direct summation."""
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
    out = np.array([s * (cocycle_direct(T, p1, (x0 + p1 * xi) % 1.0) - cocycle_direct(T, p2, (x0 + p2 * xi) % 1.0)) for xi in xs])
    return float(out[0]) if np.ndim(x) == 0 else out


def derived_orbit_deviations(T: SkewProduct, p1: int, p2: int, x0: float, N: int) -> np.ndarray:
    """d(Ttilde^n(0,0), (n alpha, H(p1 n, x0) - H(p2 n, x0))) for n = 0..N."""
    Tt = derived_system(T, p1, p2, x0, 1)
    orb = orbit(Tt, TorusPoint(0.0, 0.0), N + 1)
    P = max(p1, p2) * N
    hv = h_along_orbit(T, P + 1, x0)
    H = np.concatenate([[0.0], _numeric.CompensatedAccumulator().prefix(hv)])  # H[j] = H(j, x0)
    n = np.arange(N + 1)
    target_y = H[p1 * n] - H[p2 * n]
    target_x = T.x_points(n)
    return torus_distance(orb.x, orb.y_unreduced, target_x, target_y)


def derived_orbit_check(T: SkewProduct, p1: int, p2: int, x0: float, n: int) -> float:
    if n == 0:
        return 0.0
    return float(derived_orbit_deviations(T, p1, p2, x0, n)[n])


# --------------------------------------------------------------------------
# conjugation T = Phi^{-1} T1 Phi with Phi(x, y) = (x, y - phi(x))


def conjugation_deviations(T: SkewProduct, M: ResonantSet, p0: TorusPoint, n: int, floor: float = 1e-30) -> np.ndarray:
    """Torus distance between T^j(p0) and Phi^{-1} T1^j Phi(p0) for j = 0..n."""
    h1, h2 = split_resonant(T.h, M)
    if not h2.support().size:
        return np.zeros(n + 1)
    phi = coboundary_phi(h2, T.alpha_fixed, floor)
    T1 = T.with_h(h1)
    orb = orbit(T, p0, n + 1)
    start = TorusPoint(p0.x, p0.y - phi(p0.x))
    orb1 = orbit(T1, start, n + 1)
    y_back = orb1.y_unreduced + phi(orb1.x)
    return torus_distance(orb.x, orb.y_unreduced, orb1.x, y_back)


def conjugation_check(T: SkewProduct, M: ResonantSet, p0: TorusPoint, n: int, floor: float = 1e-30) -> float:
    """Largest deviation over the first n steps (0 at n = 0)."""
    if n == 0:
        return 0.0
    return float(conjugation_deviations(T, M, p0, n, floor).max())
