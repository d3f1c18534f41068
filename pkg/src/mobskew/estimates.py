"""Numerical witnesses for the quantitative estimates on resonant convergents.

Implied constants are never guessed: the deviation constant is calibrated at the
first resonant index and then held fixed while k grows.  Every report carries
the raw numbers so the calibration can be redone by hand.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import _numeric
from .cfrac import ContinuedFraction, exceeds_exp
from .errors import BudgetExceeded, NonResonantIndex, OutOfDomain, SupportViolation
from .fourier import AnalyticCircleFunction, resonant_set
from .skew import SkewProduct, cocycle_fourier

A_CAP = 10**7


@dataclass
class DeviationReport:
    k: int
    q_k: int
    sup_deviation: float
    bound: float
    C: float
    grid_size: int
    passed: bool

    def to_json(self) -> str:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        d["q_k"] = str(self.q_k)
        return json.dumps(d)

    @classmethod
    def from_json(cls, line: str) -> "DeviationReport":
        d = json.loads(line)
        d["passed"] = d.pop("pass")
        d["q_k"] = int(d["q_k"])
        return cls(**d)


@dataclass(frozen=True)
class EstimateConfig:
    tau: float
    eta: float | None = None
    S: int = 1
    delta: float = 0.1
    grid_factor: int = 16
    A: int | None = None
    p2: int | None = None

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.eta is None:
            eta = self.tau / 8
            if self.p2 is not None:
                eta = min(eta, self.tau / (8 * self.p2) * 0.999)
            object.__setattr__(self, "eta", eta)
        if not 0 < self.eta < self.tau / 4:
            raise ValueError("eta must lie in (0, tau/4)")
        if self.S < 1 or self.delta <= 0 or self.grid_factor < 1:
            raise ValueError("S >= 1, delta > 0 and grid_factor >= 1 are required")

    def a_limit(self, q_k: int) -> int:
        """min(floor(e^{eta q_k}), configured A, A_CAP)."""
        x = self.eta * q_k
        lim = A_CAP if x > math.log(A_CAP) else int(math.floor(math.exp(x)))
        if self.A is not None:
            lim = min(lim, self.A)
        return max(lim, 0)


def _require_resonant(cf: ContinuedFraction, k: int, tau: float) -> None:
    if not 1 <= k < cf.K:
        raise OutOfDomain(f"k = {k} needs q_(k+1); expansion has K = {cf.K}")
    if not exceeds_exp(cf.q[k + 1], tau, cf.q[k]):
        raise NonResonantIndex(f"q_{k + 1} = {cf.q[k + 1]} does not exceed exp(tau q_{k} / 2)")


def sup_centered_cocycle(T: SkewProduct, n: int, grid: int) -> float:
    """sup over a uniform grid of |H(n, x) - n hhat(0)|."""
    x = np.arange(grid) / grid
    vals = cocycle_fourier(T, n, x, centered=True)
    return float(np.max(np.abs(vals)))


def cocycle_deviation(
    h: AnalyticCircleFunction,
    cf: ContinuedFraction,
    k: int,
    tau: float | None = None,
    grid: int | None = None,
    C: float | None = None,
    b1: int = 1,
    b2: int = 1,
) -> DeviationReport:
    """sup_x |H(q_k, x) - q_k hhat(0)| against C e^{-tau q_k / 4}.

    With C omitted the report calibrates C from this index (bound = deviation).
    """
    tau = h.tau if tau is None else tau
    _require_resonant(cf, k, tau)
    M = resonant_set(cf, tau, b1, b2, h.M_max)
    off = [int(m) for m in h.support() if m != 0 and m not in M]
    if off:
        raise SupportViolation(f"hhat has mass off M_(b1,b2) at m = {off[:5]}")
    grid = grid or 16 * h.M_max
    q = cf.q[k]
    dev = sup_centered_cocycle(SkewProduct(cf, h), q, grid)
    scale = math.exp(-tau * q / 4)
    if C is None:
        C = dev / scale if scale > 0 else math.inf
    bound = C * scale
    return DeviationReport(k, q, dev, bound, C, grid, dev <= bound)


def deviation_series(h: AnalyticCircleFunction, cf: ContinuedFraction, ks, tau: float | None = None, grid=None, b1=1, b2=1):
    """Calibrate at ks[0] and check the remaining indices against that constant."""
    first = cocycle_deviation(h, cf, ks[0], tau, grid, None, b1, b2)
    out = [first]
    for k in ks[1:]:
        out.append(cocycle_deviation(h, cf, k, tau, grid, first.C, b1, b2))
    return out


# --------------------------------------------------------------------------
# rotation-number resonance


@dataclass
class ResonanceReport:
    k: int
    q_k: int
    A: int
    max_norm: float
    argmax_a: int
    norm_one: float  # ||S q_k hhat(0)||
    below_delta: bool
    triangle_ok: bool


def _to_exact(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v)
    import mpmath

    with mpmath.workprec(256):
        m, e = mpmath.frexp(mpmath.mpf(v))
        return Fraction(int(m * 2**256)) * Fraction(2) ** (int(e) - 256)


def rotation_resonance(hhat0, cfg: EstimateConfig, cf: ContinuedFraction, k: int, A: int | None = None, strict: bool = True) -> ResonanceReport:
    """max over 1 <= a <= A of ||a S q_k hhat(0)||.

    theta = S q_k hhat(0) mod 1 is formed exactly (hhat(0) as an exact rational
    or 256-bit value) and reduced to a 128-bit phase, so every a theta is exact
    before the last rounding.  ``strict`` enforces resonance of k and
    A <= e^{eta q_k}; diagnostics on non-resonant data pass strict=False.
    """
    q = cf.q[k]
    if strict:
        _require_resonant(cf, k, cfg.tau)
        limit = cfg.a_limit(q)
        A = limit if A is None else A
        if A > limit:
            raise OutOfDomain(f"A = {A} exceeds e^(eta q_k) = {limit}")
    elif A is None:
        A = cfg.a_limit(q)
    if A < 1:
        raise OutOfDomain("empty range of a")
    if A > A_CAP:
        raise BudgetExceeded(f"A = {A} exceeds the cap {A_CAP}")
    theta = _to_exact(hhat0) * cfg.S * q
    tf = (theta.numerator * _numeric.ONE // theta.denominator) % _numeric.ONE
    one = _numeric.circle_norm_fixed(tf)
    best, arg, triangle = 0.0, 1, True
    for start in range(1, A + 1, 1 << 20):
        a = np.arange(start, min(A, start + (1 << 20) - 1) + 1, dtype=np.int64)
        norms = _numeric.circle_norm(_numeric.frac_points(tf, a))
        # ||a theta|| <= a ||theta|| holds literally; allow the final rounding
        triangle &= bool(np.all(norms <= a * one * (1 + 1e-12) + 2.0**-52))
        i = int(np.argmax(norms))
        if norms[i] > best:
            best, arg = float(norms[i]), int(a[i])
    return ResonanceReport(k, q, A, best, arg, one, best < cfg.delta, triangle)


# --------------------------------------------------------------------------
# almost periodicity of the orbit


@dataclass
class AlmostPeriodReport:
    k: int
    a: int
    shift: int  # a S q_k
    x_part: float
    y_part: float
    total: float
    chain_lhs: float
    chain_rhs: float
    chain_ok: bool
    below_delta: bool


def almost_period_deviation(T: SkewProduct, cfg: EstimateConfig, cf: ContinuedFraction, k: int, a: int, points, strict: bool = True) -> AlmostPeriodReport:
    """max over sample points of d(T^{a S q_k}(x, y), (x, y)), split into its x- and y-parts.

    The y-part ||H(a S q_k, x)|| is checked against the telescoped bound
    sum_{l < aS} |H(q_k, x + l q_k alpha) - q_k hhat(0)| + ||a S q_k hhat(0)||.
    """
    q = cf.q[k]
    xs = np.atleast_1d(np.asarray(points, dtype=np.float64))
    if a == 0:
        return AlmostPeriodReport(k, 0, 0, 0.0, 0.0, 0.0, 0.0, 0.0, True, True)
    if strict:
        _require_resonant(cf, k, cfg.tau)
        if a > cfg.a_limit(q):
            raise OutOfDomain(f"a = {a} exceeds e^(eta q_k)")
    n = a * cfg.S * q
    reps = a * cfg.S
    if reps * xs.size > A_CAP:
        raise BudgetExceeded("a S times the number of sample points exceeds the budget")
    af = T.alpha_fixed
    x_part = _numeric.circle_norm_fixed(n * af)
    mean_shift = _to_exact(T.h.mean) * n
    mean_fixed = (mean_shift.numerator * _numeric.ONE // mean_shift.denominator) % _numeric.ONE
    osc = cocycle_fourier(T, n, xs, centered=True)
    # ||H|| = ||osc + n hhat(0)|| with the mean part reduced exactly
    y_vals = _numeric.circle_norm(osc + _numeric.centered_float(mean_fixed))
    y_part = float(np.max(y_vals))
    rhs = np.empty_like(xs)
    ls = np.arange(reps, dtype=np.int64) * q
    for i, x in enumerate(xs):
        pts = _numeric.frac_points(af, ls, _numeric.to_fixed(float(x)))
        rhs[i] = _numeric.compensated_sum(np.abs(cocycle_fourier(T, q, pts, centered=True)))
    rhs += _numeric.circle_norm_fixed(mean_fixed)
    chain_ok = bool(np.all(y_vals <= rhs + 1e-12))
    i = int(np.argmax(y_vals))
    total = max(x_part, y_part)
    return AlmostPeriodReport(k, a, n, x_part, y_part, total, float(y_vals[i]), float(rhs[i]), chain_ok, total < cfg.delta)


# --------------------------------------------------------------------------


def mrt_bound(M_value: float, X: int, l: int) -> float:
    """e^{-M} M + (log X)^{-1/50} + (log log l / log l)^2, without the absolute constant."""
    if l < 10 or X < l:
        raise ValueError("requires X >= l >= 10")
    if M_value < 0:
        raise ValueError("M must be nonnegative")
    ll = math.log(math.log(l)) / math.log(l)
    return math.exp(-M_value) * M_value + math.log(X) ** (-1 / 50) + ll * ll
