"""Analytic circle functions as finite Fourier tables.

h(x) = sum_{|m| <= M} hhat(m) e(m x) with hhat(-m) = conj(hhat(m)), so h is real.
Also here: the resonant frequency set, the split h = h1 + h2 and the explicit
coboundary phi solving phi(x + alpha) - phi(x) = h2(x).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _numeric
from .cfrac import ContinuedFraction, IrrationalSpec, exceeds_exp
from .errors import InvariantError, NearResonance

DEFAULT_M_MAX = 200
REALITY_TOL = 1e-12


def _log_certificate(coef: np.ndarray, tau: float) -> float:
    M = (coef.size - 1) // 2
    mag = np.abs(coef)
    nz = mag > 0
    if not nz.any():
        return -math.inf
    m = np.abs(np.arange(-M, M + 1))[nz]
    return float(np.max(np.log(mag[nz]) + tau * m))


@dataclass(frozen=True, eq=False)
class AnalyticCircleFunction:
    """Coefficients hhat(m), |m| <= M_max, stored densely at index m + M_max.

    ``C`` is a decay certificate, |hhat(m)| <= C e^{-tau |m|}; when omitted it is
    the smallest such constant for the stored table.
    """

    coef: np.ndarray = field(repr=False)
    tau: float
    C: float | None = None

    def __post_init__(self):
        c = np.array(self.coef, dtype=np.complex128)
        if c.ndim != 1 or c.size % 2 == 0:
            raise ValueError("coefficient table must have odd length 2*M_max + 1")
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        c.setflags(write=False)
        object.__setattr__(self, "coef", c)
        logc = _log_certificate(c, self.tau)
        if self.C is None:
            object.__setattr__(self, "C", math.exp(logc) if logc < 700 else math.inf)
        self.validate()

    # ---- construction

    @classmethod
    def from_dict(cls, coeffs: dict, tau: float, M_max: int | None = None, C: float | None = None):
        """Build from {m: hhat(m)}; negative frequencies are filled by conjugation when absent."""
        M = M_max if M_max is not None else max((abs(int(m)) for m in coeffs), default=0)
        table = np.zeros(2 * M + 1, dtype=np.complex128)
        for m, v in coeffs.items():
            m = int(m)
            if abs(m) > M:
                raise ValueError(f"frequency {m} exceeds M_max = {M}")
            table[m + M] = v
            if -m not in coeffs:
                table[-m + M] = np.conj(v)
        return cls(table, tau, C)

    @classmethod
    def constant(cls, c: float, tau: float = 1.0, M_max: int = 0):
        return cls.from_dict({0: c}, tau, M_max)

    @classmethod
    def zero(cls, tau: float = 1.0, M_max: int = 0):
        return cls(np.zeros(2 * M_max + 1), tau)

    # ---- structure

    @property
    def M_max(self) -> int:
        return (self.coef.size - 1) // 2

    def __getitem__(self, m: int) -> complex:
        M = self.M_max
        return complex(self.coef[m + M]) if abs(m) <= M else 0j

    @property
    def mean(self) -> float:
        return float(self.coef[self.M_max].real)

    def support(self) -> np.ndarray:
        """Sorted frequencies with nonzero coefficient."""
        return np.flatnonzero(self.coef) - self.M_max

    def positive_part(self) -> tuple[np.ndarray, np.ndarray]:
        """(m, hhat(m)) for the nonzero coefficients with m > 0."""
        M = self.M_max
        cpos = self.coef[M + 1 :]
        ms = np.flatnonzero(cpos) + 1
        return ms.astype(np.int64), np.ascontiguousarray(cpos[ms - 1])

    def validate(self) -> None:
        c, M = self.coef, self.M_max
        scale = max(1.0, float(np.abs(c).max(initial=0.0)))
        if np.abs(c - np.conj(c[::-1])).max(initial=0.0) > REALITY_TOL * scale:
            raise InvariantError("coefficients violate hhat(-m) = conj(hhat(m))")
        if abs(c[M].imag) > REALITY_TOL * scale:
            raise InvariantError("hhat(0) must be real")
        if self.C is not None and math.isfinite(self.C):
            bound = self.C * np.exp(-self.tau * np.abs(np.arange(-M, M + 1)))
            if np.any(np.abs(c) > bound * (1 + 1e-12) + 1e-300):
                raise InvariantError("decay certificate |hhat(m)| <= C e^{-tau|m|} fails")

    def truncation_bound(self) -> float:
        """Sup-norm bound on the discarded tail sum_{|m| > M_max} of a function with this certificate."""
        t = self.tau
        return 2.0 * self.C * math.exp(-t * (self.M_max + 1)) / (-math.expm1(-t))

    def l1(self) -> float:
        return float(np.abs(self.coef).sum())

    # ---- evaluation

    def __call__(self, x) -> np.ndarray | float:
        return evaluate(self, x)

    def with_coef(self, coef: np.ndarray, tau: float | None = None) -> "AnalyticCircleFunction":
        return AnalyticCircleFunction(coef, self.tau if tau is None else tau, None)

    def restrict(self, mask: np.ndarray) -> "AnalyticCircleFunction":
        """Keep the coefficients where ``mask`` (indexed like ``coef``) is true."""
        return AnalyticCircleFunction(np.where(mask, self.coef, 0), self.tau, self.C)

    # ---- serialization

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "re", "im"])
        M = self.M_max
        for i, v in enumerate(self.coef):
            w.writerow([i - M, repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, tau: float, C: float | None = None):
        rows = list(csv.DictReader(io.StringIO(text)))
        coeffs = {int(r["m"]): complex(float(r["re"]), float(r["im"])) for r in rows}
        return cls.from_dict(coeffs, tau, C=C)

    def to_json(self) -> str:
        M = self.M_max
        return json.dumps(
            {
                "tau": self.tau,
                "M_max": M,
                "C": self.C,
                "coefficients": [[i - M, float(v.real), float(v.imag)] for i, v in enumerate(self.coef) if v != 0],
            }
        )

    @classmethod
    def from_json(cls, text: str):
        d = json.loads(text)
        coeffs = {int(m): complex(re, im) for m, re, im in d["coefficients"]}
        return cls.from_dict(coeffs, d["tau"], d["M_max"], d.get("C"))


def evaluate(h: AnalyticCircleFunction, x) -> np.ndarray | float:
    """h(x) = hhat(0) + 2 Re sum_{m>0} hhat(m) e(m x).

    Reality is part of the type invariant, so the imaginary part of the full sum
    vanishes identically and only the real part is formed.
    """
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
    ms, cs = h.positive_part()
    out = _numeric.eval_real_trig(xs, h.mean, ms, cs, h.M_max)
    return float(out[0]) if scalar else out


def evaluate_reference(h: AnalyticCircleFunction, x: float) -> float:
    """Term-by-term sum over all m in [-M, M], in descending |hhat| order; real part."""
    M = h.M_max
    ms = np.arange(-M, M + 1)
    order = np.argsort(-np.abs(h.coef), kind="stable")
    terms = h.coef[order] * np.exp(2j * np.pi * ((ms[order] * x) % 1.0))
    total = complex(math.fsum(terms.real), math.fsum(terms.imag))
    if abs(total.imag) > 1e-12:
        raise InvariantError(f"imaginary residue {total.imag:.3e} in a real function")
    return total.real


def random_analytic(M_max: int, tau: float, seed: int, C: float = 1.0, mean: float | None = None):
    """hhat(m) = C e^{-tau|m|} r_m e(u_m) with r_m, u_m uniform on [0, 1)."""
    rng = np.random.default_rng(seed)
    m = np.arange(1, M_max + 1)
    r = rng.random(M_max)
    u = rng.random(M_max)
    pos = C * np.exp(-tau * m) * r * np.exp(2j * np.pi * u)
    h0 = C * (rng.random() - 0.5) if mean is None else mean
    coef = np.concatenate([np.conj(pos[::-1]), [h0], pos])
    return AnalyticCircleFunction(coef, tau, C)


# --------------------------------------------------------------------------
# resonant frequencies


@dataclass(frozen=True)
class ResonantSet:
    members: tuple
    b1: int
    b2: int
    tau: float
    M_max: int
    indices: tuple  # resonant k that contributed

    def __contains__(self, m) -> bool:
        return int(m) in set(self.members)

    def __len__(self):
        return len(self.members)

    def mask(self, M_max: int | None = None) -> np.ndarray:
        """Boolean mask over -M..M (coefficient indexing)."""
        M = self.M_max if M_max is None else M_max
        out = np.zeros(2 * M + 1, dtype=bool)
        for m in self.members:
            if abs(m) <= M:
                out[m + M] = True
        return out


def resonant_set(cf: ContinuedFraction, tau: float, b1: int, b2: int, M_max: int) -> ResonantSet:
    """M_{b1,b2} intersected with [-M_max, M_max].

    m belongs when q_k | m and q_k <= |m| < b2 q_{k+1} for some k with q_k >= b1
    and q_{k+1} > exp(tau q_k / 2).  Every k with q_k <= M_max must have a known
    q_{k+1}, so the expansion has to reach past M_max.
    """
    if b1 < 1 or b2 < 1:
        raise ValueError("b1 and b2 must be >= 1")
    if cf.q[-1] <= M_max:
        raise ValueError(f"expansion too short: q_K = {cf.q[-1]} <= M_max = {M_max}")
    members: set[int] = set()
    ks = []
    for k in range(1, cf.K):
        q, q1 = cf.q[k], cf.q[k + 1]
        if q > M_max:
            break
        if q < b1 or not exceeds_exp(q1, tau, q):
            continue
        ks.append(k)
        top = min(M_max, b2 * q1 - 1)
        for m in range(q, top + 1, q):
            members.add(m)
            members.add(-m)
    return ResonantSet(tuple(sorted(members)), b1, b2, tau, M_max, tuple(ks))


def split_resonant(h: AnalyticCircleFunction, M: ResonantSet):
    """(h1, h2): h1 keeps hhat on M and at 0, h2 keeps the rest; h1 + h2 = h coefficientwise."""
    keep = M.mask(h.M_max)
    keep[h.M_max] = True
    h1 = AnalyticCircleFunction(np.where(keep, h.coef, 0), h.tau, h.C)
    h2 = AnalyticCircleFunction(np.where(keep, 0, h.coef), h.tau, h.C)
    return h1, h2


# --------------------------------------------------------------------------
# small divisors and the coboundary


def _alpha_fixed(alpha) -> int:
    if isinstance(alpha, int):
        return alpha % _numeric.ONE
    if isinstance(alpha, (IrrationalSpec, ContinuedFraction)):
        return alpha.fixed() if isinstance(alpha, IrrationalSpec) else alpha.alpha_fixed()
    return _numeric.to_fixed(alpha)


def phase_minus_one(m: int, alpha_fixed: int) -> complex:
    """e(m alpha) - 1 from the exact fixed-point phase (relative accuracy kept for tiny ||m alpha||)."""
    theta = _numeric.centered_float(m * alpha_fixed)
    return complex(_numeric.expm1_phase(theta))


def small_divisors(ms: np.ndarray, alpha_fixed: int, floor: float = 1e-30) -> np.ndarray:
    """e(m alpha) - 1 for each m, raising NearResonance below ``floor``."""
    out = np.empty(len(ms), dtype=np.complex128)
    for i, m in enumerate(ms):
        d = phase_minus_one(int(m), alpha_fixed)
        if abs(d) < floor:
            raise NearResonance(int(m), abs(d), floor)
        out[i] = d
    return out


def coboundary_phi(h2: AnalyticCircleFunction, alpha, floor: float = 1e-30) -> AnalyticCircleFunction:
    """phi with phihat(m) = h2hat(m) / (e(m alpha) - 1), phihat(0) = 0.

    Then phi(x + alpha) - phi(x) = h2(x) as trigonometric polynomials.  The
    divisor uses the 128-bit phase of m*alpha, so NearResonance only fires when
    |e(m alpha) - 1| is genuinely below ``floor``.
    """
    if h2.mean != 0.0:
        raise ValueError("h2 must have zero mean")
    a = _alpha_fixed(alpha)
    ms, cs = h2.positive_part()
    div = small_divisors(ms, a, floor)
    M = h2.M_max
    coef = np.zeros_like(h2.coef)
    phi_pos = cs / div
    coef[M + ms] = phi_pos
    coef[M - ms] = np.conj(phi_pos)
    return AnalyticCircleFunction(coef, h2.tau)


def coboundary_residual(phi: AnalyticCircleFunction, h2: AnalyticCircleFunction, alpha, grid: int = 10_000) -> float:
    """sup over a uniform grid of |phi(x + alpha) - phi(x) - h2(x)|."""
    a = _alpha_fixed(alpha)
    x = np.arange(grid) / grid
    shifted = (x + _numeric.fixed_to_float(a)) % 1.0
    return float(np.max(np.abs(phi(shifted) - phi(x) - h2(x))))


def nonresonant_gap_witness(cf: ContinuedFraction, M_max: int) -> list[tuple[int, Fraction]]:
    """Check ||m alpha|| >= 1/(2|m|) for every q_1 <= m <= M_max with q_k <= m < q_{k+1}, q_k not dividing m.

    Returns the violations (empty when the bound holds).  Uses the exact rational
    interval for alpha, so each comparison is certified.
    """
    lo, hi = cf.alpha_interval(256)
    bad = []
    k = 1
    for m in range(cf.q[1], M_max + 1):
        while k + 1 <= cf.K and cf.q[k + 1] <= m:
            k += 1
        if k + 1 > cf.K:
            raise ValueError("expansion too short for the requested M_max")
        if m % cf.q[k] == 0:
            continue
        a, b = m * lo, m * hi
        z = round((a + b) / 2)
        dist = min(abs(a - z), abs(b - z)) if not (a <= z <= b) else Fraction(0)
        if dist < Fraction(1, 2 * m):
            bad.append((m, dist))
    return bad


# --------------------------------------------------------------------------
# a representative of the resonant class


def furstenberg_like(cf: ContinuedFraction, tau: float, M_max: int = DEFAULT_M_MAX, seed: int | None = None):
    """hhat(+-q_k) = e^{-tau q_k} u_k for every q_k <= M_max (k >= 1), hhat(0) = 0.

    u_k = 1 by default (a cosine series); a seed draws u_k uniformly on the circle.
    """
    rng = np.random.default_rng(seed) if seed is not None else None
    coeffs: dict[int, complex] = {}
    for k in range(1, cf.K + 1):
        q = cf.q[k]
        if q > M_max:
            break
        u = np.exp(2j * np.pi * rng.random()) if rng is not None else 1.0
        coeffs[q] = math.exp(-tau * q) * u
        coeffs[-q] = np.conj(coeffs[q])
    return AnalyticCircleFunction.from_dict(coeffs, tau, M_max, C=1.0)
