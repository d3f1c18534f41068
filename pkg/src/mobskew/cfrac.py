"""Continued fractions of alpha with exact big-integer convergents.

Index convention: alpha = [0; a_1, a_2, ...], (p_{-1}, q_{-1}) = (1, 0),
(p_0, q_0) = (0, 1) and q_{k+1} = a_{k+1} q_k + q_{k-1}.  Some references write
the recurrence with a_k in place of a_{k+1}; every downstream use here only
looks at the q_k sequence and the two-sided bound on ||q_k alpha||, which do
not depend on that choice.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import mpmath

from . import _numeric
from .errors import OutOfDomain, PrecisionExhausted


@dataclass(frozen=True)
class IrrationalSpec:
    """How alpha in (0, 1) is given.

    kind = "surd":      (a + b sqrt(d)) / c with d not a square
    kind = "decimal":   a decimal literal known to within 2**-bits
    kind = "sequence":  explicit partial quotients a_1, a_2, ...; ``terminating``
                        marks a rational number, otherwise the tail is unknown (>= 1)
    """

    kind: str
    surd: tuple = ()
    literal: str = ""
    bits: int = 0
    quotients: tuple = ()
    terminating: bool = False
    label: str = ""

    def __post_init__(self):
        if self.kind == "surd":
            a, b, d, c = self.surd
            if d <= 0 or math.isqrt(d) ** 2 == d:
                raise ValueError("surd needs a positive nonsquare d")
            if b == 0 or c == 0:
                raise ValueError("surd needs b != 0 and c != 0")
        elif self.kind == "decimal":
            if self.bits < 1:
                raise ValueError("decimal literal needs a positive precision in bits")
            Fraction(self.literal)
        elif self.kind == "sequence":
            if not self.quotients or any(int(a) < 1 for a in self.quotients):
                raise ValueError("explicit sequence needs partial quotients a_k >= 1")
        else:
            raise ValueError(f"unknown alpha kind {self.kind!r}")
        lo, hi = self.interval(64)
        if not (0 < lo and hi < 1):
            raise ValueError("alpha must lie in (0, 1)")

    # ---- constructors

    @classmethod
    def from_surd(cls, a: int, b: int, d: int, c: int, label: str = "") -> "IrrationalSpec":
        return cls("surd", surd=(int(a), int(b), int(d), int(c)), label=label)

    @classmethod
    def from_decimal(cls, literal: str, bits: int, label: str = "") -> "IrrationalSpec":
        return cls("decimal", literal=str(literal), bits=int(bits), label=label)

    @classmethod
    def from_quotients(cls, quotients, terminating: bool = False, label: str = "") -> "IrrationalSpec":
        return cls("sequence", quotients=tuple(int(a) for a in quotients), terminating=terminating, label=label)

    # ---- values

    def interval(self, bits: int = 128) -> tuple[Fraction, Fraction]:
        """Rational lo <= alpha <= hi, width about 2**-bits for surds."""
        if self.kind == "surd":
            a, b, d, c = self.surd
            scale = 1 << bits
            r = math.isqrt(b * b * d * scale * scale)  # floor(|b| sqrt(d) 2^bits)
            s = 1 if b > 0 else -1
            lo_num = a * scale + (r if s > 0 else -(r + 1))
            hi_num = a * scale + (r + 1 if s > 0 else -r)
            lo, hi = Fraction(lo_num, c * scale), Fraction(hi_num, c * scale)
            return (lo, hi) if lo <= hi else (hi, lo)
        if self.kind == "decimal":
            v = Fraction(self.literal)
            eps = Fraction(1, 1 << self.bits)
            return v - eps, v + eps
        p, q, pp, qq = _convergent_pair(self.quotients)
        if self.terminating:
            v = Fraction(p, q)
            return v, v
        # tail x in (1, inf): alpha between p/q and (p + p')/(q + q')
        a, b = Fraction(p, q), Fraction(p + pp, q + qq)
        return (a, b) if a <= b else (b, a)

    def working_value(self) -> Fraction | None:
        """Exact rational stand-in used by orbits: p_K/q_K for explicit sequences."""
        if self.kind == "sequence":
            p, q, _, _ = _convergent_pair(self.quotients)
            return Fraction(p, q)
        if self.kind == "decimal":
            return Fraction(self.literal)
        return None

    def fixed(self) -> int:
        """alpha as a 128-bit fixed-point angle."""
        w = self.working_value()
        if w is not None:
            return _numeric.fraction_to_fixed(w.numerator, w.denominator)
        lo, hi = self.interval(_numeric.FRAC_BITS + 8)
        return _numeric.fraction_to_fixed((lo + hi).numerator, 2 * (lo + hi).denominator)

    def __float__(self):
        lo, hi = self.interval(64)
        return float((lo + hi) / 2)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "label": self.label}
        if self.kind == "surd":
            d["surd"] = list(self.surd)
        elif self.kind == "decimal":
            d.update(literal=self.literal, bits=self.bits)
        else:
            d.update(quotients=list(self.quotients), terminating=self.terminating)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "IrrationalSpec":
        kind = d["kind"]
        if kind == "surd":
            return cls.from_surd(*d["surd"], label=d.get("label", ""))
        if kind == "decimal":
            return cls.from_decimal(d["literal"], d["bits"], label=d.get("label", ""))
        return cls.from_quotients(d["quotients"], d.get("terminating", False), label=d.get("label", ""))


def golden() -> IrrationalSpec:
    """(sqrt(5) - 1)/2 = [0; 1, 1, 1, ...]."""
    return IrrationalSpec.from_surd(-1, 1, 5, 2, label="golden")


def pi_minus_3(bits: int = 200) -> IrrationalSpec:
    with mpmath.workprec(bits + 32):
        literal = mpmath.nstr(mpmath.pi - 3, int(bits * 0.30103) + 12, strip_zeros=False)
    return IrrationalSpec.from_decimal(literal, bits, label="pi-3")


def _convergent_pair(quotients):
    p_prev, q_prev, p, q = 1, 0, 0, 1
    for a in quotients:
        p_prev, q_prev, p, q = p, q, a * p + p_prev, a * q + q_prev
    return p, q, p_prev, q_prev


@dataclass(frozen=True, eq=False)
class ContinuedFraction:
    """Partial quotients a_1..a_K and convergents (p_k, q_k), k = 0..K."""

    quotients: tuple
    p: tuple = field(repr=False)
    q: tuple = field(repr=False)
    source: IrrationalSpec | None = field(default=None, repr=False)

    @classmethod
    def from_quotients(cls, quotients, source: IrrationalSpec | None = None) -> "ContinuedFraction":
        ps, qs = [0], [1]
        p_prev, q_prev = 1, 0
        for a in quotients:
            p_new, q_new = a * ps[-1] + p_prev, a * qs[-1] + q_prev
            p_prev, q_prev = ps[-1], qs[-1]
            ps.append(p_new)
            qs.append(q_new)
        return cls(tuple(int(a) for a in quotients), tuple(ps), tuple(qs), source)

    @property
    def K(self) -> int:
        return len(self.quotients)

    def a(self, k: int) -> int:
        """Partial quotient a_k (1-based)."""
        return self.quotients[k - 1]

    def convergent(self, k: int) -> Fraction:
        return Fraction(self.p[k], self.q[k])

    def value(self) -> Fraction:
        return self.convergent(self.K)

    def alpha_fixed(self) -> int:
        if self.source is not None:
            return self.source.fixed()
        return _numeric.fraction_to_fixed(self.p[-1], self.q[-1])

    def alpha_interval(self, bits: int = 128) -> tuple[Fraction, Fraction]:
        if self.source is not None:
            return self.source.interval(bits)
        v = self.value()
        return v, v

    def to_json(self) -> str:
        return json.dumps(
            {
                "quotients": list(self.quotients),
                "convergents": [[str(p), str(q)] for p, q in zip(self.p, self.q)],
            }
        )

    @classmethod
    def from_json(cls, text: str, source: IrrationalSpec | None = None) -> "ContinuedFraction":
        d = json.loads(text)
        cf = cls.from_quotients(d["quotients"], source)
        stored = [(int(p), int(q)) for p, q in d["convergents"]]
        if stored != list(zip(cf.p, cf.q)):
            raise ValueError("stored convergents disagree with the quotients")
        return cf


# --------------------------------------------------------------------------
# expansion


def _floor_surd(P: int, D: int, Q: int) -> int:
    r = math.isqrt(D)
    if Q > 0:
        return (P + r) // Q
    return -((P + r) // -Q) - 1


def _expand_surd(spec: IrrationalSpec, K: int) -> list[int]:
    a, b, d, c = spec.surd
    if b < 0:
        a, b, c = -a, -b, -c
    # x = (P + sqrt(D)) / Q with Q | D - P^2
    P, D, Q = a * abs(c), b * b * d * c * c, c * abs(c)
    out = []
    a0 = _floor_surd(P, D, Q)
    P = a0 * Q - P
    Q = (D - P * P) // Q
    for _ in range(K):
        ak = _floor_surd(P, D, Q)
        out.append(ak)
        P = ak * Q - P
        Q = (D - P * P) // Q
    if a0 != 0:
        raise ValueError("alpha must lie in (0, 1)")
    return out


def _expand_interval(lo: Fraction, hi: Fraction, K: int, exact: bool = False) -> list[int]:
    out = []
    if math.floor(lo) != math.floor(hi) or math.floor(lo) != 0:
        raise PrecisionExhausted("interval does not determine a_0 = 0")
    lo, hi = lo - 0, hi - 0
    for k in range(1, K + 1):
        if lo == 0 or hi == 0:
            if exact and lo == hi == 0:
                break
            raise PrecisionExhausted(f"interval reaches a rational endpoint before a_{k}")
        lo, hi = 1 / hi, 1 / lo
        a_lo, a_hi = math.floor(lo), math.floor(hi)
        if a_lo != a_hi:
            raise PrecisionExhausted(f"precision determines only {k - 1} partial quotients")
        out.append(a_lo)
        lo, hi = lo - a_lo, hi - a_lo
    return out


def expand_cf(alpha: IrrationalSpec, K: int) -> ContinuedFraction:
    """First K partial quotients and convergents of alpha.

    Surds use the exact periodic algorithm, decimals are expanded with rational
    interval arithmetic and raise PrecisionExhausted once the interval stops
    pinning down the next quotient.  A terminating explicit sequence may yield
    fewer than K quotients.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if alpha.kind == "surd":
        qs = _expand_surd(alpha, K)
    elif alpha.kind == "decimal":
        lo, hi = alpha.interval()
        qs = _expand_interval(lo, hi, K)
    else:
        qs = list(alpha.quotients[:K])
        if len(qs) < K and not alpha.terminating:
            raise PrecisionExhausted(f"only {len(qs)} partial quotients are known")
    return ContinuedFraction.from_quotients(qs, alpha)


# --------------------------------------------------------------------------
# circle norm and the two-sided convergent bound


def circle_norm(theta) -> float:
    """||theta|| = dist(theta, Z)."""
    if isinstance(theta, Fraction):
        r = theta - math.floor(theta)
        return min(r, 1 - r)
    return _numeric.circle_norm(theta)


def _norm_interval(lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    z = math.floor(lo + Fraction(1, 2))
    if z != math.floor(hi + Fraction(1, 2)):
        raise PrecisionExhausted("interval straddles a half-integer")
    dlo, dhi = lo - z, hi - z
    if dlo <= 0 <= dhi:
        return Fraction(0), max(-dlo, dhi)
    return min(abs(dlo), abs(dhi)), max(abs(dlo), abs(dhi))


class QNormCheck(NamedTuple):
    lower: Fraction
    value: float
    upper: Fraction
    value_lo: Fraction
    value_hi: Fraction

    @property
    def holds(self) -> bool:
        return self.lower < self.value_lo and self.value_hi < self.upper


def qnorm_check(cf: ContinuedFraction, alpha: IrrationalSpec | None, k: int, assert_holds: bool = True) -> QNormCheck:
    """(1/(q_{k+1}+q_k), ||q_k alpha||, 1/q_{k+1}) with the strict inequalities certified.

    ``value_lo``/``value_hi`` enclose ||q_k alpha|| exactly.  Surds are refined
    until the comparison is decided; explicit non-terminating sequences only
    certify k <= K - 2 (the unknown tail matters at k = K - 1).
    """
    alpha = alpha if alpha is not None else cf.source
    if not 1 <= k or k + 1 > cf.K:
        raise OutOfDomain(f"need 1 <= k and k + 1 <= K = {cf.K}")
    q, q1 = cf.q[k], cf.q[k + 1]
    lower, upper = Fraction(1, q1 + q), Fraction(1, q1)
    if alpha is None:
        raise OutOfDomain("alpha is required")
    if alpha.kind == "sequence" and alpha.terminating and k + 1 >= len(alpha.quotients):
        raise OutOfDomain("rational alpha: ||q_K alpha|| = 0 at the last convergent")
    if alpha.kind == "sequence" and not alpha.terminating and k + 1 >= len(alpha.quotients):
        raise OutOfDomain("unknown tail: ||q_{K-1} alpha|| is not determined by the known quotients")
    bits = 128
    while True:
        lo, hi = alpha.interval(bits)
        try:
            vlo, vhi = _norm_interval(q * lo, q * hi)
        except PrecisionExhausted:
            vlo, vhi = Fraction(0), Fraction(1, 2)
        decided = (lower < vlo and vhi < upper) or vhi <= lower or vlo >= upper
        if decided or alpha.kind != "surd" or bits > 1 << 16:
            break
        bits *= 2
    res = QNormCheck(lower, float((vlo + vhi) / 2), upper, vlo, vhi)
    if alpha.kind == "decimal" and not res.holds and not (vhi <= lower or vlo >= upper):
        raise PrecisionExhausted(f"{alpha.bits} bits cannot decide the bound at k = {k}")
    if assert_holds and not res.holds:
        raise AssertionError(f"convergent bound fails at k = {k}: {float(lower)} < {res.value} < {float(upper)}")
    return res


def determinant(cf: ContinuedFraction, k: int) -> int:
    """p_k q_{k-1} - p_{k-1} q_k, which equals (-1)^(k-1)."""
    if k == 0:
        return cf.p[0] * 0 - 1 * cf.q[0]
    return cf.p[k] * cf.q[k - 1] - cf.p[k - 1] * cf.q[k]


# --------------------------------------------------------------------------
# Liouville-type alpha and resonance


def _exp_lower_upper(x: Fraction | int, bits: int) -> tuple[mpmath.mpf, mpmath.mpf]:
    with mpmath.workprec(bits):
        iv = mpmath.iv
        iv.prec = bits
        v = iv.exp(iv.mpf([Fraction(x).numerator, Fraction(x).numerator]) / Fraction(x).denominator)
        return v.a, v.b


def exceeds_exp(q_next: int, tau: float | Fraction, q: int) -> bool:
    """Certified test of q_next > exp(tau q / 2), done as log(q_next) > tau q / 2."""
    x = Fraction(tau) * q / 2
    bits = 64 + max(x.numerator.bit_length(), q_next.bit_length().bit_length())
    for _ in range(12):
        iv = mpmath.iv
        old = iv.prec
        iv.prec = bits
        try:
            v = iv.log(iv.mpf(q_next))
            xv = iv.mpf(x.numerator) / x.denominator
            if v.a > xv.b:
                return True
            if v.b <= xv.a:
                return False
        finally:
            iv.prec = old
        bits *= 2
    raise PrecisionExhausted("cannot separate q_{k+1} from exp(tau q_k / 2)")


def _ceil_exp_over(x: Fraction, q: int) -> int:
    """ceil(exp(x) / q) exactly."""
    bits = int(float(x) * 1.4427) + 96
    for _ in range(8):
        iv = mpmath.iv
        old = iv.prec
        iv.prec = bits
        try:
            v = iv.exp(iv.mpf(x.numerator) / x.denominator) / q
            lo, hi = int(mpmath.ceil(v.a)), int(mpmath.ceil(v.b))
        finally:
            iv.prec = old
        if lo == hi:
            return lo
        bits *= 2
    raise PrecisionExhausted("cannot certify ceil(exp(x)/q)")


GROWTH_RULES = ("exp", "exp-full")


def construct_liouville(
    tau: float, K: int, rule: str = "exp", first_quotient: int = 2, max_bits: int = 1 << 20
) -> tuple[IrrationalSpec, ContinuedFraction]:
    """Partial quotients forcing q_{k+1} > exp(tau q_k / 2) for every k >= 1.

    rule "exp":      a_{k+1} = ceil(exp(tau q_k / 2) / q_k) + 1
    rule "exp-full": a_{k+1} = ceil(exp(tau q_k) / q_k) + 1   (faster growth)

    The denominators grow doubly exponentially, so K is capped as soon as the
    next q would need more than ``max_bits`` bits; a warning reports the cap.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    if K < 2:
        raise ValueError("K must be >= 2")
    if rule not in GROWTH_RULES:
        raise ValueError(f"unknown growth rule {rule!r}")
    t = Fraction(tau)
    quotients = [int(first_quotient)]
    q_prev, q = 1, int(first_quotient)
    while len(quotients) < K:
        x = t * q / 2 if rule == "exp" else t * q
        if float(x) * 1.4427 > max_bits:
            warnings.warn(
                f"construct_liouville: capped at K = {len(quotients)}; "
                f"q_{len(quotients) + 1} would need about {float(x) * 1.4427:.3g} bits",
                stacklevel=2,
            )
            break
        a = _ceil_exp_over(x, q) + 1
        quotients.append(a)
        q_prev, q = q, a * q + q_prev
    spec = IrrationalSpec.from_quotients(quotients, terminating=False, label=f"liouville(tau={tau})")
    return spec, ContinuedFraction.from_quotients(quotients, spec)


def resonant_indices(cf: ContinuedFraction, tau: float, b1: int = 1) -> list[int]:
    """All k in 1..K-1 with q_{k+1} > exp(tau q_k / 2) and q_k >= b1."""
    out = []
    for k in range(1, cf.K):
        if cf.q[k] >= b1 and exceeds_exp(cf.q[k + 1], tau, cf.q[k]):
            out.append(k)
    return out
