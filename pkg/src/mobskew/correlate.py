"""Möbius correlation experiments: Davenport sums, orbit averages, two-prime
correlations, the periodic-block and Dirichlet-character decompositions, and
short-interval averages.

All long sums run over fixed blocks whose partial results are combined in a
fixed order, so outputs are bit-identical for every thread count.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _numeric
from .arith import (
    ArithmeticFunction,
    DirichletCharacter,
    MobiusTable,
    PretentiousConfig,
    character_group,
    divisors,
    m_nonpretentious,
)
from .cfrac import ContinuedFraction, IrrationalSpec
from .errors import BudgetExceeded, InvariantError
from .estimates import mrt_bound
from .skew import Observable, SkewProduct, TorusPoint, derived_system, iter_orbit, observe, orbit

DEFAULT_CHECKPOINTS = (10**3, 10**4, 10**5, 10**6)
_BLOCK = _numeric.REDUCTION_BLOCK
PI2_6 = math.pi**2 / 6


# --------------------------------------------------------------------------
# containers


@dataclass(frozen=True, eq=False)
class PeriodicObservable:
    """F(n) = values[n mod Q] with |F| <= 1."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128)
        if v.ndim != 1 or v.size < 1:
            raise ValueError("values must be a nonempty 1-D array")
        if np.abs(v).max() > 1 + 1e-12:
            raise InvariantError("periodic observable must satisfy |F| <= 1")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def period(self) -> int:
        return self.values.size

    def __call__(self, n):
        return self.values[np.asarray(n) % self.period]

    @classmethod
    def random_unimodular(cls, Q: int, rng: np.random.Generator) -> "PeriodicObservable":
        return cls(np.exp(2j * np.pi * rng.random(Q)))

    @classmethod
    def from_character(cls, chi: DirichletCharacter) -> "PeriodicObservable":
        return cls(chi.values)


@dataclass
class CorrelationSeries:
    checkpoints: list  # [(N, complex average)]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        Ns = [n for n, _ in self.checkpoints]
        if any(b <= a for a, b in zip(Ns, Ns[1:])):
            raise InvariantError("checkpoints must be strictly increasing")
        if any(abs(v) > 1 + 1e-9 for _, v in self.checkpoints):
            raise InvariantError("an average of unimodular terms exceeded 1 in modulus")

    def value(self, N: int) -> complex:
        return dict(self.checkpoints)[N]

    def to_rows(self) -> list[dict]:
        return [{"N": n, "re": v.real, "im": v.imag, "abs": abs(v)} for n, v in self.checkpoints]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "re", "im", "abs"])
        for r in self.to_rows():
            w.writerow([r["N"], repr(r["re"]), repr(r["im"]), repr(r["abs"])])
        return buf.getvalue()


def _phase_fixed(beta) -> int:
    if isinstance(beta, IrrationalSpec):
        return beta.fixed()
    if isinstance(beta, ContinuedFraction):
        return beta.alpha_fixed()
    if isinstance(beta, int):
        return 0
    return _numeric.to_fixed(beta)


class _ComplexRunning:
    """Neumaier running sums of the real and imaginary parts."""

    def __init__(self):
        self.re = _numeric.CompensatedAccumulator()
        self.im = _numeric.CompensatedAccumulator()

    def feed(self, terms: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self.re.prefix(terms.real), self.im.prefix(terms.imag)

    @property
    def value(self) -> complex:
        return complex(self.re.value, self.im.value)


def _checkpoint_averages(blocks, checkpoints) -> list[tuple[int, complex]]:
    """Feed (n, terms) blocks in ascending n; return (N, sum_{n<=N} / N) at each checkpoint."""
    acc = _ComplexRunning()
    cps = sorted(set(int(c) for c in checkpoints))
    out, i = [], 0
    for n, terms in blocks:
        if i >= len(cps):
            break
        re, im = acc.feed(terms)
        while i < len(cps) and cps[i] <= n[-1]:
            j = cps[i] - int(n[0])
            out.append((cps[i], complex(re[j], im[j]) / cps[i]))
            i += 1
    return out


def _check_limit(N: int, mu: MobiusTable) -> None:
    if N > mu.limit:
        raise ValueError(f"N = {N} exceeds the sieve limit {mu.limit}")
    if N < 1:
        raise ValueError("N must be >= 1")


# --------------------------------------------------------------------------
# Davenport and orbit averages


def _davenport_blocks(bf: int, N: int, mu: MobiusTable):
    starts = list(range(1, N + 1, _BLOCK))

    def make(s):
        n = np.arange(s, min(N, s + _BLOCK - 1) + 1, dtype=np.int64)
        t = _numeric.frac_points(bf, n)
        return n, mu.values[n] * (np.cos(2 * np.pi * t) + 1j * np.sin(2 * np.pi * t))

    # evaluate a batch of blocks in parallel, consume them in order
    batch = max(1, _numeric.get_threads()) * 4
    for b in range(0, len(starts), batch):
        yield from _numeric.parallel_map(make, starts[b : b + batch])


def davenport_series(beta, checkpoints, mu: MobiusTable) -> CorrelationSeries:
    N = max(checkpoints)
    _check_limit(N, mu)
    vals = _checkpoint_averages(_davenport_blocks(_phase_fixed(beta), N, mu), checkpoints)
    return CorrelationSeries(vals, {"experiment": "davenport"})


def davenport_sum(beta, N: int, mu: MobiusTable) -> complex:
    """(1/N) sum_{n<=N} mu(n) e(n beta), with n beta reduced exactly in 128-bit phase."""
    return davenport_series(beta, [N], mu).value(N)


def _orbit_blocks(T: SkewProduct, f: Observable, p0: TorusPoint, N: int, mu: MobiusTable):
    for c in iter_orbit(T, p0, N + 1):
        keep = c.n >= 1
        n = c.n[keep]
        if n.size:
            yield n, mu.values[n] * observe(f, c.x[keep], c.y[keep])


def mobius_orbit_average(T: SkewProduct, f: Observable, p0: TorusPoint, checkpoints, mu: MobiusTable) -> CorrelationSeries:
    """(1/N) sum_{n<=N} mu(n) f(T^n p0) at every checkpoint, in one orbit pass.

    For xi2 = 0 the result is compared with e(xi1 x0) davenport_sum(xi1 alpha, N)
    and the largest difference is stored as metadata["davenport_residual"].
    """
    N = max(checkpoints)
    _check_limit(N, mu)
    vals = _checkpoint_averages(_orbit_blocks(T, f, p0, N, mu), checkpoints)
    meta = {"experiment": "main-sum", "xi1": f.xi1, "xi2": f.xi2, "x0": p0.x, "y0": p0.y}
    if f.xi2 == 0:
        bf = (f.xi1 * T.alpha_fixed) % _numeric.ONE
        dav = davenport_series(bf_as_fraction(bf), checkpoints, mu)
        pref = observe(Observable(f.xi1, 0), p0.x, 0.0)
        meta["davenport_residual"] = max(abs(v - pref * dav.value(n)) for n, v in vals)
    return CorrelationSeries(vals, meta)


def bf_as_fraction(F: int) -> Fraction:
    """A fixed-point phase as the exact rational it stands for."""
    return Fraction(F, _numeric.ONE)


# --------------------------------------------------------------------------
# two-prime correlations


@dataclass
class BSZReport:
    direct: complex
    derived: complex
    route_residual: float
    geometric: complex | None = None
    geometric_residual: float | None = None


def bsz_correlation(T: SkewProduct, f: Observable, p0: TorusPoint, p1: int, p2: int, N: int) -> BSZReport:
    """(1/N) sum_{n<=N} f(T^{p1 n} p0) conj(f(T^{p2 n} p0)) by two routes.

    The derived route runs Ttilde from (0, 0) with the observable
    e(xi1 (p1 - p2) x + xi2 y).  For xi2 = 0 the closed geometric sum is added.
    """
    if p1 == p2:
        raise ValueError("p1 and p2 must differ")
    P = max(p1, p2) * N + 1
    if P > 1 << 27:
        raise BudgetExceeded("max(p1, p2) N exceeds the in-memory orbit budget")
    orb = orbit(T, p0, P)
    n = np.arange(1, N + 1)
    z1 = observe(f, orb.x[p1 * n], orb.y[p1 * n])
    z2 = observe(f, orb.x[p2 * n], orb.y[p2 * n])
    direct = _mean(z1 * np.conj(z2))
    Tt = derived_system(T, p1, p2, p0.x, 1)
    ot = orbit(Tt, TorusPoint(0.0, 0.0), N + 1)
    ft = Observable(f.xi1 * (p1 - p2), f.xi2)
    derived = _mean(observe(ft, ot.x[1:], ot.y[1:]))
    rep = BSZReport(direct, derived, abs(direct - derived))
    if f.xi2 == 0:
        k = f.xi1 * (p1 - p2)
        rep.geometric = geometric_average(k * T.alpha_fixed, N)
        rep.geometric_residual = abs(direct - rep.geometric)
    return rep


def geometric_average(theta_fixed: int, N: int) -> complex:
    """(1/N) sum_{n=1}^{N} e(n theta) = e(theta) (e(N theta) - 1) / (N (e(theta) - 1))."""
    t = _numeric.centered_float(theta_fixed)
    if theta_fixed % _numeric.ONE == 0:
        return 1.0 + 0j
    num = complex(_numeric.expm1_phase(_numeric.centered_float(N * theta_fixed)))
    den = complex(_numeric.expm1_phase(t))
    return complex(_numeric.e(t)) * num / (N * den)


def _mean(z: np.ndarray) -> complex:
    return complex(_numeric.compensated_sum(z.real), _numeric.compensated_sum(z.imag)) / z.size


# --------------------------------------------------------------------------
# periodic blocks


@dataclass
class BlockReport:
    N: int
    N0: int
    period: int
    A: int
    lhs: complex  # E_{n<N} mu(n) f(T^n p0)
    blocks: complex  # E_L E_{n in [L, L+W)} mu(n) f(T^n p0)
    periodic: complex  # E_L E_{n in [L, L+W)} mu(n) F_L(n)
    boundary_discrepancy: float
    boundary_bound: float  # (W-1)/(N-N0) + 2 N0/N
    boundary_bound_coarse: float  # 2 (W/N + N0/N)
    approximation_discrepancy: float
    delta_empirical: float
    sample_residual: float
    boundary_ok: bool


def _weights(lo: int, hi: int, N0: int, N: int, width: int) -> np.ndarray:
    """#{L in [N0, N): L <= m <= L + width - 1} for m in [lo, hi)."""
    m = np.arange(lo, hi, dtype=np.int64)
    top = np.minimum(m, N - 1)
    bot = np.maximum(m - width + 1, N0)
    return np.maximum(top - bot + 1, 0).astype(np.float64)


def _csum(z: np.ndarray) -> complex:
    return complex(_numeric.compensated_sum(z.real), _numeric.compensated_sum(z.imag))


def block_decompose(
    T: SkewProduct,
    f: Observable,
    p0: TorusPoint,
    mu: MobiusTable,
    N: int,
    N0: int,
    period: int,
    A: int,
    samples: int = 8,
) -> BlockReport:
    """Both sides of the split of E_{n<N} mu(n) f(T^n p0) into windows of length W = A P.

    P = ``period`` (S q_k).  F_L(n) = f(T^l p0) for the l in [L, L + P) with
    l = n mod P.  The window average over every L in [N0, N) is collapsed to a
    weighted sum: sum_L sum_{n in window} g(n) = sum_n g(n) #{L : n in window(L)},
    and for the periodic side Mu_A(m) = sum_{a<A} mu(m + a P) is formed by
    cumulative sums along residue classes.  A few L are also rebuilt directly
    from an explicit F_L as a consistency check.
    """
    if not 0 <= N0 < N / 2:
        raise ValueError("need 0 <= N0 < N/2")
    if period < 1 or A < 1:
        raise ValueError("period and A must be >= 1")
    W = A * period
    top = N + W - 1  # largest index needed is top - 1
    if top > mu.limit + 1:
        raise ValueError("N + A P exceeds the sieve limit")
    orb = orbit(T, p0, top)
    fv = observe(f, orb.x, orb.y)
    muv = mu.values[:top].astype(np.float64)  # mu(0) = 0
    g = muv * fv
    lhs = _csum(g[:N]) / N
    blocks = _csum(g * _weights(0, top, N0, N, W)) / (W * (N - N0))

    # periodic side
    m_hi = N + period - 1
    span = m_hi - N0 + (A - 1) * period
    mu_int = mu.values[N0 : N0 + span].astype(np.int64)
    rows = -(-span // period)
    pad = np.zeros(rows * period, dtype=np.int64)
    pad[:span] = mu_int
    cs = np.cumsum(pad.reshape(rows, period), axis=0).reshape(-1)  # cs[i] = sum_{j<=i, j=i mod P} mu(N0+j)
    i = np.arange(m_hi - N0)
    upper = cs[i + (A - 1) * period]
    lower = np.where(i >= period, cs[np.maximum(i - period, 0)], 0)
    mu_A = (upper - lower).astype(np.float64)
    c = fv[N0:m_hi] * mu_A
    periodic = _csum(c * _weights(N0, m_hi, N0, N, period)) / (W * (N - N0))

    # explicit F_L for a few L
    rng = np.random.default_rng(0)
    Ls = np.unique(np.concatenate([[N0, N - 1], rng.integers(N0, N, size=max(samples - 2, 0))]))
    sample_res, delta_emp = 0.0, 0.0
    for L in Ls:
        L = int(L)
        ls = np.arange(L, L + period)
        F = np.empty(period, dtype=np.complex128)
        F[ls % period] = fv[ls]
        FL = PeriodicObservable(F)
        n = np.arange(L, L + W)
        direct = _csum(muv[n] * FL(n))
        via = _csum(c[L - N0 : L - N0 + period])
        sample_res = max(sample_res, abs(direct - via))
        delta_emp = max(delta_emp, float(np.abs(fv[n] - FL(n)).max()))

    disc = abs(lhs - blocks)
    bound = (W - 1) / (N - N0) + 2 * N0 / N
    coarse = 2 * (W / N + N0 / N)
    return BlockReport(
        N, N0, period, A, lhs, blocks, periodic, disc, bound, coarse,
        abs(blocks - periodic), delta_emp, sample_res, disc <= bound + 1e-12,
    )


# --------------------------------------------------------------------------
# Dirichlet-character decomposition of periodic data


def _units(q: int) -> np.ndarray:
    r = np.arange(q)
    return r[np.gcd(r, q) == 1]


def char_coefficients(F: PeriodicObservable, d: int):
    """(group, w): F(r d) on (Z/(Q/d))^x expanded in all characters mod Q/d.

    w[j] = E_{r unit} F(r d) conj(chi_j(r)) under the uniform probability
    measure; Parseval gives sum_j |w_j|^2 = E_r |F(r d)|^2 <= 1.
    """
    Q = F.period
    if Q % d:
        raise ValueError(f"d = {d} does not divide Q = {Q}")
    q = Q // d
    G = character_group(q)
    r = _units(q)
    vals = F(r * d)
    X = G.matrix()[:, r]
    w = (np.conj(X) @ vals) / r.size
    return G, w


@dataclass
class DirichletReport:
    Q: int
    L: int
    A: int
    direct_sum: complex
    identity_sum: complex
    identity_residual: float
    character_sum: complex
    character_residual: float
    lhs: float  # |E mu F|^2
    rhs_all: float  # (pi^2/6) sum over (d, chi mod Q/d) of |E mu chi'|^2
    rhs_primitive: float  # (pi^2/6) Q E over (d, chi primitive mod Q/d) of |E mu chi|^2
    pairs_all: int
    pairs_primitive: int
    cs_weight: float  # sum_{d, chi} |w|^2 / d^2
    parseval_max: float
    holds_all: bool
    holds_primitive: bool


def dirichlet_decompose(F: PeriodicObservable, L: int, A: int, mu: MobiusTable) -> DirichletReport:
    """Exact regrouping of sum_{L<=n<L+AQ} mu(n) F(n) by d = (n, Q), and the character bound.

    identity:  sum_{d|Q} mu(d) sum_{r in [L/d, L/d + AQ/d), (r,Q/d)=(r,d)=1} mu(r) F(r d)
    characters: F(r d) = sum_chi w_{d,chi} chi(r) on units mod Q/d, so the inner sums become
               sum_r mu(r) chi'(r) with chi' = chi times the principal character mod d.
    Cauchy-Schwarz with sum_{d,chi} |w|^2/d^2 <= sum_d d^-2 <= pi^2/6 and
    #pairs = sum_{d|Q} phi(Q/d) = Q gives the bound rhs_all.  rhs_primitive is
    the same expression restricted to primitive characters, reported alongside.
    """
    Q = F.period
    if L < 0 or A < 1:
        raise ValueError("need L >= 0 and A >= 1")
    if L + A * Q - 1 > mu.limit:
        raise ValueError("L + A Q exceeds the sieve limit")
    n = np.arange(L, L + A * Q)
    muv = mu.values.astype(np.float64)
    direct = _csum(muv[n] * F(n))
    identity = 0j
    characters = 0j
    rhs_all = 0.0
    prim_terms = []
    cs_weight = 0.0
    parseval = 0.0
    pairs_all = 0
    for d in divisors(Q):
        mu_d = float(muv[d]) if d <= mu.limit else 0.0
        q = Q // d
        r = np.arange(-(-L // d), -(-(L + A * Q) // d))
        assert r.size == A * q
        cop = (np.gcd(r, q) == 1) & (np.gcd(r, d) == 1)
        mr = muv[r] * cop
        identity += mu_d * _csum(mr * F(r * d))
        G, w = char_coefficients(F, d)
        parseval = max(parseval, float(np.sum(np.abs(w) ** 2)))
        cs_weight += float(np.sum(np.abs(w) ** 2)) / d**2
        mu_r_d = muv[r] * (np.gcd(r, d) == 1)
        for j, chi in enumerate(G):
            inner = _csum(mu_r_d * chi(r))
            characters += mu_d * w[j] * inner
            rhs_all += abs(inner / r.size) ** 2
            pairs_all += 1
            if chi.primitive:
                prim_terms.append(abs(_csum(muv[r] * chi(r)) / r.size) ** 2)
    E = direct / (A * Q)
    lhs = abs(E) ** 2
    rhs_all *= PI2_6
    rhs_prim = PI2_6 * Q * float(np.mean(prim_terms)) if prim_terms else 0.0
    if cs_weight > PI2_6 + 1e-12:
        raise InvariantError("Cauchy-Schwarz weight exceeds pi^2/6")
    scale = max(1.0, abs(direct))
    return DirichletReport(
        Q, L, A, direct, identity, abs(direct - identity) / scale, characters,
        abs(direct - characters) / scale, lhs, rhs_all, rhs_prim, pairs_all, len(prim_terms),
        cs_weight, parseval, lhs <= rhs_all * (1 + 1e-12) + 1e-15, lhs <= rhs_prim * (1 + 1e-12) + 1e-15,
    )


# --------------------------------------------------------------------------
# short intervals


def _values(nu, lo: int, hi: int) -> np.ndarray:
    if isinstance(nu, MobiusTable):
        if hi - 1 > nu.limit:
            raise ValueError("range exceeds the sieve limit")
        return nu.values[lo:hi]
    if isinstance(nu, ArithmeticFunction):
        return nu(np.arange(lo, hi))
    arr = np.asarray(nu)
    if hi > arr.size:
        raise ValueError("range exceeds the value table")
    return arr[lo:hi]


def _integer_valued(v: np.ndarray) -> np.ndarray | None:
    if np.issubdtype(v.dtype, np.integer):
        return v.astype(np.int64)
    if np.iscomplexobj(v):
        if np.any(v.imag != 0):
            return None
        v = v.real
    if np.all(v == np.round(v)) and np.abs(v).max(initial=0) < 2**20:
        return v.astype(np.int64)
    return None


@dataclass
class ShortIntervalReport:
    X: int
    l: int
    lhs: float
    lhs_exact: Fraction | None
    M_value: float | None
    rhs: float | None
    ratio: float | None
    stride: int = 1


def window_sums(v: np.ndarray, l: int) -> np.ndarray:
    """sum_{n=L}^{L+l-1} v[n] for every start L with a full window."""
    iv = _integer_valued(v)
    if iv is not None:
        c = np.concatenate([[0], np.cumsum(iv)])
        return c[l:] - c[:-l]
    c = np.concatenate([[0], _numeric.CompensatedAccumulator().prefix(v.real)])
    out = c[l:] - c[:-l]
    if np.iscomplexobj(v):
        ci = np.concatenate([[0], _numeric.CompensatedAccumulator().prefix(v.imag)])
        out = out + 1j * (ci[l:] - ci[:-l])
    return out


def short_interval_lhs(nu, X: int, l: int, stride: int = 1) -> tuple[float, Fraction | None]:
    """E_{X<=L<2X} |E_{L<=n<L+l} nu(n)|^2 (every L, or every stride-th L)."""
    if not X >= l >= 10:
        raise ValueError("requires X >= l >= 10")
    v = _values(nu, X, 2 * X + l - 1)
    s = window_sums(v, l)[::stride]
    if np.issubdtype(s.dtype, np.integer):
        total = int(np.sum(s * s, dtype=np.int64))
        exact = Fraction(total, s.size * l * l)
        return float(exact), exact
    return float(_numeric.compensated_sum(np.abs(s) ** 2) / (s.size * l * l)), None


def short_interval_naive(nu, X: int, l: int):
    """The same average with every window summed from scratch (oracle, O(X l))."""
    v = _values(nu, X, 2 * X + l - 1)
    iv = _integer_valued(v)
    if iv is not None:
        total = sum(int(iv[L : L + l].sum()) ** 2 for L in range(X))
        return Fraction(total, X * l * l)
    return sum(abs(complex(v[L : L + l].sum())) ** 2 for L in range(X)) / (X * l * l)


def short_interval_avg(nu, X: int, l: int, M_value: float | None = None, cfg: PretentiousConfig | None = None, stride: int = 1, compute_M: bool = True) -> ShortIntervalReport:
    """LHS by sliding windows and the right-hand side from the M(nu, X) functional.

    M_value may be supplied (it is the expensive part); otherwise it is computed
    with ``cfg`` when ``nu`` is an ArithmeticFunction.
    """
    lhs, exact = short_interval_lhs(nu, X, l, stride)
    if M_value is None and compute_M and isinstance(nu, ArithmeticFunction):
        M_value = m_nonpretentious(nu, X, cfg)
    rhs = mrt_bound(M_value, X, l) if M_value is not None else None
    ratio = lhs / rhs if rhs else None
    return ShortIntervalReport(X, l, lhs, exact, M_value, rhs, ratio, stride)


def log_checkpoints(X: int, per_decade: int = 1) -> list[int]:
    out = sorted({int(round(10 ** (k / per_decade))) for k in range(0, int(math.log10(X) * per_decade) + 1)} | {X})
    return [c for c in out if 1 <= c <= X]


def mu_chi_sum(chi: DirichletCharacter, X: int, mu: MobiusTable, checkpoints=None):
    """sum_{n<=X} mu(n) chi(n), unnormalized; with ``checkpoints`` a list of (N, partial sum)."""
    _check_limit(X, mu)
    cps = [X] if checkpoints is None else sorted(set(checkpoints) | {X})
    starts = list(range(1, X + 1, _BLOCK))

    def make(s):
        n = np.arange(s, min(X, s + _BLOCK - 1) + 1, dtype=np.int64)
        return n, mu.values[n] * chi(n)

    vals = _checkpoint_averages(_numeric.parallel_map(make, starts), cps)
    sums = [(N, v * N) for N, v in vals]
    if checkpoints is None:
        return sums[-1][1]
    return sums


def rho_envelope(q: int, checkpoints, mu: MobiusTable) -> list[tuple[int, float]]:
    """rho_q(X) = max over chi mod q of |sum_{n<=X} mu chi| / X, then made nonincreasing
    over the checkpoint grid (sup over X' >= X among the checkpoints)."""
    cps = sorted(checkpoints)
    best = np.zeros(len(cps))
    for chi in character_group(q):
        s = mu_chi_sum(chi, cps[-1], mu, cps)
        best = np.maximum(best, [abs(v) / N for N, v in s])
    env = np.maximum.accumulate(best[::-1])[::-1]
    return list(zip(cps, env.tolist()))
