"""Number-theoretic kernel: Möbius sieve, factorization, Dirichlet characters, pretentiousness."""

from __future__ import annotations

import csv
import io
import math
import struct
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator

import numpy as np

from . import _numeric
from .errors import InvariantError

DEFAULT_SEGMENT = 1 << 22

# --------------------------------------------------------------------------
# Möbius sieve


@dataclass(frozen=True, eq=False)
class MobiusTable:
    """mu(n) for 0 <= n <= limit, with the convention mu(0) = 0."""

    limit: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.values.shape != (self.limit + 1,):
            raise InvariantError("value array must have length limit + 1")
        self.values.setflags(write=False)

    def __getitem__(self, n):
        return self.values[n]

    def __len__(self):
        return self.limit

    def mertens(self, N: int) -> int:
        return int(self.values[: N + 1].sum(dtype=np.int64))

    def to_bytes(self) -> bytes:
        """Raw little-endian int8 payload for n = 1..limit behind an 8-byte header.

        Header: b"MOBS", version byte 1, then the low 24 bits of the limit
        (little-endian).  Readers recover the full limit from the payload length.
        """
        header = b"MOBS" + struct.pack("<B", 1) + (self.limit & 0xFFFFFF).to_bytes(3, "little")
        return header + self.values[1:].astype("<i1").tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "MobiusTable":
        if len(blob) < 8 or blob[:4] != b"MOBS":
            raise ValueError("not a MOBS table")
        version = blob[4]
        if version != 1:
            raise ValueError(f"unsupported MOBS version {version}")
        limit = len(blob) - 8
        if limit & 0xFFFFFF != int.from_bytes(blob[5:8], "little"):
            raise ValueError("header limit does not match payload length")
        values = np.zeros(limit + 1, dtype=np.int8)
        values[1:] = np.frombuffer(blob, dtype="<i1", offset=8)
        return cls(limit, values)

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "MobiusTable":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())


def primes_up_to(n: int) -> np.ndarray:
    """All primes p <= n (plain Eratosthenes, byte array)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def _mobius_segment(lo: int, hi: int, small_primes: np.ndarray) -> np.ndarray:
    """mu(n) for lo <= n < hi, given all primes up to sqrt(hi - 1)."""
    length = hi - lo
    mu = np.ones(length, dtype=np.int8)
    prod = np.ones(length, dtype=np.int64)
    for p in small_primes:
        p = int(p)
        first = (-lo) % p
        mu[first::p] *= -1
        prod[first::p] *= p
        pp = p * p
        if pp < hi:
            mu[(-lo) % pp :: pp] = 0
    n = np.arange(lo, hi, dtype=np.int64)
    # squarefree n with prod < n has exactly one prime factor above sqrt(hi)
    mu[(mu != 0) & (prod < n)] *= -1
    if lo == 0:
        mu[0] = 0
    return mu


def iter_mobius_segments(N: int, segment: int = DEFAULT_SEGMENT) -> Iterator[tuple[int, np.ndarray]]:
    """Stream (start, mu[start:start+len]) over 0..N with O(segment) memory."""
    if N < 1:
        raise ValueError("sieve bound must be >= 1")
    small = primes_up_to(math.isqrt(N))
    for lo in range(0, N + 1, segment):
        hi = min(lo + segment, N + 1)
        yield lo, _mobius_segment(lo, hi, small[small * small < hi] if lo else small)


def mobius_sieve(N: int, segment: int = DEFAULT_SEGMENT) -> MobiusTable:
    """Möbius values up to N by a segmented sieve; segments run through the thread pool."""
    if N < 1:
        raise ValueError("sieve bound must be >= 1")
    small = primes_up_to(math.isqrt(N))
    bounds = [(lo, min(lo + segment, N + 1)) for lo in range(0, N + 1, segment)]
    parts = _numeric.parallel_map(lambda b: _mobius_segment(b[0], b[1], small), bounds)
    return MobiusTable(N, np.concatenate(parts))


def factorize(n: int) -> list[tuple[int, int]]:
    """Trial-division factorization into (prime, exponent) pairs, primes increasing."""
    if n < 1:
        raise ValueError("n must be positive")
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def mobius_from_factorization(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def divisors(Q: int) -> list[int]:
    if Q < 1:
        raise ValueError("Q must be positive")
    divs = [1]
    for p, e in factorize(Q):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def euler_phi(Q: int) -> int:
    out = Q
    for p, _ in factorize(Q):
        out = out // p * (p - 1)
    return out


# --------------------------------------------------------------------------
# Dirichlet characters


@dataclass(frozen=True, eq=False)
class DirichletCharacter:
    modulus: int
    values: np.ndarray = field(repr=False)
    conductor: int
    primitive: bool
    index: tuple = ()
    principal: bool = False

    def __call__(self, n):
        return self.values[np.asarray(n) % self.modulus]

    def validate(self, tol: float = 1e-12) -> None:
        """Raise InvariantError unless the table is a character mod ``modulus``."""
        Q = self.modulus
        n = np.arange(Q)
        units = np.gcd(n, Q) == 1
        v = self.values
        if v.shape != (Q,):
            raise InvariantError("character table has the wrong length")
        if np.any(v[~units] != 0):
            raise InvariantError("character is nonzero off the units")
        if np.any(np.abs(np.abs(v[units]) - 1) > tol):
            raise InvariantError("character values on units must be unimodular")
        prod = v[:, None] * v[None, :]
        target = v[(n[:, None] * n[None, :]) % Q]
        if np.max(np.abs(prod - target)) > tol:
            raise InvariantError("character is not completely multiplicative")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "re", "im"])
        for n, z in enumerate(self.values):
            w.writerow([n, repr(float(z.real)), repr(float(z.imag))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "DirichletCharacter":
        rows = list(csv.DictReader(io.StringIO(text)))
        values = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
        Q = len(values)
        c = _factor_through_conductor(values, Q)
        units = np.gcd(np.arange(Q), Q) == 1
        principal = bool(np.all(np.abs(values[units] - 1) < 1e-12))
        return cls(Q, values, c, c == Q, principal=principal)


@dataclass(frozen=True, eq=False)
class CharacterGroup:
    """All characters mod Q together with the generator decomposition of (Z/QZ)^x."""

    modulus: int
    characters: tuple
    components: tuple  # (prime, exponent, generators, orders) per CRT factor

    def __len__(self):
        return len(self.characters)

    def __iter__(self):
        return iter(self.characters)

    @property
    def principal(self) -> DirichletCharacter:
        return self.characters[0]

    def primitive(self) -> list[DirichletCharacter]:
        return [chi for chi in self.characters if chi.primitive]

    def matrix(self) -> np.ndarray:
        return np.stack([chi.values for chi in self.characters])


def _primitive_root(p: int) -> int:
    order = p - 1
    qs = [q for q, _ in factorize(order)]
    for g in range(2, p):
        if all(pow(g, order // q, p) != 1 for q in qs):
            return g
    return 1  # p == 2


def _cyclic_logs(gen: int, order: int, mod: int) -> dict[int, int]:
    logs = {}
    x = 1
    for k in range(order):
        logs[x] = k
        x = x * gen % mod
    return logs


def _roots_of_unity(E: int) -> np.ndarray:
    z = np.exp(2j * np.pi * np.arange(E) / E)
    # exact values at quarter turns keep real characters exactly real
    for q, val in enumerate((1, 1j, -1, -1j)):
        if (q * E) % 4 == 0:
            z[q * E // 4] = val
    return z


def _local_conductor(p: int, e: int, js: tuple, orders: tuple) -> int:
    if p == 2:
        if e == 1:
            return 1
        if e == 2:
            return 4 if js[0] else 1
        sign, j = js
        if j == 0:
            return 4 if sign else 1
        order = orders[1] // math.gcd(j, orders[1])
        return 2 ** (order.bit_length() - 1 + 2)
    (j,) = js
    if j == 0:
        return 1
    (o,) = orders
    order = o // math.gcd(j, o)
    v = 0
    while order % p == 0:
        order //= p
        v += 1
    return p ** (v + 1)


@lru_cache(maxsize=1024)
def character_group(Q: int) -> CharacterGroup:
    """All phi(Q) characters mod Q built from CRT factors and cyclic generators."""
    if Q < 1:
        raise ValueError("Q must be positive")
    comps = []
    for p, e in factorize(Q):
        pe = p**e
        if p == 2:
            if e == 1:
                comps.append((p, e, (), (), pe))
            elif e == 2:
                comps.append((p, e, (3,), (2,), pe))
            else:
                comps.append((p, e, (pe - 1, 5), (2, 2 ** (e - 2)), pe))
        else:
            g = _primitive_root(p)
            if e > 1 and pow(g, p - 1, p * p) == 1:
                g += p
            comps.append((p, e, (g,), ((p - 1) * p ** (e - 1),), pe))

    units = [r for r in range(Q) if math.gcd(r, Q) == 1]
    # discrete logs of each unit on every cyclic generator
    log_cols = []
    orders = []
    for p, e, gens, ords, pe in comps:
        if not gens:
            continue
        if p == 2 and e >= 3:
            five = _cyclic_logs(5, ords[1], pe)
            s_col, j_col = [], []
            for r in units:
                u = r % pe
                s = 0 if u % 4 == 1 else 1
                if s:
                    u = (pe - u) % pe
                s_col.append(s)
                j_col.append(five[u])
            log_cols += [s_col, j_col]
        else:
            table = _cyclic_logs(gens[0], ords[0], pe)
            log_cols.append([table[r % pe] for r in units])
        orders += list(ords)

    E = 1
    for o in orders:
        E = E * o // math.gcd(E, o)
    roots = _roots_of_unity(E)
    logs = np.array(log_cols, dtype=np.int64).reshape(len(orders), len(units))
    units_arr = np.array(units, dtype=np.int64)

    chars = []
    for js in np.ndindex(*orders) if orders else [()]:
        expo = np.zeros(len(units), dtype=np.int64)
        for j, o, row in zip(js, orders, logs):
            expo = (expo + j * (E // o) * row) % E
        values = np.zeros(Q, dtype=np.complex128)
        values[units_arr] = roots[expo]
        # conductor from the local structure
        cond = 1
        pos = 0
        for p, e, gens, ords, pe in comps:
            k = len(gens)
            cond *= _local_conductor(p, e, tuple(int(x) for x in js[pos : pos + k]), ords)
            pos += k
        principal = not any(js)
        values.setflags(write=False)
        chars.append(DirichletCharacter(Q, values, cond, cond == Q, tuple(int(x) for x in js), principal))
    return CharacterGroup(Q, tuple(chars), tuple((p, e, gens, ords) for p, e, gens, ords, _ in comps))


def _factor_through_conductor(values: np.ndarray, Q: int, tol: float = 1e-9) -> int:
    r = np.arange(Q)
    units = r[np.gcd(r, Q) == 1]
    vu = values[units]
    for c in divisors(Q):
        cls = units % c
        ref = {}
        ok = True
        for cl, v in zip(cls.tolist(), vu.tolist()):
            w = ref.setdefault(cl, v)
            if abs(w - v) > tol:
                ok = False
                break
        if ok:
            return c
    return Q


def conductor(chi: DirichletCharacter) -> int:
    """Smallest c | Q such that chi is constant on unit residue classes mod c."""
    return _factor_through_conductor(chi.values, chi.modulus)


def induce(chi: DirichletCharacter, Q: int) -> DirichletCharacter:
    """The character mod Q (a multiple of chi.modulus) induced by chi."""
    if Q % chi.modulus:
        raise ValueError("target modulus must be a multiple of the character modulus")
    n = np.arange(Q)
    values = np.where(np.gcd(n, Q) == 1, chi.values[n % chi.modulus], 0)
    c = _factor_through_conductor(values, Q)
    return DirichletCharacter(Q, values, c, c == Q, principal=chi.principal)


def find_character(Q: int, **values_at) -> DirichletCharacter:
    """Look up a character mod Q by prescribed values, e.g. ``find_character(4, at3=-1)``."""
    for chi in character_group(Q):
        if all(abs(chi.values[int(k[2:])] - v) < 1e-12 for k, v in values_at.items()):
            return chi
    raise KeyError(f"no character mod {Q} with values {values_at}")


# --------------------------------------------------------------------------
# arithmetic functions and pretentiousness


class ArithmeticFunction:
    """A function on positive integers evaluated on integer arrays (table-backed)."""

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], name: str = "nu"):
        self._fn = fn
        self.name = name

    def __call__(self, n) -> np.ndarray:
        return np.asarray(self._fn(np.asarray(n, dtype=np.int64)), dtype=np.complex128)

    def __mul__(self, other: "ArithmeticFunction") -> "ArithmeticFunction":
        return ArithmeticFunction(lambda n: self(n) * other(n), f"{self.name}*{other.name}")

    def conj(self) -> "ArithmeticFunction":
        return ArithmeticFunction(lambda n: np.conj(self(n)), f"conj({self.name})")

    def scale(self, c: complex) -> "ArithmeticFunction":
        return ArithmeticFunction(lambda n: c * self(n), f"{c}*{self.name}")

    def __repr__(self):
        return f"ArithmeticFunction({self.name})"


def mobius_function(table: MobiusTable) -> ArithmeticFunction:
    def fn(n):
        if n.size and n.max() > table.limit:
            raise ValueError("argument exceeds the sieve limit")
        return table.values[n].astype(np.float64)

    return ArithmeticFunction(fn, "mu")


def character_function(chi: DirichletCharacter) -> ArithmeticFunction:
    return ArithmeticFunction(lambda n: chi(n), f"chi{chi.modulus}{list(chi.index)}")


def constant_function(c: complex) -> ArithmeticFunction:
    return ArithmeticFunction(lambda n: np.full(n.shape, c, dtype=np.complex128), str(c))


def archimedean(t: float) -> ArithmeticFunction:
    """n -> n^{it}."""
    return ArithmeticFunction(lambda n: np.exp(1j * t * np.log(n.astype(np.float64))), f"n^(i{t})")


def _prime_sum(terms: np.ndarray) -> float:
    return float(_numeric.blocked_sum(terms))


def pretentious_distance(nu: ArithmeticFunction, nu2: ArithmeticFunction, X: int, primes=None) -> float:
    """D(nu, nu2, X) = (sum_{p <= X} (1 - Re nu(p) conj(nu2(p))) / p)^(1/2)."""
    if X < 2:
        return 0.0
    if primes is None:
        primes = primes_up_to(int(X))
    else:
        primes = primes[primes <= X]
    terms = (1.0 - np.real(nu(primes) * np.conj(nu2(primes)))) / primes
    return math.sqrt(max(_prime_sum(terms), 0.0))


@dataclass(frozen=True)
class PretentiousConfig:
    """Search domain for M(nu, X) = inf_{|t| <= X} D(nu, n^{it}, X)^2."""

    X: int
    t_bound: float | None = None
    grid_step: float = 1e-2
    refine_iters: int = 30

    def __post_init__(self):
        if not self.grid_step > 0:
            raise ValueError("grid step must be positive")
        if self.refine_iters < 0:
            raise ValueError("refinement iterations must be >= 0")

    @property
    def bound(self) -> float:
        return float(self.X if self.t_bound is None else self.t_bound)


@dataclass(frozen=True)
class PretentiousSearch:
    value: float
    t: float
    grid_value: float
    grid_t: float
    grid_points: int


_DIRECT_LIMIT = 4_000_000  # grid points x primes below which the grid is evaluated directly
_NUFFT_CHUNK = 1 << 20


def _d2_direct(ts: np.ndarray, logp: np.ndarray, coef: np.ndarray, base: float) -> np.ndarray:
    out = np.empty(ts.size)
    step = max(1, _DIRECT_LIMIT // max(logp.size, 1))
    for s in range(0, ts.size, step):
        t = ts[s : s + step, None]
        out[s : s + step] = base - np.real(np.exp(-1j * t * logp[None, :]) @ coef)
    return out


def _d2_nufft(t0: float, step: float, count: int, logp: np.ndarray, coef: np.ndarray, base: float) -> np.ndarray:
    import finufft

    out = np.empty(count)
    xj = np.mod(step * logp, 2 * np.pi)
    xj[xj >= np.pi] -= 2 * np.pi
    for k0 in range(0, count, _NUFFT_CHUNK):
        nk = min(_NUFFT_CHUNK, count - k0)
        modes = nk + (nk % 2)
        # t = t0 + (k0 + modes//2 + k') * step,  k' in [-modes/2, modes/2)
        tc = t0 + (k0 + modes // 2) * step
        cj = (coef * np.exp(-1j * tc * logp)).astype(np.complex128)
        f = finufft.nufft1d1(xj, cj, modes, isign=-1, eps=1e-14)
        out[k0 : k0 + nk] = base - np.real(f[:nk])
    return out


def nonpretentious_search(nu: ArithmeticFunction, X: int, cfg: PretentiousConfig, primes=None) -> PretentiousSearch:
    """Grid search plus golden-section refinement for inf_{|t|<=T} D(nu, n^{it}, X)^2.

    The returned value is an exact evaluation of D^2 at some admissible t, hence an
    upper bound for the infimum.  Grid values are obtained by a NUFFT when the grid
    is large; the final candidates are re-evaluated directly.
    """
    if primes is None:
        primes = primes_up_to(int(X))
    else:
        primes = primes[primes <= X]
    T = cfg.bound
    count = int(math.floor(2 * T / cfg.grid_step + 1e-9)) + 1
    if count < 1:
        raise ValueError("empty t-grid")
    if primes.size == 0:
        return PretentiousSearch(0.0, 0.0, 0.0, 0.0, count)
    logp = np.log(primes.astype(np.float64))
    coef = nu(primes) / primes
    base = _prime_sum(1.0 / primes)

    def exact(t: float) -> float:
        terms = (1.0 - np.real(nu(primes) * np.exp(-1j * t * logp))) / primes
        return _prime_sum(terms)

    t0 = -T
    if count * primes.size <= _DIRECT_LIMIT * 8:
        grid = _d2_direct(t0 + cfg.grid_step * np.arange(count), logp, coef, base)
    else:
        grid = _d2_nufft(t0, cfg.grid_step, count, logp, coef, base)
    gmin = grid.min()
    cand = np.flatnonzero(grid <= gmin + 1e-9)[:64]
    best_t, best = None, math.inf
    for k in cand:
        t = t0 + cfg.grid_step * k
        v = exact(t)
        if v < best:
            best_t, best = t, v
    grid_t, grid_best = best_t, best

    # golden-section refinement inside one grid step on each side
    a = max(-T, best_t - cfg.grid_step)
    b = min(T, best_t + cfg.grid_step)
    invphi = (math.sqrt(5) - 1) / 2
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = exact(c), exact(d)
    for _ in range(cfg.refine_iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = exact(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = exact(d)
        for t, v in ((c, fc), (d, fd)):
            if v < best:
                best_t, best = t, v
    return PretentiousSearch(max(best, 0.0), best_t, grid_best, grid_t, count)


def m_nonpretentious(nu: ArithmeticFunction, X: int, cfg: PretentiousConfig | None = None, primes=None) -> float:
    """Upper approximation of M(nu, X) = inf_{|t| <= X} D(nu, n^{it}, X)^2."""
    cfg = cfg or PretentiousConfig(X)
    return nonpretentious_search(nu, X, cfg, primes).value
