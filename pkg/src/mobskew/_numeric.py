"""Low-level numerics: 128-bit fixed-point phases, compensated and tree sums, thread plumbing.

Angles mod 1 are held as integers in [0, 2**128).  Products ``n * alpha`` are then
exact modulo 1, which is what keeps ``frac(x0 + n alpha)`` accurate for orbit
lengths where a double would already have lost ~25 bits.
"""

from __future__ import annotations

import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from fractions import Fraction

import numba
import numpy as np

FRAC_BITS = 128
ONE = 1 << FRAC_BITS
HALF = ONE >> 1
_MASK64 = (1 << 64) - 1
_MAX_INDEX = 1 << 31

# Fixed block length for every blocked reduction; never derived from the thread count.
REDUCTION_BLOCK = 1 << 16


# --------------------------------------------------------------------------
# thread count

_state = threading.local()


def get_threads() -> int:
    n = getattr(_state, "threads", None)
    if n is None:
        n = int(os.environ.get("MOBSKEW_THREADS", "1"))
    return max(1, n)


def set_threads(n: int) -> None:
    if n < 1:
        raise ValueError("thread count must be >= 1")
    _state.threads = int(n)


@contextmanager
def threads(n: int):
    old = getattr(_state, "threads", None)
    set_threads(n)
    try:
        yield
    finally:
        _state.threads = old


def parallel_map(func, items):
    """Map ``func`` over ``items`` preserving order; uses the configured thread count."""
    items = list(items)
    n = get_threads()
    if n == 1 or len(items) <= 1:
        return [func(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(func, items))


# --------------------------------------------------------------------------
# fixed-point phases


def to_fixed(value) -> int:
    """floor(value * 2**128) reduced mod 2**128, for int, float, Fraction or mpmath numbers."""
    if isinstance(value, int):
        return 0
    if isinstance(value, (float, np.floating)):
        value = Fraction(float(value))
    if isinstance(value, Fraction):
        return (value.numerator * ONE // value.denominator) % ONE
    # mpmath mpf and friends
    import mpmath

    with mpmath.workprec(FRAC_BITS + 64):
        v = mpmath.mpf(value)
        return int(mpmath.floor(v * ONE)) % ONE


def fraction_to_fixed(num: int, den: int) -> int:
    """Round num/den (mod 1) to the nearest multiple of 2**-128."""
    return ((2 * num * ONE + den) // (2 * den)) % ONE


def fixed_to_float(F: int) -> float:
    """Value in [0, 1) of a fixed-point angle, truncated to 53 bits so it never rounds to 1.0."""
    return (F % ONE >> (FRAC_BITS - 53)) * 2.0**-53


def centered(F: int) -> int:
    F %= ONE
    return F - ONE if F >= HALF else F


def centered_float(F: int) -> float:
    """Signed representative in [-1/2, 1/2), correctly rounded (keeps relative precision near 0)."""
    return centered(F) / ONE


def circle_norm_fixed(F: int) -> float:
    return abs(centered_float(F))


def _split(F: int) -> tuple[np.uint64, np.uint64]:
    F %= ONE
    return np.uint64(F >> 64), np.uint64(F & _MASK64)


def frac_points(alpha_fixed: int, n, x0_fixed: int = 0) -> np.ndarray:
    """frac(x0 + n*alpha) for an integer array ``n`` (0 <= n < 2**31), exact before the final rounding."""
    n = np.asarray(n, dtype=np.int64)
    if n.size and (n.min() < 0 or n.max() >= _MAX_INDEX):
        raise ValueError("orbit index out of the supported range [0, 2**31)")
    hi_word, lo_word = _frac_words(alpha_fixed, n, x0_fixed)
    return (hi_word >> np.uint64(11)).astype(np.float64) * 2.0**-53


def _frac_words(alpha_fixed: int, n: np.ndarray, x0_fixed: int):
    a_hi, a_lo = _split(alpha_fixed)
    x_hi, x_lo = _split(x0_fixed)
    nu = n.astype(np.uint64)
    low32 = np.uint64(0xFFFFFFFF)
    s32 = np.uint64(32)
    a1 = a_lo >> s32
    a0 = a_lo & low32
    with np.errstate(over="ignore"):
        t0 = nu * a0
        t1 = nu * a1 + (t0 >> s32)
        lo = ((t1 & low32) << s32) | (t0 & low32)
        hi = nu * a_hi + (t1 >> s32)
        lo_sum = lo + x_lo
        carry = (lo_sum < lo).astype(np.uint64)
        hi = hi + x_hi + carry
    return hi, lo_sum


def e(theta):
    """e(theta) = exp(2 pi i theta)."""
    return np.exp(2j * np.pi * np.asarray(theta))


def expm1_phase(theta):
    """e(theta) - 1 without cancellation for small theta."""
    theta = np.asarray(theta, dtype=np.float64)
    s = np.sin(np.pi * theta)
    return -2.0 * s * s + 1j * np.sin(2.0 * np.pi * theta)


def circle_norm(theta):
    """Distance from theta to the nearest integer."""
    theta = np.asarray(theta, dtype=np.float64)
    r = theta - np.floor(theta)
    out = np.minimum(r, 1.0 - r)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# reductions


def tree_sum(values):
    """Pairwise sum in a fixed tree order (independent of how the partials were produced)."""
    vals = list(values)
    if not vals:
        return 0.0
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def blocked_sum(arr: np.ndarray):
    """Sum of a 1-D array: fixed-size block partials reduced by ``tree_sum``.

    Blocks are evaluated through ``parallel_map`` but their boundaries are fixed,
    so the result is bit-identical for every thread count.
    """
    arr = np.asarray(arr)
    if arr.size == 0:
        return arr.dtype.type(0)
    starts = range(0, arr.size, REDUCTION_BLOCK)
    partials = parallel_map(lambda s: arr[s : s + REDUCTION_BLOCK].sum(), starts)
    return tree_sum(partials)


@numba.njit(cache=True, nogil=True)
def _neumaier_prefix(values, s, c, out):
    for i in range(values.size):
        v = values[i]
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[i] = s + c
    return s, c


class CompensatedAccumulator:
    """Running Neumaier sum that can be fed in chunks."""

    __slots__ = ("s", "c")

    def __init__(self, start: float = 0.0):
        self.s = float(start)
        self.c = 0.0

    def prefix(self, values: np.ndarray) -> np.ndarray:
        """Feed ``values``; returns the running totals after each element."""
        values = np.ascontiguousarray(values, dtype=np.float64)
        out = np.empty_like(values)
        self.s, self.c = _neumaier_prefix(values, self.s, self.c, out)
        return out

    @property
    def value(self) -> float:
        return self.s + self.c


def compensated_sum(values) -> float:
    acc = CompensatedAccumulator()
    acc.prefix(np.asarray(values, dtype=np.float64))
    return acc.value


@numba.njit(cache=True, nogil=True)
def _segment_sums(values, bounds, out):
    # compensated sums of values[bounds[i]:bounds[i+1]]
    for i in range(bounds.size - 1):
        s = 0.0
        c = 0.0
        for j in range(bounds[i], bounds[i + 1]):
            v = values[j]
            t = s + v
            if abs(s) >= abs(v):
                c += (s - t) + v
            else:
                c += (v - t) + s
            s = t
        out[i] = s + c


def segment_sums(values: np.ndarray, bounds: np.ndarray) -> np.ndarray:
    values = np.ascontiguousarray(values, dtype=np.float64)
    bounds = np.ascontiguousarray(bounds, dtype=np.int64)
    out = np.empty(max(bounds.size - 1, 0))
    _segment_sums(values, bounds, out)
    return out


# --------------------------------------------------------------------------
# trigonometric polynomial kernels


@numba.njit(cache=True, nogil=True)
def _trig_dense(x, c0, cpos, out):
    # c0 + 2 Re sum_{m=1}^{M} cpos[m-1] e(m x); z^m by repeated multiplication
    M = cpos.size
    for i in range(x.size):
        ang = 2.0 * math.pi * x[i]
        z = complex(math.cos(ang), math.sin(ang))
        w = complex(1.0, 0.0)
        acc = 0.0
        for m in range(M):
            w = w * z
            c = cpos[m]
            acc += c.real * w.real - c.imag * w.imag
        out[i] = c0 + 2.0 * acc


@numba.njit(cache=True, nogil=True)
def _trig_sparse(x, c0, ms, cs, out):
    for i in range(x.size):
        acc = 0.0
        for j in range(ms.size):
            t = ms[j] * x[i]
            t = t - math.floor(t)
            ang = 2.0 * math.pi * t
            c = cs[j]
            acc += c.real * math.cos(ang) - c.imag * math.sin(ang)
        out[i] = c0 + 2.0 * acc


_EVAL_CHUNK = 1 << 15


def eval_real_trig(x: np.ndarray, c0: float, ms: np.ndarray, cs: np.ndarray, mmax: int) -> np.ndarray:
    """Evaluate c0 + 2 Re sum_j cs[j] e(ms[j] x) for positive frequencies ``ms``."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty_like(x)
    if ms.size == 0:
        out.fill(c0)
        return out
    dense = ms.size * 4 >= mmax
    if dense:
        cpos = np.zeros(mmax, dtype=np.complex128)
        cpos[ms - 1] = cs
    ms_f = ms.astype(np.float64)

    def work(s):
        sl = slice(s, s + _EVAL_CHUNK)
        if dense:
            _trig_dense(x[sl], c0, cpos, out[sl])
        else:
            _trig_sparse(x[sl], c0, ms_f, cs, out[sl])

    parallel_map(work, range(0, x.size, _EVAL_CHUNK))
    return out


def hex_digest(*arrays) -> str:
    """SHA-256 over the raw bytes of the given values (bitwise determinism checks)."""
    import hashlib

    h = hashlib.sha256()
    for a in arrays:
        a = np.ascontiguousarray(np.asarray(a))
        h.update(str(a.dtype).encode())
        h.update(a.tobytes())
    return h.hexdigest()
