"""Numerics for Mobius disjointness of analytic skew products on the 2-torus."""

from . import arith, cfrac, correlate, estimates, fourier, skew
from ._numeric import set_threads, threads
from .errors import (
    BudgetExceeded,
    InvariantError,
    MobskewError,
    NearResonance,
    NonResonantIndex,
    OutOfDomain,
    PrecisionExhausted,
    SupportViolation,
)

__version__ = "0.1.0"

__all__ = [
    "arith", "cfrac", "correlate", "estimates", "fourier", "skew",
    "set_threads", "threads",
    "BudgetExceeded", "InvariantError", "MobskewError", "NearResonance",
    "NonResonantIndex", "OutOfDomain", "PrecisionExhausted", "SupportViolation",
]
