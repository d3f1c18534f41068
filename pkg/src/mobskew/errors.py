"""Exception hierarchy shared by all modules."""


class MobskewError(Exception):
    """Base class for library errors."""


class InvariantError(MobskewError):
    """A structural invariant of a domain object was violated."""


class PrecisionExhausted(MobskewError):
    """The working precision no longer determines the requested quantity."""


class NearResonance(MobskewError):
    """A small divisor |e(m alpha) - 1| fell below the configured floor."""

    def __init__(self, m, divisor, floor):
        super().__init__(
            f"|e({m} alpha) - 1| = {divisor:.3e} is below the floor {floor:.1e}; "
            "raise the working precision or treat m as resonant"
        )
        self.m = m
        self.divisor = divisor
        self.floor = floor


class NonResonantIndex(MobskewError):
    """Index k does not satisfy q_{k+1} > exp(tau q_k / 2)."""


class SupportViolation(MobskewError):
    """Fourier mass found outside the admissible support."""


class OutOfDomain(MobskewError):
    """The requested check is undefined for this input (e.g. rational alpha at its last convergent)."""


class BudgetExceeded(MobskewError):
    """The requested orbit length or table range exceeds the configured budget."""
