"""Confluent hypergeometric (Kummer) function by compensated ascending series.

All exact wavefunctions of the oscillator and Coulomb systems are a Kummer
``M(a, b, z)`` times an exponential. Callers that need ``M(a, b, z) * exp(-s)``
pass ``shift=s`` so the exponential is applied to the first term and the sum
never overflows.
"""
import logging
import math
from dataclasses import dataclass

from .errors import NumericError, ParameterError

logger = logging.getLogger(__name__)

TERM_CAP = 100_000
Z_GUARD = 700.0
_STOP_RATIO = 1e-16
_STOP_RUN = 3


@dataclass(frozen=True)
class KummerParams:
    a: float
    b: float
    z: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(x) for x in (self.a, self.b, self.z)):
            raise ParameterError(f"Kummer parameters must be finite: {self}")
        if self.b <= 0 and float(self.b).is_integer():
            raise ParameterError(f"b={self.b} is a pole of M(a, b, z)")

    def raised(self) -> "KummerParams":
        """Parameters of the derivative series, (a+1, b+1, z)."""
        return KummerParams(self.a + 1.0, self.b + 1.0, self.z)


@dataclass(frozen=True)
class SeriesResult:
    value: float
    terms: int
    largest_term: float

    @property
    def cancellation(self) -> float:
        """Ratio of the largest term to the sum; large values mean lost digits."""
        if self.value == 0.0:
            return math.inf
        return self.largest_term / abs(self.value)


def kummer_series(p: KummerParams, shift: float = 0.0, term_cap: int = TERM_CAP) -> SeriesResult:
    """Sum ``exp(-shift) * M(a, b, z)`` with Kahan accumulation.

    The series stops once three consecutive terms fall below 1e-16 of the
    running sum, or immediately when a term is exactly zero (``a`` a
    non-positive integer).
    """
    if abs(p.z) > Z_GUARD:
        raise ParameterError(f"|z|={abs(p.z)} exceeds the overflow guard {Z_GUARD}")

    a, b, z = p.a, p.b, p.z
    term = math.exp(-shift)
    total = term
    carry = 0.0
    largest = abs(term)
    quiet = 0

    for k in range(term_cap):
        term *= (a + k) * z / ((b + k) * (k + 1))
        if term == 0.0:
            return SeriesResult(total, k + 1, largest)

        y = term - carry
        t = total + y
        carry = (t - total) - y
        total = t

        largest = max(largest, abs(term))
        if abs(term) <= _STOP_RATIO * abs(total):
            quiet += 1
            if quiet == _STOP_RUN:
                return SeriesResult(total, k + 2, largest)
        else:
            quiet = 0

    raise NumericError(
        f"Kummer series did not converge within {term_cap} terms",
        {"a": a, "b": b, "z": z, "partial_sum": total, "terms": term_cap,
         "last_term": term, "largest_term": largest},
    )


def kummer_m(p: KummerParams) -> float:
    return kummer_series(p).value


def kummer_m_dz(p: KummerParams) -> float:
    """dM/dz = (a/b) M(a+1, b+1, z)."""
    if p.a == 0.0:
        return 0.0
    return (p.a / p.b) * kummer_series(p.raised()).value


def scaled_kummer_m(p: KummerParams, shift: float) -> float:
    """M(a, b, z) * exp(-shift), with the exponential folded into the series."""
    return kummer_series(p, shift=shift).value
