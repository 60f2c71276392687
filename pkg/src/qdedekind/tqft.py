"""The genus-2 signature sigma_2(r/p) by several independent routes."""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath

from .cotangent import cot_derivative
from .dedekind import s_odd_exact
from .exact_arith import as_fraction

__all__ = [
    "DomainError",
    "IntegralityError",
    "TQFTArgument",
    "sigma2_trig",
    "sigma2_cot3",
    "sigma2_exact",
    "odd_coprime_pairs",
    "TrigIdentityReport",
    "trig_identity_checks",
    "MainTheoremReport",
    "verify_main_theorem",
]

EXTENDED_ABOVE = 500


class DomainError(ValueError):
    """x = r/p is outside 1 <= r < p with r, p odd and coprime."""


class IntegralityError(ArithmeticError):
    """An exact sigma_2 value came out non-integral."""


@dataclass(frozen=True)
class TQFTArgument:
    x: Fraction

    def __post_init__(self):
        x = as_fraction(self.x)
        r, p = x.numerator, x.denominator
        if not 1 <= r < p:
            raise DomainError(f"need 1 <= r < p, got {r}/{p}")
        if r % 2 == 0 or p % 2 == 0:
            raise DomainError(f"r and p must both be odd, got {r}/{p}")
        object.__setattr__(self, "x", x)

    @classmethod
    def from_pair(cls, r: int, p: int) -> "TQFTArgument":
        if p <= 0:
            raise DomainError("p must be positive")
        if math.gcd(r, p) != 1:
            raise DomainError(f"r and p must be coprime, got {r}, {p}")
        return cls(Fraction(r, p))

    @property
    def r(self) -> int:
        return self.x.numerator

    @property
    def p(self) -> int:
        return self.x.denominator

    def image(self) -> "TQFTArgument":
        """x/(2x+1) = r/(2r+p), already reduced."""
        return TQFTArgument(Fraction(self.r, 2 * self.r + self.p))


def _arg(x) -> TQFTArgument:
    return x if isinstance(x, TQFTArgument) else TQFTArgument(as_fraction(x))


def sigma2_trig(x) -> float:
    """sigma_2 from the sine-sum formula with the T(n; x) numerators.

    The squared sine in the denominator is taken at pi n x; at pi n x / 2
    the formula does not reproduce the integer values.
    """
    a = _arg(x)
    r, p = a.r, a.p
    terms = []
    for n in range(1, p - 1, 2):
        T = 0.0
        for eps in (1, -1):
            T += (p + eps) * (
                math.sin(math.pi * (2 * r - 3 * eps) * n / (2 * p))
                + 3 * math.sin(math.pi * (2 * r + eps) * n / (2 * p))
            )
        s2 = math.sin(math.pi * ((n * r) % (2 * p)) / p)
        terms.append(T / (math.sin(math.pi * n / (2 * p)) ** 3 * s2 * s2))
    return 1 / (6 * p * p) - 1 / 6 + math.fsum(terms) / (4 * p * p)


def sigma2_cot3(x, *, extended: bool | None = None) -> float:
    """(2/p) sum_{n odd <= p-2} cot^3(pi n/2p) / sin(pi n x).

    Accumulates in mpmath when p is large (or ``extended`` is set).
    """
    a = _arg(x)
    r, p = a.r, a.p
    if extended is None:
        extended = p > EXTENDED_ABOVE
    if extended:
        with mpmath.workdps(40):
            total = mpmath.mpf(0)
            for n in range(1, p - 1, 2):
                c = mpmath.cot(mpmath.pi * n / (2 * p))
                total += c**3 / mpmath.sin(mpmath.pi * ((n * r) % (2 * p)) / p)
            return float(2 * total / p)
    terms = []
    for n in range(1, p - 1, 2):
        c = cot_derivative(0, math.pi * n / (2 * p))
        terms.append(c**3 / math.sin(math.pi * ((n * r) % (2 * p)) / p))
    return 2 * math.fsum(terms) / p


@lru_cache(maxsize=4096)
def _sigma2_exact_cached(x: Fraction) -> int:
    p = x.denominator
    value = p * p * s_odd_exact(2, x) - 2 * s_odd_exact(0, x)
    if value.denominator != 1:
        raise IntegralityError(f"sigma_2({x}) = {value} is not an integer")
    return value.numerator


def sigma2_exact(x) -> int:
    """p^2 S_2^odd(x) - 2 S_0^odd(x), checked to be an integer."""
    return _sigma2_exact_cached(_arg(x).x)


def odd_coprime_pairs(p_max: int, p_min: int = 3):
    """All (r, p) with 1 <= r < p <= p_max, both odd and coprime, sorted by p then r."""
    for p in range(max(3, p_min) | 1, p_max + 1, 2):
        for r in range(1, p, 2):
            if math.gcd(r, p) == 1:
                yield r, p


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrigIdentityReport:
    p: int
    x: Fraction
    sin_sum: float
    sin_expected: float
    cos_sum: float
    cos_expected: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return (
            abs(self.sin_sum - self.sin_expected) <= self.tolerance
            and abs(self.cos_sum - self.cos_expected) <= self.tolerance
        )


def trig_identity_checks(p: int, x, *, rel_tol: float = 1e-8) -> TrigIdentityReport:
    """sum_{n<p} 1/sin^2(pi n/p) = (p^2-1)/3 and
    sum_{n odd <= p-2} cos(pi n x)/sin^2(pi n x) = (-1)^(r+1) (p^2-1)/12.

    The second sum changes sign with the parity of r.
    """
    if p < 3 or p % 2 == 0:
        raise DomainError("p must be an odd integer >= 3")
    xf = as_fraction(x)
    r = xf.numerator
    if xf.denominator != p or math.gcd(r, p) != 1:
        raise DomainError(f"x must be r/{p} with r coprime to {p}")
    sin_sum = math.fsum(1 / math.sin(math.pi * n / p) ** 2 for n in range(1, p))
    cos_terms = []
    for n in range(1, p - 1, 2):
        theta = math.pi * ((n * r) % (2 * p)) / p
        cos_terms.append(math.cos(theta) / math.sin(theta) ** 2)
    sign = 1 if r % 2 else -1
    return TrigIdentityReport(
        p,
        xf,
        sin_sum,
        (p * p - 1) / 3,
        math.fsum(cos_terms),
        sign * (p * p - 1) / 12,
        rel_tol * p * p,
    )


@dataclass
class MainTheoremReport:
    p_max: int
    passed: int = 0
    failures: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def total(self) -> int:
        return self.passed + len(self.failures)

    @property
    def ok(self) -> bool:
        return not self.failures and self.passed > 0


def _check_pair(pair: tuple[int, int]):
    r, p = pair
    a = TQFTArgument(Fraction(r, p))
    expected = 2 * r * r + 2 * r * p + p * p - 1
    diff = sigma2_exact(a.image()) - sigma2_exact(a)
    return r, p, diff, expected


def verify_main_theorem(p_max: int, threads: int = 1) -> MainTheoremReport:
    """sigma_2(r/(2r+p)) - sigma_2(r/p) == 2r^2 + 2rp + p^2 - 1 for all pairs up to p_max."""
    if p_max < 3:
        raise DomainError("p_max must be at least 3")
    start = time.perf_counter()
    pairs = list(odd_coprime_pairs(p_max))
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_check_pair, pairs, chunksize=32))
    else:
        results = [_check_pair(pair) for pair in pairs]
    report = MainTheoremReport(p_max)
    for r, p, diff, expected in sorted(results, key=lambda t: (t[1], t[0])):
        if diff == expected:
            report.passed += 1
        else:
            report.failures.append({"r": r, "p": p, "difference": diff, "expected": expected})
    report.seconds = time.perf_counter() - start
    return report
