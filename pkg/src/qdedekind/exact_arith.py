"""Exact rational arithmetic and the Bernoulli toolkit.

Every exact computation in the package reduces to Bernoulli polynomials
evaluated at rationals.  Rationals are plain :class:`fractions.Fraction`
objects, which already keep the denominator positive and the pair reduced.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from functools import lru_cache
from math import comb
from numbers import Rational as _RationalABC

__all__ = [
    "ReducedFraction",
    "Rational",
    "frac",
    "as_fraction",
    "bernoulli_number",
    "bernoulli_poly",
    "periodic_bernoulli",
    "hurwitz_zeta_nonpositive",
    "bernoulli_int_poly",
    "scaled_bernoulli_table",
]

# A reduced fraction r/p with p > 0; Fraction enforces exactly that.
ReducedFraction = Fraction
Rational = Fraction


def frac(r: int, p: int = 1) -> Fraction:
    """Build the reduced fraction r/p (sign moved to the numerator)."""
    if p == 0:
        raise ZeroDivisionError("denominator must be non-zero")
    return Fraction(r, p)


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and strings like ``"3/5"`` to a Fraction.

    Floats are rejected: silently rationalising a binary float would hide
    rounding errors in an exact pipeline.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


_bern_lock = threading.Lock()
_bern_cache: list[Fraction] = [Fraction(1)]


def bernoulli_number(j: int) -> Fraction:
    """B_j from t/(e^t - 1), so B_1 = -1/2.

    Uses the recurrence sum_{i<n} C(n, i) B_i = 0 (n >= 2) and memoizes
    the whole prefix.
    """
    if j < 0:
        raise ValueError("j must be non-negative")
    cache = _bern_cache
    if j < len(cache):
        return cache[j]
    with _bern_lock:
        while len(cache) <= j:
            n = len(cache)
            if n >= 3 and n % 2 == 1:
                cache.append(Fraction(0))
                continue
            s = sum(comb(n + 1, i) * cache[i] for i in range(n))
            cache.append(-s / (n + 1))
    return cache[j]


def bernoulli_poly(j: int, alpha) -> Fraction:
    """B_j(alpha) = sum_i C(j, i) B_i alpha^(j-i), exactly."""
    if j < 0:
        raise ValueError("j must be non-negative")
    a = as_fraction(alpha)
    # Horner in alpha over the binomially weighted Bernoulli numbers.
    acc = Fraction(0)
    for i in range(j + 1):
        acc = acc * a + comb(j, i) * bernoulli_number(i)
    return acc


def periodic_bernoulli(j: int, alpha) -> Fraction:
    """B_j(alpha - floor(alpha)).

    At integers with j = 1 this is B_1(0) = -1/2, not the symmetric
    Fourier-series value 0.
    """
    a = as_fraction(alpha)
    return bernoulli_poly(j, a - math.floor(a))


def hurwitz_zeta_nonpositive(j: int, alpha) -> Fraction:
    """zeta(-j; alpha) = -B_{j+1}(alpha)/(j+1) for j >= 0 and alpha > 0."""
    if j < 0:
        raise ValueError("j must be non-negative")
    a = as_fraction(alpha)
    if a <= 0:
        raise ValueError("Hurwitz zeta needs alpha > 0")
    return -bernoulli_poly(j + 1, a) / (j + 1)


@lru_cache(maxsize=None)
def bernoulli_int_poly(j: int) -> tuple[tuple[int, ...], int]:
    """Integer coefficients c_0..c_j and scale L with L*B_j(t) = sum c_i t^i."""
    coeffs = [comb(j, i) * bernoulli_number(j - i) for i in range(j + 1)]
    scale = 1
    for c in coeffs:
        scale = scale * c.denominator // math.gcd(scale, c.denominator)
    return tuple(int(c * scale) for c in coeffs), scale


@lru_cache(maxsize=2048)
def scaled_bernoulli_table(j: int, denom: int) -> tuple[tuple[int, ...], int]:
    """Integers T[u] = M * B_j(u/denom) for 0 <= u < denom, with M returned.

    M = L * denom**j, so every entry is an integer and sums of table entries
    stay in exact integer arithmetic.  This is the hot loop of every exact
    Dedekind-sum evaluation.
    """
    coeffs, scale = bernoulli_int_poly(j)
    powers = [denom ** (j - i) for i in range(j + 1)]
    weighted = [c * w for c, w in zip(coeffs, powers)]
    table = []
    for u in range(denom):
        acc = 0
        for i in range(j, -1, -1):
            acc = acc * u + weighted[i]
        table.append(acc)
    return tuple(table), scale * denom**j
