"""Periodic maps Z/NZ -> C, their discrete Fourier transforms and the
twisted Bernoulli / cotangent kernels built on them.

Maps whose values are all rational are *exact*.  The exact flag survives the
DFT only for N <= 2, where the roots of unity are +-1; every other level
moves to complex floating point.
"""

from __future__ import annotations

import cmath
import json
import math
from functools import lru_cache
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import mpmath

from .cotangent import PoleError, cot_derivative
from .exact_arith import as_fraction, periodic_bernoulli

__all__ = [
    "PeriodicMap",
    "dft",
    "idft_roundtrip",
    "twisted_periodic_bernoulli",
    "twisted_cot",
    "parity_signs",
    "odd_indicator",
    "delta_map",
    "constant_map",
    "random_map",
]


def _is_exact_value(v) -> bool:
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


@dataclass(frozen=True)
class PeriodicMap:
    """A map on Z/NZ; ``values[m]`` is the value at the residue m."""

    modulus: int
    values: tuple

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        vals = tuple(self.values)
        if len(vals) != self.modulus:
            raise ValueError(f"expected {self.modulus} values, got {len(vals)}")
        if all(_is_exact_value(v) for v in vals):
            vals = tuple(Fraction(v) for v in vals)
        else:
            vals = tuple(complex(v) for v in vals)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_values(cls, values: Iterable) -> "PeriodicMap":
        vals = tuple(values)
        return cls(len(vals), vals)

    @property
    def N(self) -> int:
        return self.modulus

    @property
    def exact(self) -> bool:
        return isinstance(self.values[0], Fraction)

    def __call__(self, m: int):
        return self.values[m % self.modulus]

    def __len__(self) -> int:
        return self.modulus

    def negated(self) -> "PeriodicMap":
        """m -> phi(-m)."""
        return PeriodicMap(self.modulus, tuple(self(-m) for m in range(self.modulus)))

    def scaled(self, c) -> "PeriodicMap":
        return PeriodicMap(self.modulus, tuple(c * v for v in self.values))

    def as_complex(self) -> tuple[complex, ...]:
        return tuple(complex(v) for v in self.values)

    def is_zero_at_origin(self) -> bool:
        return self.values[0] == 0

    def allclose(self, other: "PeriodicMap", tol: float = 1e-12) -> bool:
        if self.modulus != other.modulus:
            return False
        return all(abs(complex(a) - complex(b)) <= tol for a, b in zip(self.values, other.values))

    # JSON wire format: {"N": n, "values": [[re, im], ...]}
    def to_json(self) -> str:
        return json.dumps(
            {"N": self.modulus, "values": [[complex(v).real, complex(v).imag] for v in self.values]}
        )

    @classmethod
    def from_json(cls, text: str) -> "PeriodicMap":
        data = json.loads(text)
        try:
            n = int(data["N"])
            raw = data["values"]
        except (KeyError, TypeError) as exc:
            raise ValueError("periodic map JSON needs keys 'N' and 'values'") from exc
        vals = []
        for item in raw:
            if isinstance(item, (list, tuple)):
                if len(item) != 2:
                    raise ValueError("complex entries must be [re, im] pairs")
                re_, im_ = item
                if im_ == 0 and isinstance(re_, int):
                    vals.append(Fraction(re_))
                else:
                    vals.append(complex(float(re_), float(im_)))
            elif isinstance(item, str):
                vals.append(as_fraction(item))
            elif isinstance(item, int):
                vals.append(Fraction(item))
            else:
                vals.append(complex(item))
        if all(_is_exact_value(v) for v in vals):
            return cls(n, tuple(vals))
        return cls(n, tuple(complex(v) for v in vals))


def _e(x: float) -> complex:
    return cmath.exp(2j * math.pi * x)


@lru_cache(maxsize=512)
def dft(phi: PeriodicMap) -> PeriodicMap:
    """phi_hat(n) = (1/N) sum_m phi(m) e(-mn/N)."""
    N = phi.modulus
    if phi.exact and N <= 2:
        out = [sum(phi.values[m] * (-1) ** (m * n) for m in range(N)) / N for n in range(N)]
        return PeriodicMap(N, tuple(out))
    vals = phi.as_complex()
    out = []
    for n in range(N):
        s = sum(vals[m] * _e(-((m * n) % N) / N) for m in range(N))
        out.append(s / N)
    return PeriodicMap(N, tuple(out))


def idft_roundtrip(phi: PeriodicMap) -> PeriodicMap:
    """Rebuild phi(m) = sum_n phi_hat(n) e(mn/N) from the DFT of phi."""
    hat = dft(phi)
    N = phi.modulus
    if hat.exact and N <= 2:
        out = [sum(hat.values[n] * (-1) ** (m * n) for n in range(N)) for m in range(N)]
        return PeriodicMap(N, tuple(out))
    vals = hat.as_complex()
    out = [sum(vals[n] * _e(((m * n) % N) / N) for n in range(N)) for m in range(N)]
    return PeriodicMap(N, tuple(out))


def twisted_periodic_bernoulli(j: int, phi: PeriodicMap, z, *, symmetric: bool = False):
    """sum_{m mod N} phi(m) B~_j(z + m/N).

    Exact (a Fraction) for exact phi.  With ``symmetric=True`` and j = 1 the
    sawtooth takes the value 0 at integers instead of -1/2.
    """
    if j < 1:
        raise ValueError("j must be positive")
    zf = as_fraction(z)
    N = phi.modulus
    total = Fraction(0) if phi.exact else 0j
    for m, c in enumerate(phi.values):
        if c == 0:
            continue
        arg = zf + Fraction(m, N)
        if symmetric and j == 1 and arg.denominator == 1:
            continue
        b = periodic_bernoulli(j, arg)
        total += c * b if phi.exact else c * float(b)
    return total


def twisted_cot(phi: PeriodicMap, d: int, z, *, extended: bool = False):
    """sum_m phi(m) cot^(d)(z + pi m/N), skipping terms with phi(m) = 0.

    Returns a complex float, or an mpmath ``mpc`` when ``extended`` is set.
    """
    N = phi.modulus
    if extended:
        zz = mpmath.mpf(z)
        total = mpmath.mpc(0)
    else:
        zz = float(z)
        total = 0j
    for m, c in enumerate(phi.values):
        if c == 0:
            continue
        arg = zz + (mpmath.pi if extended else math.pi) * m / N
        try:
            val = cot_derivative(d, arg, extended=extended)
        except PoleError as exc:
            raise PoleError(f"twisted cot pole at z={z}, m={m}") from exc
        cc = complex(c)
        total += (mpmath.mpc(cc.real, cc.imag) if extended else cc) * val
    return total


def parity_signs(phi: PeriodicMap, tol: float = 1e-12):
    """+1 for an even map, -1 for an odd one, None otherwise.

    The zero map is reported as even.
    """
    N = phi.modulus
    pairs = [(phi(m), phi(-m)) for m in range(N)]
    if phi.exact:
        if all(a == b for a, b in pairs):
            return 1
        if all(a == -b for a, b in pairs):
            return -1
        return None
    if all(abs(a - b) <= tol for a, b in pairs):
        return 1
    if all(abs(a + b) <= tol for a, b in pairs):
        return -1
    return None


def odd_indicator(N: int = 2) -> PeriodicMap:
    """Indicator of the odd residues; the level-2 map (0, 1)."""
    if N != 2:
        raise ValueError("the odd indicator is only defined on Z/2Z")
    return PeriodicMap(2, (0, 1))


def delta_map(N: int, a: int = 0) -> PeriodicMap:
    return PeriodicMap(N, tuple(1 if m == a % N else 0 for m in range(N)))


def constant_map(N: int, c=1) -> PeriodicMap:
    return PeriodicMap(N, (c,) * N)


def random_map(
    N: int,
    rng,
    *,
    parity: int | None = None,
    zero_at_origin: bool = True,
) -> PeriodicMap:
    """Random complex map drawn from ``rng`` (a ``random.Random``).

    ``parity`` forces phi(-m) = parity * phi(m).
    """
    vals: list = [0j] * N
    for m in range(N):
        if zero_at_origin and m == 0:
            continue
        partner = (-m) % N
        if parity is not None and partner < m:
            vals[m] = parity * vals[partner]
            continue
        v = complex(rng.gauss(0, 1), rng.gauss(0, 1))
        if parity is not None and partner == m:
            # self-paired residue (0 or N/2): odd maps must vanish there
            v = v if parity == 1 else 0j
        vals[m] = v
    return PeriodicMap(N, tuple(vals))
