"""Higher derivatives of the cotangent.

cot^(g)(z) = P_g(cot z) for an integer polynomial P_g with
P_0(u) = u and P_{g+1}(u) = -(1 + u^2) P_g'(u).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import mpmath

__all__ = ["CotDerivativePoly", "cot_derivative_poly", "cot_derivative", "PoleError"]


class PoleError(ValueError):
    """Raised when a cotangent argument lands on (or next to) a pole."""


@dataclass(frozen=True)
class CotDerivativePoly:
    order: int
    coefficients: tuple[int, ...]  # index i holds the coefficient of u^i

    def __call__(self, u):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * u + c
        return acc

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1


_lock = threading.Lock()
_polys: list[tuple[int, ...]] = [(0, 1)]


def cot_derivative_poly(g: int) -> CotDerivativePoly:
    if g < 0:
        raise ValueError("derivative order must be non-negative")
    if g >= len(_polys):
        with _lock:
            while len(_polys) <= g:
                prev = _polys[-1]
                deriv = [i * prev[i] for i in range(1, len(prev))]
                # -(1 + u^2) * deriv
                nxt = [0] * (len(deriv) + 2)
                for i, c in enumerate(deriv):
                    nxt[i] -= c
                    nxt[i + 2] -= c
                while len(nxt) > 1 and nxt[-1] == 0:
                    nxt.pop()
                _polys.append(tuple(nxt))
    return CotDerivativePoly(g, _polys[g])


def cot_derivative(g: int, theta, *, extended: bool = False):
    """cot^(g)(theta) in double precision, or as an mpmath number if extended.

    Raises PoleError when theta is a multiple of pi (to working precision).
    """
    poly = cot_derivative_poly(g)
    if extended or isinstance(theta, mpmath.mpf):
        t = mpmath.mpf(theta)
        s = mpmath.sin(t)
        if abs(s) < mpmath.mpf(10) ** (-mpmath.mp.dps + 3):
            raise PoleError(f"cot^({g}) has a pole at {theta}")
        return poly(mpmath.cos(t) / s)
    s = math.sin(theta)
    if abs(s) < 1e-300 or abs(s) < 4 * math.ulp(abs(theta)):
        raise PoleError(f"cot^({g}) has a pole at {theta}")
    return poly(math.cos(theta) / s)
