"""q-expansions, Eichler integrals, theta functions and radial limits.

All series are summed directly in q^{n/N} = e(n tau / N); tau is first
reduced modulo N in its real part so large real parts cost no accuracy.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .dedekind import (
    EisensteinSpec,
    GammaMatrix,
    constant_term,
    cusp_constant,
    odd_spec,
    period_polynomial,
    s_odd_exact,
)
from .exact_arith import as_fraction

__all__ = [
    "PrecisionError",
    "PrecisionWarning",
    "UpperHalfPoint",
    "QSeries",
    "eisenstein_coeffs",
    "eichler_qseries",
    "odd_eichler",
    "theta",
    "eichler_transform_residual",
    "AsymptoticReport",
    "asymptotic_check",
    "radial_limit_sigma2",
    "DEFAULT_T_GRID",
    "RADIAL_T_GRID",
]

IM_FLOOR = 1e-4
N_CAP = 20_000_000
TAIL_EPS = 1e-14
DEFAULT_T_GRID = (0.002, 0.001, 0.0005, 0.00025)
RADIAL_T_GRID = (0.0008, 0.0004, 0.0002, 0.0001)


class PrecisionError(ValueError):
    """tau is too close to the real line for the requested accuracy."""


class PrecisionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class UpperHalfPoint:
    tau: complex

    def __post_init__(self):
        tau = complex(self.tau)
        if not tau.imag > 0:
            raise ValueError(f"tau must lie in the upper half plane, got {tau}")
        object.__setattr__(self, "tau", tau)

    @property
    def q(self) -> complex:
        return cmath.exp(2j * math.pi * self.tau)


def _tau(tau) -> complex:
    return tau.tau if isinstance(tau, UpperHalfPoint) else UpperHalfPoint(tau).tau


def _terms_needed(rho: float, growth: float, eps: float, cap: int) -> int:
    """Smallest M with sum_{n>M} n^growth rho^n below eps (rough geometric bound)."""
    if rho <= 0.0:
        return 1
    log_rho = math.log(rho)
    M = max(8, int(math.ceil((math.log(eps) - 2.0) / log_rho)))
    while M <= cap:
        tail = M**growth * rho ** (M + 1) / (1.0 - rho)
        if tail < eps:
            return M
        M = int(M * 1.25) + 8
    raise PrecisionError(f"more than {cap} terms needed (Im tau too small)")


def _phases(tau: complex, N: int, M: int) -> np.ndarray:
    """e(n tau / N) for n = 0..M, with Re(tau) reduced modulo N."""
    t = complex(math.fmod(tau.real, N), tau.imag)
    n = np.arange(M + 1, dtype=np.float64)
    return np.exp((2j * math.pi / N) * t * n)


@dataclass
class QSeries:
    """sum_n coeffs[n] q^{n/N}."""

    level: int
    coeffs: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, tau) -> complex:
        t = _tau(tau)
        return complex(np.dot(self.coeffs, _phases(t, self.level, self.n_max)))


def _divisor_sieve(spec: EisensteinSpec, n_max: int) -> np.ndarray:
    """sigma^{chi,psi}(n) + (-1)^k sigma^{chi-,psi-}(n) for n = 0..n_max."""
    k, N = spec.weight, spec.level
    chi = np.array(spec.chi.as_complex())
    psi = np.array(spec.psi.as_complex())
    out = np.zeros(n_max + 1, dtype=np.complex128)
    sign = (-1) ** k
    for d in range(1, n_max + 1):
        w_plus = psi[d % N]
        w_minus = psi[(-d) % N]
        if w_plus == 0 and w_minus == 0:
            continue
        m = np.arange(1, n_max // d + 1)
        dk = float(d) ** (k - 1)
        out[d::d] += dk * (w_plus * chi[m % N] + sign * w_minus * chi[(-m) % N])
    return out


def eisenstein_coeffs(spec: EisensteinSpec, n_max: int) -> QSeries:
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    a = _divisor_sieve(spec, n_max)
    a[0] = complex(constant_term(spec)) / complex(spec.scale)
    return QSeries(spec.level, a * complex(spec.scale))


@lru_cache(maxsize=16)
def _odd_eichler_coeffs(g: int, n_max: int) -> np.ndarray:
    """sigma_{-g-1}(n) on odd n, zero on even n."""
    a = np.zeros(n_max + 1)
    for d in range(1, n_max + 1, 2):
        a[d :: 2 * d] += float(d) ** (-g - 1)
    return a


@lru_cache(maxsize=16)
def _eichler_coeffs(spec: EisensteinSpec, n_max: int) -> np.ndarray:
    a = _divisor_sieve(spec, n_max) * complex(spec.scale)
    n = np.arange(n_max + 1, dtype=np.float64)
    n[0] = 1.0
    a = a / n ** (spec.weight - 1)
    a[0] = 0.0
    return a


def _bucket(M: int) -> int:
    # round up so cached coefficient arrays are shared between nearby tau
    return 1 << max(6, (M - 1).bit_length())


def odd_eichler(g: int, tau, *, eps: float = TAIL_EPS, im_floor: float = IM_FLOOR, extended: bool = False):
    """E_{-g}^odd(tau) = sum_{n odd} sigma_{-g-1}(n) q^{n/2}."""
    if g < 0 or g % 2:
        raise ValueError("g must be an even non-negative integer")
    t = _tau(tau)
    if t.imag < im_floor and not extended:
        raise PrecisionError(f"Im tau = {t.imag} below the floor {im_floor}; use extended precision")
    rho = math.exp(-math.pi * t.imag)
    M = _terms_needed(rho, 1.0, eps, N_CAP)
    if extended:
        return _odd_eichler_mp(g, t, M)
    a = _odd_eichler_coeffs(g, _bucket(M))
    return complex(np.dot(a[: M + 1], _phases(t, 2, M)))


def _odd_eichler_mp(g: int, t: complex, M: int):
    x = mpmath.exp(mpmath.pi * 1j * mpmath.mpc(math.fmod(t.real, 2), t.imag))
    coeffs = _odd_eichler_coeffs(g, _bucket(M))
    total = mpmath.mpc(0)
    xn = x
    x2 = x * x
    for n in range(1, M + 1, 2):
        total += coeffs[n] * xn
        xn *= x2
    return total


def eichler_qseries(f, tau, *, eps: float = TAIL_EPS, im_floor: float = IM_FLOOR) -> complex:
    """Eichler integral as a q-series.

    ``f`` is either an even integer g (giving E_{-g}^odd) or an
    :class:`EisensteinSpec`, for which the normalized integral
    -(N/2 pi i)^(k-1) (k-2)! sum a_n n^(1-k) q^{n/N} is returned.
    """
    if isinstance(f, int):
        return complex(odd_eichler(f, tau, eps=eps, im_floor=im_floor))
    spec = f
    t = _tau(tau)
    if t.imag < im_floor:
        raise PrecisionError(f"Im tau = {t.imag} below the floor {im_floor}")
    k, N = spec.weight, spec.level
    rho = math.exp(-2 * math.pi * t.imag / N)
    amp = max(abs(complex(v)) for v in spec.chi.values + spec.psi.values) or 1.0
    M = _terms_needed(rho, 1.0, eps / (amp * amp), N_CAP)
    a = _eichler_coeffs(spec, _bucket(M))
    s = complex(np.dot(a[: M + 1], _phases(t, N, M)))
    return -((N / (2j * math.pi)) ** (k - 1)) * math.factorial(k - 2) * s


def theta(which: int, tau, *, eps: float = TAIL_EPS) -> complex:
    """Jacobi theta_2, theta_3, theta_4 from their product formulas.

    Nome x = e^{pi i tau}:
        theta_3 = prod (1 - x^{2n})(1 + x^{2n-1})^2
        theta_4 = prod (1 - x^{2n})(1 - x^{2n-1})^2
        theta_2 = 2 x^{1/4} prod (1 - x^{2n})(1 + x^{2n})^2
    """
    if which not in (2, 3, 4):
        raise ValueError("which must be 2, 3 or 4")
    t = _tau(tau)
    rho = math.exp(-math.pi * t.imag)
    M = _terms_needed(rho, 0.0, eps, N_CAP)
    # x^m for m = 0..2M; reducing Re(tau) mod 8 keeps x^{1/4} on the same branch
    tr = complex(math.fmod(t.real, 8.0), t.imag)
    m = np.arange(2 * M + 1, dtype=np.float64)
    xp = np.exp(1j * math.pi * tr * m)
    even = xp[2::2]
    odd = xp[1::2]
    base = np.prod(1.0 - even)
    if which == 3:
        return complex(base * np.prod((1.0 + odd) ** 2))
    if which == 4:
        return complex(base * np.prod((1.0 - odd) ** 2))
    return complex(2.0 * cmath.exp(0.25j * math.pi * tr) * base * np.prod((1.0 + even) ** 2))


def eichler_transform_residual(spec: EisensteinSpec, gamma: GammaMatrix, tau, *, im_floor: float = 1e-3) -> complex:
    """(c tau + d)^(k-2) E(gamma tau) - E(tau) - R_{f,gamma}(tau); should vanish."""
    if not gamma.in_gamma(spec.level):
        raise ValueError(f"{gamma.as_tuple()} is not in Gamma({spec.level})")
    t = _tau(tau)
    gt = gamma.act(t)
    if gt.imag < im_floor:
        warnings.warn(f"Im(gamma tau) = {gt.imag:.3g} is small; the residual may lose accuracy", PrecisionWarning, stacklevel=2)
    k = spec.weight
    lhs = (gamma.c * t + gamma.d) ** (k - 2) * eichler_qseries(spec, gt, im_floor=0.0) - eichler_qseries(spec, t)
    if gamma.c == 0:
        return lhs
    return lhs - complex(period_polynomial(spec, gamma)(t))


# ---------------------------------------------------------------------------
# radial asymptotics


@dataclass(frozen=True)
class AsymptoticReport:
    g: int
    x: Fraction
    t_grid: tuple
    fitted_constant: complex
    expected_constant: complex
    log_constant: float
    deviation: float
    slope: complex
    residual: float
    refined_residual: float
    richardson: complex | None = None

    def residual_shrinks(self, noise: float = 1e-10) -> bool:
        """Refining the grid reduces the fit residual (or both are at round-off)."""
        if math.isnan(self.refined_residual):
            return False
        return self.refined_residual < self.residual or max(self.residual, self.refined_residual) < noise


def _check_grid(t_grid) -> tuple:
    grid = tuple(float(t) for t in t_grid)
    if len(grid) < 3:
        raise ValueError("need at least 3 grid points for a stable linear fit")
    if any(t <= 0 for t in grid):
        raise ValueError("grid points must be positive")
    if any(a <= b for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly descending")
    if grid[-1] < IM_FLOOR:
        raise PrecisionError(f"grid point {grid[-1]} below the precision floor {IM_FLOOR}")
    return grid


def _linear_fit(ts, values) -> tuple[complex, complex, float]:
    """Least squares values ~ A + B t; returns (A, B, rms residual)."""
    t = np.asarray(ts)
    v = np.asarray(values, dtype=np.complex128)
    design = np.column_stack([np.ones_like(t), t])
    coef, *_ = np.linalg.lstsq(design.astype(np.complex128), v, rcond=None)
    resid = v - design @ coef
    return complex(coef[0]), complex(coef[1]), float(np.sqrt(np.mean(np.abs(resid) ** 2)))


def _pole_removed(g: int, x: Fraction, t: float) -> complex:
    p = x.denominator
    tau = 1j * t
    a0x = float(cusp_constant(odd_spec(g + 2), x))
    pole = -((math.pi * 1j) ** (g + 1)) / math.factorial(g + 1) * a0x / p ** (g + 2) / tau
    return complex(odd_eichler(g, complex(float(x), t))) - pole


def asymptotic_check(g: int, x, t_grid=DEFAULT_T_GRID, *, richardson: bool = False) -> AsymptoticReport:
    """Fit the pole-subtracted Eichler integral E_{-g}^odd(x + it) by A + B t.

    A should be i pi^(g+1) / (2^(g+2) g!) * S_g^odd(x).  For g = 0 the
    logarithmic weight-2 integral carries an extra real constant
    4 log(2) a_0^(x), reported as ``log_constant`` and included in
    ``deviation``.
    """
    if g < 0 or g % 2:
        raise ValueError("g must be an even non-negative integer")
    xf = as_fraction(x)
    grid = _check_grid(t_grid)
    values = [_pole_removed(g, xf, t) for t in grid]
    A, B, res = _linear_fit(grid, values)
    refined = tuple(t / 2 for t in grid)
    if refined[-1] >= IM_FLOOR:
        _, _, res_refined = _linear_fit(refined, [_pole_removed(g, xf, t) for t in refined])
    else:
        res_refined = float("nan")
    expected = 1j * math.pi ** (g + 1) / (2 ** (g + 2) * math.factorial(g)) * float(s_odd_exact(g, xf))
    log_c = 4 * math.log(2) * float(cusp_constant(odd_spec(2), xf)) if g == 0 else 0.0
    rich = None
    if richardson:
        t0 = grid[-1]
        rich = 2 * _pole_removed(g, xf, t0 / 2) - _pole_removed(g, xf, t0)
    return AsymptoticReport(g, xf, grid, A, expected, log_c, abs(A - expected - log_c), B, res, res_refined, rich)


def radial_limit_sigma2(x, t_grid=RADIAL_T_GRID) -> float:
    """Limit of p^2 (32/(pi^3 i)) E_{-2}^odd - (8/(pi i)) E_0^odd - 1/(3 p^2 tau) at tau -> 0.

    The limit is approached along tau = i t and extrapolated linearly in t.
    """
    xf = as_fraction(x)
    r, p = xf.numerator, xf.denominator
    if not (1 <= r < p and r % 2 and p % 2):
        raise ValueError("x = r/p needs odd coprime 1 <= r < p")
    grid = _check_grid(t_grid)
    xr = float(xf)
    values = []
    for t in grid:
        tau = 1j * t
        e2 = complex(odd_eichler(2, xr + tau))
        e0 = complex(odd_eichler(0, xr + tau))
        values.append(p * p * 32 / (math.pi**3 * 1j) * e2 - 8 / (math.pi * 1j) * e0 - 1 / (3 * p * p * tau))
    A, _, _ = _linear_fit(grid, values)
    return A.real
