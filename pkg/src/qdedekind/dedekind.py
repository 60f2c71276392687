"""Generalized Dedekind sums attached to Eisenstein series of Gamma(N).

Conventions
-----------
``EisensteinSpec(k, N, chi, psi)`` denotes the weight-k form

    a_0 + sum_{n>=1} (sigma^{chi,psi}(n) + (-1)^k sigma^{chi-,psi-}(n)) q^{n/N},
    sigma^{chi,psi}(n) = sum_{d | n} chi(n/d) psi(d) d^(k-1),

multiplied by ``scale``.  Its Dedekind sum is S_f(x) = Lhat_f(k-1; x), the
completed twisted L-value at s = k-1.  The Bernoulli-form evaluation below
attaches psi (the map on the divisor carrying d^(k-1)) to B_{k-j}(m/Np) and
the DFT of chi to the twisted periodic Bernoulli factor; at j = 1 the
sawtooth is the symmetric one (zero at integers).

Maps vanishing at 0 are the supported case; for them the completed L-value
has no correction terms.  Everything is exact for level <= 2 with rational
maps and a rational scale, and complex floating point otherwise.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import mpmath

from .cotangent import PoleError, cot_derivative
from .exact_arith import (
    as_fraction,
    bernoulli_number,
    bernoulli_poly,
    periodic_bernoulli,
    scaled_bernoulli_table,
)
from .periodic import PeriodicMap, dft, odd_indicator, parity_signs, twisted_cot

__all__ = [
    "EisensteinSpec",
    "GammaMatrix",
    "PeriodPolynomial",
    "ExperimentalWarning",
    "odd_spec",
    "s_odd_exact",
    "s_odd_float",
    "s_odd_exponential",
    "lhat_value",
    "lhat_cot",
    "lhat_double_sum",
    "gen_dedekind_sum",
    "constant_term",
    "cusp_constant",
    "cusp_matrix",
    "period_polynomial",
    "reciprocity_defect",
    "gamma2_generators",
    "gammaN_generators",
    "word_ball",
    "is_close",
]


class ExperimentalWarning(UserWarning):
    """Evaluation outside the verified regime (maps not vanishing at 0)."""


def is_close(a, b, tol: float = 1e-9) -> bool:
    """Mixed absolute/relative comparison |a - b| <= tol * (1 + |b|)."""
    return abs(complex(a) - complex(b)) <= tol * (1.0 + abs(complex(b)))


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class GammaMatrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self.as_tuple()} is not 1")

    @classmethod
    def parse(cls, text: str) -> "GammaMatrix":
        parts = [int(t) for t in text.replace(";", ",").split(",")]
        if len(parts) != 4:
            raise ValueError("a matrix needs four entries a,b,c,d")
        return cls(*parts)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, other: "GammaMatrix") -> "GammaMatrix":
        return GammaMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "GammaMatrix":
        return GammaMatrix(self.d, -self.b, -self.c, self.a)

    def in_gamma(self, N: int) -> bool:
        """Membership in the principal congruence subgroup Gamma(N)."""
        return (self.a - 1) % N == 0 and (self.d - 1) % N == 0 and self.b % N == 0 and self.c % N == 0

    def act(self, z):
        """Moebius action; exact on Fractions, complex otherwise."""
        if isinstance(z, (int, Fraction)):
            z = Fraction(z)
            den = self.c * z + self.d
            if den == 0:
                raise ZeroDivisionError("c x + d = 0")
            return (self.a * z + self.b) / den
        return (self.a * z + self.b) / (self.c * z + self.d)

    def automorphy(self, z):
        return self.c * z + self.d


def gamma2_generators() -> list[GammaMatrix]:
    return [GammaMatrix(1, 2, 0, 1), GammaMatrix(1, 0, 2, 1)]


def gammaN_generators(N: int) -> list[GammaMatrix]:
    """A few elements of Gamma(N); for N = 2 these generate the group."""
    gens = [GammaMatrix(1, N, 0, 1), GammaMatrix(1, 0, N, 1)]
    if N > 2:
        gens.append(GammaMatrix(1 + N, N, -N, 1 - N))
    return gens


def word_ball(generators, radius: int) -> list[GammaMatrix]:
    """Distinct products of at most ``radius`` generators or their inverses."""
    letters = []
    for g in generators:
        letters.extend([g, g.inverse()])
    identity = GammaMatrix(1, 0, 0, 1)
    seen = {identity.as_tuple(): identity}
    frontier = [identity]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for g in letters:
                m = w @ g
                if m.as_tuple() not in seen:
                    seen[m.as_tuple()] = m
                    nxt.append(m)
        frontier = nxt
    return list(seen.values())


# ---------------------------------------------------------------------------
# Eisenstein data


@dataclass(frozen=True)
class EisensteinSpec:
    weight: int
    level: int
    chi: PeriodicMap
    psi: PeriodicMap
    scale: object = field(default=Fraction(1))

    def __post_init__(self):
        if self.weight < 2:
            raise ValueError("weight must be at least 2")
        if self.chi.modulus != self.level or self.psi.modulus != self.level:
            raise ValueError("chi and psi must be defined modulo the level")
        if isinstance(self.scale, int):
            object.__setattr__(self, "scale", Fraction(self.scale))

    @property
    def k(self) -> int:
        return self.weight

    @property
    def N(self) -> int:
        return self.level

    @property
    def exact(self) -> bool:
        return (
            self.level <= 2
            and self.chi.exact
            and self.psi.exact
            and isinstance(self.scale, Fraction)
        )

    @property
    def vanishes_at_origin(self) -> bool:
        return self.chi(0) == 0 and self.psi(0) == 0

    def parity(self):
        """(eps_chi, eps_psi); either entry may be None."""
        return parity_signs(self.chi), parity_signs(self.psi)


def odd_spec(k: int) -> EisensteinSpec:
    """The level-2 series sum_{n odd} sigma_{k-1}(n) q^{n/2}."""
    if k < 2 or k % 2:
        raise ValueError("the odd family needs an even weight >= 2")
    one2 = odd_indicator()
    return EisensteinSpec(k, 2, one2, one2, Fraction(1, 2))


def _reduced(x) -> tuple[int, int]:
    xf = as_fraction(x)
    return xf.numerator, xf.denominator


# ---------------------------------------------------------------------------
# level-2 sums


def _check_even(g: int) -> None:
    if g < 0 or g % 2:
        raise ValueError(f"g must be an even non-negative integer, got {g}")


def s_odd_exact(g: int, x) -> Fraction:
    """The level-2 Dedekind sum S_g^odd(x) as an exact rational.

    Evaluated through the Bernoulli-sum closed form on integer tables.
    """
    _check_even(g)
    r, p = _reduced(x)
    D = 2 * p
    table, M = scaled_bernoulli_table(g + 1, D)
    acc = 0
    for m in range(1, D, 2):
        u = (m * r) % D
        v = (u + p) % D
        acc += (table[u] - table[v]) * (2 * m - D)
    sign = -1 if (g // 2) % 2 else 1
    return Fraction(sign * 2 ** (2 * g + 1) * acc, (g + 1) * M * 2 * D)


def s_odd_float(g: int, x, *, extended: bool = False):
    """S_g^odd(x) from its cotangent definition, in floating point.

    Sums over odd 1 <= n < p; for odd p that is n <= p - 2.
    """
    _check_even(g)
    r, p = _reduced(x)
    if extended:
        pi = mpmath.pi
        total = mpmath.mpf(0)
        for n in range(1, p, 2):
            s = mpmath.sin(pi * ((n * r) % (2 * p)) / p)
            total += cot_derivative(g, pi * n / (2 * p), extended=True) / s
        return total / mpmath.mpf(p) ** (g + 1)
    terms = []
    for n in range(1, p, 2):
        s = math.sin(math.pi * ((n * r) % (2 * p)) / p)
        terms.append(cot_derivative(g, math.pi * n / (2 * p)) / s)
    return math.fsum(terms) / p ** (g + 1)


def s_odd_exponential(g: int, x) -> complex:
    """S_g^odd(x) from the double exponential sum over odd m, n < 2p."""
    _check_even(g)
    r, p = _reduced(x)
    D = 2 * p
    cots = {n: cot_derivative(g, math.pi * n / D) for n in range(1, D, 2)}
    total = 0j
    for m in range(1, D, 2):
        b1 = (2 * m - D) / (2 * D)
        inner = 0j
        for n in range(1, D, 2):
            # e(m n x / 2) = e(m n r / 2p)
            inner += cmath.exp(2j * math.pi * ((m * n * r) % D) / D) * cots[n]
        total += b1 * inner
    return 1j * total / p ** (g + 1)


# ---------------------------------------------------------------------------
# L-values


def _bernoulli_form_sum(spec: EisensteinSpec, j: int, r: int, p: int):
    """sum_{1<=m<Np} psi(m) B_{k-j}(m/Np) Bsym_j^{chi_hat}(m x / N).

    Inner sums are accumulated in integers per residue pair, then weighted.
    """
    k, N = spec.weight, spec.level
    D = N * p
    chi_hat = dft(spec.chi)
    ta, ma = scaled_bernoulli_table(k - j, D)
    tb, mb = scaled_bernoulli_table(j, D)
    if j == 1:
        tb = (0,) + tb[1:]
    psi_vals = spec.psi.values
    hat_vals = chi_hat.values
    active_b = [b for b in range(N) if hat_vals[b] != 0]
    acc = [[0] * N for _ in range(N)]
    for m in range(1, D):
        a = m % N
        if psi_vals[a] == 0:
            continue
        wa = ta[m]
        if wa == 0:
            continue
        base = (m * r) % D
        row = acc[a]
        for b in active_b:
            row[b] += wa * tb[(base + b * p) % D]
    denom = ma * mb
    if spec.exact:
        total = Fraction(0)
        for a in range(N):
            for b in active_b:
                if acc[a][b]:
                    total += psi_vals[a] * hat_vals[b] * Fraction(acc[a][b], denom)
        return total
    total = 0j
    for a in range(N):
        for b in active_b:
            if acc[a][b]:
                total += complex(psi_vals[a]) * complex(hat_vals[b]) * float(Fraction(acc[a][b], denom))
    return total


def _check_j(spec: EisensteinSpec, j: int) -> None:
    if not 1 <= j <= spec.weight - 1:
        raise ValueError(f"j must lie in [1, {spec.weight - 1}], got {j}")


def lhat_value(spec: EisensteinSpec, j: int, x):
    """Completed twisted L-value Lhat_f(j; x) for 1 <= j <= k-1.

    Exact for exact specs, complex otherwise.  Specs whose maps do not
    vanish at 0 go through :func:`_lhat_origin_terms` and emit an
    :class:`ExperimentalWarning`.
    """
    _check_j(spec, j)
    r, p = _reduced(x)
    k, N = spec.weight, spec.level
    main = _bernoulli_form_sum(spec, j, r, p)
    pref = Fraction(-(N ** (k - 1)) * p ** (k - j - 1), j * (k - j))
    value = pref * main if spec.exact else complex(pref) * main
    if not spec.vanishes_at_origin:
        warnings.warn(
            "maps not vanishing at 0: origin correction terms are experimental",
            ExperimentalWarning,
            stacklevel=2,
        )
        value = complex(value) + _lhat_origin_terms(spec, j, r, p)
    return value * spec.scale if spec.exact else complex(value) * complex(spec.scale)


def _lhat_origin_terms(spec: EisensteinSpec, j: int, r: int, p: int) -> complex:
    """Origin corrections to the Bernoulli form when chi(0) or psi(0) != 0.

    A literal transcription of the closed-form correction, with the map on
    the divisor and the cofactor map interchanged as in the main term.  Not
    cross-checked against an independent route; j = 1 would need zeta(1)
    and is rejected.
    """
    if j == 1:
        raise NotImplementedError("origin corrections at j = 1 need a regularised zeta(1)")
    k, N = spec.weight, spec.level
    D = N * p
    # role names of the closed form: ``div`` carries B_{k-j}, ``cof`` the twist
    div, cof = spec.psi, spec.chi
    cof_hat = dft(cof)
    d0, c0 = complex(div(0)), complex(cof(0))
    ch0 = complex(cof_hat(0))
    pi = mpmath.pi
    bj = float(bernoulli_number(j))
    bkj = float(bernoulli_number(k - j))
    star = mpmath.mpc(0)
    star += ((-1) ** j + (-1) ** (k - j)) * mpmath.zeta(j) * d0 * c0 * bkj
    if j % 2 == 0 and c0 != 0:
        tw = sum(
            complex(cof_hat(l)) * complex(cot_derivative(k - j - 1, math.pi * l / D))
            for l in range(1, D)
        )
        star -= (
            2 * (1j) ** k * 2.0 ** (2 * j - k) / mpmath.mpf(D) ** (k - j - 1)
            * (k - j) / mpmath.factorial(j) * bj * pi**j * c0 * tw
        )
        sgn = (-1) ** (j // 2 - 1)
        star += (
            2 * sgn * 2**j * bj * pi**j / mpmath.factorial(j)
            * (-d0 + (mpmath.mpf(N) ** (-(k - j - 1)) - 1) * ch0) * c0 * bkj
        )
    if d0 != 0:
        hz = mpmath.mpc(0)
        for n in range(1, D):
            w = (-1) ** k * complex(cof(n)) + complex(cof(-n))
            if w != 0:
                hz += w * mpmath.zeta(j, mpmath.mpf(n) / D)
        star += (-1) ** j * bkj * d0 * hz
    pref = -mpmath.mpf(N) ** (k - j - 1) / (2j * pi) ** j * mpmath.factorial(j - 1) / (k - j)
    pref *= mpmath.mpf(p) ** (k - 2 * j - 1)
    total = pref * star
    if c0 != 0:
        total += (
            mpmath.factorial(j - 1) / (2j * pi) ** j * mpmath.mpf(N) ** (k - 1 - j) / (k - j)
            * mpmath.mpf(p) ** (k - 2 * j - 1) * (1 + (-1) ** k) * c0 * mpmath.zeta(k - 1)
        )
    return complex(total)


def lhat_cot(spec: EisensteinSpec, j: int, x, *, extended: bool = False) -> complex:
    """Cotangent form of Lhat_f(j; x).

    Requires maps vanishing at 0 with parities eps*eps' = (-1)^(j-1).  The
    residues n divisible by p hit poles of the twisted cotangent and are
    taken from the exponential double sum instead (O(N^2 p) work).
    """
    _check_j(spec, j)
    if not spec.vanishes_at_origin:
        raise ValueError("the cotangent form needs chi(0) = psi(0) = 0")
    eps, eps2 = spec.parity()
    if eps is None or eps2 is None or eps * eps2 != (-1) ** (j - 1):
        raise ValueError("the cotangent form needs parities with eps*eps' = (-1)^(j-1)")
    r, p = _reduced(x)
    k, N = spec.weight, spec.level
    D = N * p
    psi_hat = dft(spec.psi)
    if extended:
        pi = mpmath.pi
        total = mpmath.mpc(0)
    else:
        pi = math.pi
        total = 0j
    for n in range(1, D):
        if n % p == 0:
            continue
        cn = spec.chi(n)
        if cn == 0:
            continue
        arg = pi * ((n * r) % (2 * D)) / D
        tc = twisted_cot(psi_hat, k - j - 1, arg, extended=extended)
        cc = complex(cn)
        w = mpmath.mpc(cc.real, cc.imag) if extended else cc
        total += w * tc * cot_derivative(j - 1, pi * n / D, extended=extended)
    pref = -((-1) ** j) * (1j) ** (-k) * 2.0 ** (-k) / p**j
    out = complex(total) * pref * complex(spec.scale)
    return out + _double_sum(spec, j, r, p, range(p, D, p))


def _double_sum(spec: EisensteinSpec, j: int, r: int, p: int, ns) -> complex:
    k, N = spec.weight, spec.level
    D = N * p
    ns = [n for n in ns if spec.chi(n) != 0]
    cots = {n: complex(spec.chi(n)) * cot_derivative(j - 1, math.pi * n / D) for n in ns}
    total = 0j
    for m in range(1, D):
        pm = spec.psi(m)
        if pm == 0:
            continue
        bm = float(bernoulli_poly(k - j, Fraction(m, D)))
        # e(m n x / N) = e(m n r / Np)
        inner = sum(cmath.exp(2j * math.pi * ((m * n * r) % D) / D) * cots[n] for n in ns)
        total += complex(pm) * bm * inner
    pref = -((1j) ** j) * N ** (k - j - 1) / (2**j * (k - j)) * float(p) ** (k - 2 * j - 1)
    return pref * total * complex(spec.scale)


def lhat_double_sum(spec: EisensteinSpec, j: int, x) -> complex:
    """Lhat_f(j; x) from the double sum over 1 <= m, n < Np (no parity needed).

    O((Np)^2); an independent oracle for :func:`lhat_value`.
    """
    _check_j(spec, j)
    if not spec.vanishes_at_origin:
        raise ValueError("the double-sum form needs chi(0) = psi(0) = 0")
    r, p = _reduced(x)
    return _double_sum(spec, j, r, p, range(1, spec.level * p))


def gen_dedekind_sum(spec: EisensteinSpec, x, *, method: str = "bernoulli"):
    """S_f(x) = Lhat_f(k-1; x).

    ``method="cot"`` uses the cotangent double sum, valid for maps vanishing
    at 0 with eps*eps' = (-1)^k.
    """
    if method == "bernoulli":
        return lhat_value(spec, spec.weight - 1, x)
    if method == "cot":
        return lhat_cot(spec, spec.weight - 1, x)
    if method == "double":
        return lhat_double_sum(spec, spec.weight - 1, x)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# constant terms


def constant_term(spec: EisensteinSpec):
    """a_0 = ((-N)^(k-1)/k) chi(0) sum_m psi(m) B~_k(m/N), times the scale."""
    k, N = spec.weight, spec.level
    c0 = spec.chi(0)
    if c0 == 0:
        return Fraction(0) if spec.exact else 0j
    pref = Fraction((-N) ** (k - 1), k)
    if spec.exact:
        s = sum(spec.psi(m) * periodic_bernoulli(k, Fraction(m, N)) for m in range(N))
        return pref * c0 * s * spec.scale
    s = sum(complex(spec.psi(m)) * float(periodic_bernoulli(k, Fraction(m, N))) for m in range(N))
    return float(pref) * complex(c0) * s * complex(spec.scale)


def cusp_matrix(x) -> GammaMatrix:
    """A matrix (r, r'; p, p') in SL_2(Z) sending infinity to x = r/p."""
    r, p = _reduced(x)
    # r p' - r' p = 1 via the extended Euclidean algorithm
    g, s, t = _egcd(r, p)
    assert g == 1
    return GammaMatrix(r, -t, p, s)


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, rr = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while rr:
        q = old_r // rr
        old_r, rr = rr, old_r - q * rr
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def cusp_constant(spec: EisensteinSpec, x):
    """Constant Fourier coefficient of f|_k delta at the cusp x = r/p."""
    r, p = _reduced(x)
    k, N = spec.weight, spec.level
    psi_hat = dft(spec.psi)
    pref = Fraction((-N) ** (k - 1), k)
    bt = [periodic_bernoulli(k, Fraction(m, N)) for m in range(N)]
    if spec.exact:
        total = Fraction(0)
        for l in range(N):
            w = spec.chi(-p * l) * psi_hat(r * l)
            if w == 0:
                continue
            total += w * sum((-1) ** (l * m) * bt[m] for m in range(N))
        return pref * total * spec.scale
    total = 0j
    for l in range(N):
        w = complex(spec.chi(-p * l)) * complex(psi_hat(r * l))
        if w == 0:
            continue
        inner = sum(cmath.exp(-2j * math.pi * ((l * m) % N) / N) * float(bt[m]) for m in range(N))
        total += w * inner
    return float(pref) * total * complex(spec.scale)


# ---------------------------------------------------------------------------
# period polynomials and reciprocity


@dataclass(frozen=True)
class PeriodPolynomial:
    """pole/(cX + d) + sum_i coeffs[i] X^i."""

    c: int
    d: int
    pole: object
    coeffs: tuple

    def __call__(self, X):
        acc = 0
        for a in reversed(self.coeffs):
            acc = acc * X + a
        if self.pole != 0:
            acc = acc + self.pole / (self.c * X + self.d)
        return acc

    @property
    def degree(self) -> int:
        deg = len(self.coeffs) - 1
        while deg > 0 and self.coeffs[deg] == 0:
            deg -= 1
        return deg


def _require_gamma(spec: EisensteinSpec, gamma: GammaMatrix) -> None:
    if not gamma.in_gamma(spec.level):
        raise ValueError(f"{gamma.as_tuple()} is not in Gamma({spec.level})")


@lru_cache(maxsize=4096)
def period_polynomial(spec: EisensteinSpec, gamma: GammaMatrix) -> PeriodPolynomial:
    """The regularized period polynomial R_{f,gamma}(X) for c != 0."""
    _require_gamma(spec, gamma)
    c, d = gamma.c, gamma.d
    if c == 0:
        raise ValueError("period polynomial needs c != 0; translations act trivially")
    k = spec.weight
    exact = spec.exact
    shift = Fraction(d, c)  # (cX + d)/c = X + d/c
    xprime = Fraction(-d, c)
    zero = Fraction(0) if exact else 0j
    coeffs = [zero] * k  # degree <= k-1

    def add_power(weight, e):
        for i in range(e + 1):
            term = comb(e, i) * shift ** (e - i)
            coeffs[i] += weight * (term if exact else float(term))

    for j in range(1, k):
        L = lhat_value(spec, j, xprime)
        add_power(-comb(k - 2, j - 1) * L, k - j - 1)
    a0 = constant_term(spec)
    pole = zero
    if a0 != 0:
        add_power(-a0 / (k - 1), k - 1)
        pole = -a0 / ((k - 1) * (-c) ** (k - 1))
    return PeriodPolynomial(c, d, pole, tuple(coeffs))


def reciprocity_defect(spec: EisensteinSpec, gamma: GammaMatrix, x):
    """Left side minus right side of the reciprocity law at x.

    Zero exactly on the rational path; small in floating point.  Matrices
    with c = 0 reduce to periodicity, where the period polynomial is 0.
    """
    _require_gamma(spec, gamma)
    xf = as_fraction(x)
    den = gamma.c * xf + gamma.d
    if den == 0:
        raise PoleError("c x + d = 0")
    k = spec.weight
    gx = gamma.act(xf)
    lhs = den ** (k - 2) * gen_dedekind_sum(spec, gx) - gen_dedekind_sum(spec, xf)
    if gamma.c == 0:
        return lhs
    R = period_polynomial(spec, gamma)
    p = xf.denominator
    a0x = cusp_constant(spec, xf)
    rhs = R(xf) - a0x / p**k * Fraction(gamma.c) / den
    return lhs - rhs
