import math
import random
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qdedekind.cotangent import PoleError
from qdedekind.dedekind import (
    EisensteinSpec,
    ExperimentalWarning,
    GammaMatrix,
    constant_term,
    cusp_constant,
    cusp_matrix,
    gamma2_generators,
    gen_dedekind_sum,
    is_close,
    lhat_cot,
    lhat_double_sum,
    lhat_value,
    odd_spec,
    period_polynomial,
    reciprocity_defect,
    s_odd_exact,
    s_odd_exponential,
    s_odd_float,
    word_ball,
)
from qdedekind.exact_arith import bernoulli_number
from qdedekind.periodic import PeriodicMap, delta_map, random_map

reduced = st.builds(
    Fraction,
    st.integers(-60, 60),
    st.integers(1, 40),
)


# --- level-2 sums -----------------------------------------------------------


def test_known_values():
    assert s_odd_exact(0, Fraction(1, 3)) == Fraction(2, 3)
    assert s_odd_exact(2, Fraction(1, 3)) == Fraction(16, 27)
    assert s_odd_exact(0, Fraction(1, 5)) == Fraction(6, 5)
    assert s_odd_exact(0, 1) == 0 and s_odd_float(2, 1) == 0


@pytest.mark.parametrize("p", [3, 5, 7, 9, 31, 101])
def test_unit_fraction_closed_form(p):
    assert s_odd_exact(0, Fraction(1, p)) == (p - Fraction(1, p)) / 4


@settings(max_examples=60)
@given(st.sampled_from([0, 2, 4]), reduced)
def test_odd_and_two_periodic(g, x):
    s = s_odd_exact(g, x)
    assert s_odd_exact(g, -x) == -s
    assert s_odd_exact(g, x + 2) == s


@pytest.mark.parametrize("g", [0, 2, 4])
def test_exact_matches_float(g):
    for p in range(1, 40):
        for r in range(-p, p + 1):
            if math.gcd(r, p) != 1:
                continue
            x = Fraction(r, p)
            exact = s_odd_exact(g, x)
            assert is_close(s_odd_float(g, x), exact, 1e-9), x


@pytest.mark.parametrize("x", [Fraction(1, 3), Fraction(2, 5), Fraction(-4, 9), Fraction(3, 8)])
@pytest.mark.parametrize("g", [0, 2, 4])
def test_three_way_equality(g, x):
    exact = s_odd_exact(g, x)
    via_spec = (-1) ** (g // 2 + 1) * 2 ** (g + 2) * gen_dedekind_sum(odd_spec(g + 2), x)
    assert via_spec == exact
    assert is_close(s_odd_exponential(g, x), exact, 1e-9)


def test_extended_float():
    assert abs(float(s_odd_float(2, Fraction(7, 601), extended=True)) - float(s_odd_exact(2, Fraction(7, 601)))) < 1e-9


def test_rejects_odd_g():
    with pytest.raises(ValueError):
        s_odd_exact(1, Fraction(1, 3))


# --- general Eisenstein data -------------------------------------------------


def test_odd_spec_examples():
    assert gen_dedekind_sum(odd_spec(2), Fraction(1, 3)) == Fraction(-1, 6)
    unscaled = EisensteinSpec(4, 2, odd_spec(4).chi, odd_spec(4).psi)
    assert gen_dedekind_sum(unscaled, Fraction(1, 3)) == Fraction(2, 27)
    assert lhat_value(odd_spec(4), 3, Fraction(1, 3)) == gen_dedekind_sum(odd_spec(4), Fraction(1, 3))


def test_spec_validation():
    with pytest.raises(ValueError):
        EisensteinSpec(1, 2, delta_map(2), delta_map(2))
    with pytest.raises(ValueError):
        EisensteinSpec(4, 3, delta_map(2), delta_map(3))
    with pytest.raises(ValueError):
        odd_spec(3)
    with pytest.raises(ValueError):
        lhat_value(odd_spec(4), 4, Fraction(1, 3))


def test_constant_terms():
    assert constant_term(odd_spec(4)) == 0
    level_one = EisensteinSpec(4, 1, delta_map(1), delta_map(1))
    assert constant_term(level_one) == Fraction(-1, 4) * bernoulli_number(4)


@pytest.mark.parametrize("g", [0, 2, 4])
def test_cusp_constant_closed_form(g):
    spec = odd_spec(g + 2)
    for r, p in [(1, 3), (2, 3), (4, 5), (-3, 7), (1, 2), (3, 4)]:
        x = Fraction(r, p)
        expected = 0
        if p % 2:
            expected = (-1) ** (r + 1) * Fraction(2 ** (g + 2) - 1, 4 * (g + 2)) * bernoulli_number(g + 2)
        assert cusp_constant(spec, x) == expected
    assert cusp_constant(odd_spec(2), Fraction(1, 3)) == Fraction(1, 16)


def test_cusp_constant_transforms_with_sign():
    rng = random.Random(11)
    spec = EisensteinSpec(4, 3, random_map(3, rng), random_map(3, rng))
    gamma = GammaMatrix(4, 3, -3, -2)
    x = Fraction(2, 7)
    y = gamma.act(x)
    sign = 1 if gamma.c * x.numerator + gamma.d * x.denominator > 0 else -1
    assert is_close(cusp_constant(spec, y), sign**spec.weight * cusp_constant(spec, x), 1e-12)


def test_cusp_matrix():
    m = cusp_matrix(Fraction(-5, 12))
    assert (m.a, m.c) == (-5, 12)


# --- L-value routes ----------------------------------------------------------


@pytest.mark.parametrize("N", [3, 4, 5])
@pytest.mark.parametrize("k", [3, 4, 5, 6])
def test_lvalue_routes_agree(N, k):
    rng = random.Random(100 * N + k)
    for j in range(1, k):
        eps = rng.choice([1, -1])
        spec = EisensteinSpec(k, N, random_map(N, rng, parity=eps), random_map(N, rng, parity=eps * (-1) ** (j - 1)))
        for x in (Fraction(2, 7), Fraction(-3, 4), Fraction(5, 1)):
            ref = lhat_value(spec, j, x)
            assert is_close(lhat_cot(spec, j, x), ref, 1e-9)
            assert is_close(lhat_double_sum(spec, j, x), ref, 1e-9)


def test_double_sum_needs_no_parity():
    rng = random.Random(1)
    spec = EisensteinSpec(4, 3, random_map(3, rng), random_map(3, rng))
    x = Fraction(3, 5)
    for j in (1, 2, 3):
        assert is_close(lhat_double_sum(spec, j, x), lhat_value(spec, j, x), 1e-9)


def test_cot_form_rejects_wrong_parity():
    rng = random.Random(2)
    spec = EisensteinSpec(4, 3, random_map(3, rng, parity=1), random_map(3, rng, parity=-1))
    with pytest.raises(ValueError):
        gen_dedekind_sum(spec, Fraction(1, 5), method="cot")


def test_origin_terms_are_flagged():
    spec = EisensteinSpec(4, 3, PeriodicMap(3, (0, 1, 2)), PeriodicMap(3, (1, 0, 1)))
    with pytest.warns(ExperimentalWarning):
        lhat_value(spec, 2, Fraction(1, 2))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExperimentalWarning)
        with pytest.raises(NotImplementedError):
            lhat_value(spec, 1, Fraction(1, 2))


# --- matrices, period polynomials, reciprocity ------------------------------


def test_gamma_matrix_basics():
    A, B = gamma2_generators()
    assert (A @ A.inverse()).as_tuple() == (1, 0, 0, 1)
    assert A.in_gamma(2) and not A.in_gamma(3)
    assert GammaMatrix.parse("1,0,2,1") == B
    with pytest.raises(ValueError):
        GammaMatrix(1, 1, 1, 1)
    assert B.act(Fraction(1, 3)) == Fraction(1, 5)


def test_word_ball_size():
    assert len(word_ball(gamma2_generators(), 4)) == 161
    assert all(m.in_gamma(2) for m in word_ball(gamma2_generators(), 3))


def test_period_polynomials_of_level_two():
    gamma = GammaMatrix(1, 0, 2, 1)
    R2 = period_polynomial(odd_spec(2), gamma)
    assert R2.coeffs[0] == Fraction(-1, 8) and R2.degree == 0 and R2.pole == 0
    R4 = period_polynomial(odd_spec(4), gamma)
    assert list(R4.coeffs[:3]) == [Fraction(1, 16), Fraction(2, 16), Fraction(2, 16)]
    assert R4(Fraction(1, 3)) == (2 * Fraction(1, 9) + 2 * Fraction(1, 3) + 1) / 16


def test_period_polynomial_preconditions():
    with pytest.raises(ValueError):
        period_polynomial(odd_spec(2), GammaMatrix(1, 2, 0, 1))
    with pytest.raises(ValueError):
        period_polynomial(odd_spec(2), GammaMatrix(1, 0, 3, 1))


def test_reciprocity_examples():
    gamma = GammaMatrix(1, 0, 2, 1)
    assert reciprocity_defect(odd_spec(2), gamma, Fraction(1, 3)) == 0
    assert s_odd_exact(0, Fraction(1, 5)) - s_odd_exact(0, Fraction(1, 3)) == Fraction(8, 15)
    assert reciprocity_defect(odd_spec(4), gamma, Fraction(1, 3)) == 0
    lhs = Fraction(25, 9) * s_odd_exact(2, Fraction(1, 5)) - s_odd_exact(2, Fraction(1, 3))
    assert lhs == Fraction(256, 135)


def test_reciprocity_guards():
    with pytest.raises(ValueError):
        reciprocity_defect(odd_spec(2), GammaMatrix(1, 1, 0, 1), Fraction(1, 3))
    with pytest.raises(PoleError):
        reciprocity_defect(odd_spec(2), GammaMatrix(1, 0, 2, 1), Fraction(-1, 2))


@pytest.mark.parametrize("k", [2, 4, 6])
def test_reciprocity_exact_on_ball(k):
    spec = odd_spec(k)
    for gamma in word_ball(gamma2_generators(), 2):
        for p in range(1, 12):
            for r in range(-p, p + 1):
                if math.gcd(r, p) != 1:
                    continue
                x = Fraction(r, p)
                if gamma.c * x + gamma.d == 0:
                    continue
                assert reciprocity_defect(spec, gamma, x) == 0, (gamma, x)


def test_translation_is_periodicity():
    rng = random.Random(9)
    spec = EisensteinSpec(5, 4, random_map(4, rng), random_map(4, rng))
    x = Fraction(3, 7)
    assert abs(reciprocity_defect(spec, GammaMatrix(1, 4, 0, 1), x)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([3, 4]), st.sampled_from([3, 4, 5]))
def test_reciprocity_random_maps(seed, N, k):
    rng = random.Random(seed)
    spec = EisensteinSpec(k, N, random_map(N, rng), random_map(N, rng))
    gamma = rng.choice([GammaMatrix(1, 0, N, 1), GammaMatrix(1, 0, -N, 1), GammaMatrix(1 + N, N, -N, 1 - N)])
    p = rng.randrange(1, 15)
    r = rng.randrange(-20, 21)
    x = Fraction(r, p)
    if gamma.c * x + gamma.d == 0:
        return
    assert abs(reciprocity_defect(spec, gamma, x)) < 1e-8
