from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conicpoints.densities import (
    c_prime, count_Nstar_mod, euler_double_sum, jordan_odd, peyre_constant, sigma_infinity, sigma_p,
    sigma_p_prime,
)
from conicpoints.harness import make_rng, random_unimodular
from conicpoints.norms import IsometricNorm, compose_with_matrix
from conicpoints.quadform import Q0, Q1, SpecialConic, TernaryQuadraticForm, transform

coef = st.integers(-5, 5)
forms = st.lists(coef, min_size=6, max_size=6)


def _form(c):
    try:
        return TernaryQuadraticForm(*c)
    except ValueError:
        return None


def test_nstar_desk_values():
    expected = {(2, 1): 3, (2, 2): 12, (2, 3): 48, (3, 1): 8, (3, 2): 72, (5, 1): 24}
    for (p, n), v in expected.items():
        for method in ("direct", "ball", "auto"):
            assert count_Nstar_mod(Q0, p, n, method) == v
    with pytest.raises(OverflowError):
        count_Nstar_mod(Q0, 2, 20)


def test_sigma_p_examples():
    assert sigma_p(Q0, 2) == Fraction(3, 4)
    assert sigma_p(Q0, 3) == Fraction(8, 9)
    assert sigma_p(Q0, 5) == Fraction(24, 25)
    assert sigma_p(Q1, 2) == sigma_p(Q1, 2, method="ball") == Fraction(3, 2)
    assert sigma_p(Q1, 11) == sigma_p(Q1, 11, method="ball") == Fraction(20, 11)


@given(forms, st.sampled_from([2, 3, 5]), st.integers(1, 3))
def test_nstar_methods_agree(c, p, n):
    Q = _form(c)
    if Q is None or p**n > 125:
        return
    direct = count_Nstar_mod(Q, p, n, "direct")
    assert count_Nstar_mod(Q, p, n, "ball") == direct
    if p > 2:
        assert count_Nstar_mod(Q, p, n, "jordan") == direct


@given(forms, st.sampled_from([3, 5, 7]))
def test_sigma_p_jordan_vs_ball(c, p):
    Q = _form(c)
    if Q is None:
        return
    assert sigma_p(Q, p, "jordan") == sigma_p(Q, p, "ball")


def test_jordan_example():
    assert jordan_odd(Q0, 3) == ((0, -1), (0, 1), (0, 1))
    assert [e for e, _ in jordan_odd(TernaryQuadraticForm(1, 0, 0, 3, 0, 9), 3)] == [0, 1, 2]


def test_sigma_infinity_examples():
    assert sigma_infinity(Q0) == pytest.approx(8.0, rel=1e-9)
    assert sigma_infinity(TernaryQuadraticForm(1, 0, 0, 1, 0, 1)) == 0.0
    # a norm stretched in one coordinate: same value by both methods
    N = IsometricNorm.diag(1, 1, 2)
    assert sigma_infinity(Q0, N) == pytest.approx(sigma_infinity(Q0, N, method="epsilon", tol=0.005), rel=0.01)
    assert sigma_infinity(Q0.form.scaled(2)) == pytest.approx(4.0, rel=1e-9)
    with pytest.raises(ValueError):
        sigma_infinity(Q0, tol=0.1)


@settings(max_examples=12)
@given(forms)
def test_sigma_infinity_methods_agree(c):
    Q = _form(c)
    if Q is None:
        return
    a = sigma_infinity(Q)
    b, err = sigma_infinity(Q, method="epsilon", tol=0.005, with_error=True)
    assert abs(a - b) <= 0.02 * abs(a) + 3 * err + 1e-9


@settings(max_examples=15)
@given(forms, st.integers(0, 2**32))
def test_sigma_infinity_invariance(c, seed):
    Q = _form(c)
    if Q is None:
        return
    M = random_unimodular(make_rng(seed))
    N = IsometricNorm.diag(1, 2, 3)
    a = sigma_infinity(Q, N)
    b = sigma_infinity(transform(Q, M), compose_with_matrix(N, M))
    assert a == pytest.approx(b, rel=1e-6, abs=1e-9)


def test_peyre_constant_examples():
    rep = peyre_constant(Q0)
    assert rep.c_Q == pytest.approx(24 / 3.141592653589793**2, rel=1e-6)
    assert rep.sigma_p_list == {2: Fraction(3, 4)}
    # scaling the form halves the real density, and 2 becomes the only change at p = 2
    r2 = peyre_constant(Q0.form.scaled(2))
    assert r2.sigma_infinity == pytest.approx(4.0)
    anis = peyre_constant(TernaryQuadraticForm(1, 0, 0, 1, 0, 1))
    assert anis.c_Q == 0 and anis.diagnostics


def test_sigma_p_prime_examples():
    assert sigma_p_prime(Q0, 7) == 1 - Fraction(1, 49)
    assert sigma_p_prime(Q1, 11) == Fraction(20, 11)
    assert sigma_p_prime(Q1, 3) == Fraction(8, 9)
    rep = c_prime(Q0)
    assert rep.c_prime_Q == pytest.approx(12 / 3.141592653589793**2, rel=1e-6)
    assert rep.euler_check["ok"]


def test_c_prime_with_common_factor():
    S = SpecialConic(1, 2, 3, 4, 5)  # gcd(b, e) = 2
    rep = c_prime(S, m_cut=20000)
    assert rep.euler_check["ok"]
    assert set(rep.sigma_p_prime_list) <= {2, 3, 5, 7, 11, 13}


@given(st.tuples(coef, coef, coef, coef, coef).filter(
    lambda c: c[0] * c[3] ** 2 - c[2] * c[3] * c[1] + c[4] * c[1] ** 2 != 0))
def test_euler_identity(c):
    S = SpecialConic(*c)
    rep = c_prime(S, m_cut=5000)
    assert rep.euler_check["ok"], rep.euler_check
