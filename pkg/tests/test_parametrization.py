from math import gcd

import pytest
from hypothesis import given, strategies as st

from conicpoints.counting import primitive_zeros_brute
from conicpoints.parametrization import (
    DegenerateParameter, adj_identity_holds, build_param_system, parameter_from_point,
    point_from_parameter, q_via_matrix, residue_classes, rho_star, rho_star_direct, tangent_parameter,
)
from conicpoints.quadform import Q0, Q1, SpecialConic, evaluate

coef = st.integers(-8, 8)
special = st.tuples(coef, coef, coef, coef, coef).filter(
    lambda c: c[0] * c[3] ** 2 - c[2] * c[3] * c[1] + c[4] * c[1] ** 2 != 0
).map(lambda c: SpecialConic(*c))


def test_pi_examples():
    assert build_param_system(Q0).Pi == ((0, -1, 0), (-1, 0, 0), (0, 0, -1))
    P1 = build_param_system(Q1)
    assert P1.Pi == ((3, 5, 0), (-1, 0, -7), (0, 3, 5)) and P1.delta == 88
    P0 = build_param_system(Q0)
    assert P0.q(3, 2) == (-6, -9, -4)


# desk oracle: independent double loops
RHO_Q1 = {1: 1, 2: 1, 3: 0, 4: 2, 8: 4, 11: 10, 22: 10, 44: 20, 88: 40, 121: 0}


def test_rho_star_desk_values():
    for n, v in RHO_Q1.items():
        assert rho_star(Q1, n) == v
        assert rho_star_direct(Q1, n) == v
        assert len(residue_classes(Q1, n)) == v


def test_points_from_parameters():
    P = build_param_system(Q0)
    assert point_from_parameter(P, 1, 1).point == (-1, -1, -1)
    pp = point_from_parameter(P, 2, 1)
    assert (pp.lam, pp.point) == (1, (-2, -4, -1))
    assert point_from_parameter(P, 0, 1).point == (0, 0, -1)
    assert parameter_from_point(P, (2, 4, 1)) == (2, 1)
    assert parameter_from_point(P, (0, 0, 1)) == (0, 1)
    assert parameter_from_point(P, (0, 1, 0)) is None
    with pytest.raises(ValueError):
        point_from_parameter(P, 2, 2)


def test_tangent_parameter():
    assert tangent_parameter(build_param_system(Q0)) == (1, 0)
    P = build_param_system(Q1)
    s, t = tangent_parameter(P)
    assert (s, t) == (-5, 3)
    assert point_from_parameter(P, s, t).exceptional


@given(special, st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_matrix_identities(S, s, t):
    P = build_param_system(S)
    assert q_via_matrix(P, s, t) == P.q(s, t)
    assert adj_identity_holds(P, s, t)


@given(special, st.integers(-50, 50), st.integers(1, 50))
def test_points_lie_on_conic(S, s, t):
    if gcd(s, t) != 1:
        return
    P = build_param_system(S)
    pp = point_from_parameter(P, s, t)
    assert evaluate(S, pp.point) == 0
    assert P.lambda_max % pp.lam == 0


@given(special)
def test_round_trip(S):
    P = build_param_system(S)
    for x in primitive_zeros_brute(S, None, 30).tolist():
        par = parameter_from_point(P, x)
        if par is None:
            assert tuple(x) in ((0, 1, 0), (0, -1, 0))
            continue
        pt = point_from_parameter(P, *par).point
        assert pt in (tuple(x), tuple(-v for v in x))


@given(special, st.integers(1, 60), st.integers(1, 60))
def test_rho_multiplicative_and_supported(S, m, n):
    P = build_param_system(S)
    if gcd(m, n) == 1:
        assert rho_star(S, m * n) == rho_star(S, m) * rho_star(S, n) == rho_star_direct(S, m * n)
    r = rho_star(S, n)
    assert r == rho_star_direct(S, n)
    assert r <= n * P.gcd_be
    if r:
        assert P.lambda_max % n == 0


def test_rho_cap():
    with pytest.raises(OverflowError):
        rho_star(SpecialConic(1, 0, 0, 2**20, 0), 2**20)
