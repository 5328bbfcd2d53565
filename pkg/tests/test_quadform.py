import pytest
from hypothesis import given, strategies as st

from conicpoints.arith import det3
from conicpoints.quadform import (
    Q0, Q1, SpecialConic, TernaryQuadraticForm, UnimodularMatrix, delta_gcd_minors, discriminant,
    evaluate, gram_doubled, height, transform,
)
from conicpoints.harness import make_rng, random_unimodular

coef = st.integers(-9, 9)


def test_gram_and_invariants():
    assert gram_doubled(Q0) == [[2, 0, 0], [0, 0, -1], [0, -1, 0]]
    assert gram_doubled(Q1) == [[2, 3, 0], [3, 0, 5], [0, 5, 14]]
    assert Q0.delta == 1 and Q1.delta == 88
    assert [delta_gcd_minors(q) for q in (Q0, Q1, Q0.form.scaled(2))] == [1, 1, 4]
    assert [height(q) for q in (Q0, Q1, Q1.form.scaled(2))] == [1, 7, 14]
    assert evaluate(Q0, (1, 1, 1)) == 0
    assert evaluate(Q0, (2, 4, 1)) == 0
    assert evaluate(Q1, (1, 1, 1)) == 16


def test_rejects_degenerate():
    with pytest.raises(ValueError):
        SpecialConic(0, 0, 0, 1, 0)
    with pytest.raises(ValueError):
        TernaryQuadraticForm(0, 0, 0, 0, 0, 0)
    with pytest.raises(ValueError):
        TernaryQuadraticForm(1, 2, 0, 1, 0, 0)  # (x+y)^2
    with pytest.raises(ValueError):
        UnimodularMatrix(((2, 0, 0), (0, 1, 0), (0, 0, 1)))


def test_transform_examples():
    assert transform(Q1, UnimodularMatrix.identity()) == Q1.form
    shear = UnimodularMatrix(((1, 1, 0), (0, 1, 0), (0, 0, 1)))
    # (x + y)^2 - yz
    assert transform(Q0, shear).coefficients == (1, 2, 0, 1, -1, 0)
    swap = UnimodularMatrix(((-1, 0, 0), (0, 0, 1), (0, 1, 0)))
    Q = transform(Q0, swap)
    assert Q.c011 == -1 and abs(discriminant(Q)) == 1


@given(coef, coef, coef, coef, coef)
def test_special_discriminant_matches_matrix(a, b, d, e, f):
    if a * e * e - d * e * b + f * b * b == 0:
        return
    S = SpecialConic(a, b, d, e, f)
    assert det3(gram_doubled(S)) == -2 * S.delta
    assert discriminant(S.form) == S.delta
    assert SpecialConic.from_json(S.to_json()) == S


@given(st.lists(coef, min_size=6, max_size=6), st.integers(0, 2**32))
def test_transform_invariants(c, seed):
    try:
        Q = TernaryQuadraticForm(*c)
    except ValueError:
        return
    M = random_unimodular(make_rng(seed))
    Qm = transform(Q, M)
    assert discriminant(Qm) == discriminant(Q)
    assert delta_gcd_minors(Qm) == delta_gcd_minors(Q)
    x = (3, -1, 2)
    assert evaluate(Qm, x) == evaluate(Q, M.apply(x))
    assert transform(Qm, M.inverse()) == Q
