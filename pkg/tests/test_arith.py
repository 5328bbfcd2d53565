from fractions import Fraction
from math import gcd, isqrt

import numpy as np
from hypothesis import given, strategies as st

from conicpoints.arith import (
    adjugate3, det3, divisors, egcd, exact_sqrt, floor_frac, inverse3, isqrt_array, matmul3,
    mobius, round_div, valuation,
)

ints = st.integers(-10**12, 10**12)


@given(ints, ints)
def test_egcd_bezout(a, b):
    g, u, v = egcd(a, b)
    assert g == gcd(a, b)
    assert u * a + v * b == g


@given(ints, ints.filter(lambda b: b != 0))
def test_round_div_is_nearest(a, b):
    q = round_div(a, b)
    assert abs(Fraction(a, b) - q) <= Fraction(1, 2)


def test_small_helpers():
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert [mobius(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    assert valuation(88, 2) == 3
    assert exact_sqrt(49) == 7 and exact_sqrt(50) is None
    assert floor_frac(Fraction(-7, 2)) == -4


@given(st.lists(st.integers(0, 2**62 - 1), min_size=1, max_size=50))
def test_isqrt_array_exact(xs):
    r = isqrt_array(np.array(xs, dtype=np.int64))
    assert r.tolist() == [isqrt(x) for x in xs]


@given(st.lists(st.integers(-20, 20), min_size=9, max_size=9))
def test_adjugate_identity(xs):
    m = [xs[0:3], xs[3:6], xs[6:9]]
    d = det3(m)
    prod = matmul3(m, adjugate3(m))
    assert prod == [[d if i == j else 0 for j in range(3)] for i in range(3)]
    if d:
        inv = inverse3(m)
        assert matmul3(m, inv) == [[int(i == j) for j in range(3)] for i in range(3)]
