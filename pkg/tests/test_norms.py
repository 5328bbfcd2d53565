from fractions import Fraction

import numpy as np
from hypothesis import given, strategies as st

from conicpoints.norms import IsometricNorm, compose_with_matrix, k0, norm_value, sup_ratio
from conicpoints.quadform import UnimodularMatrix

SHEAR = ((1, 1, 0), (0, 1, 0), (0, 0, 1))


def test_examples():
    assert norm_value(IsometricNorm.sup(), (3, -5, 2)) == 5
    assert norm_value(IsometricNorm.diag(1, 1, 2), (0, 0, 1)) == 2
    assert norm_value(IsometricNorm(SHEAR), (0, 0, 0)) == 0
    assert k0(IsometricNorm.sup()) == 2
    assert k0(IsometricNorm.diag(1, 1, 2)) == 2
    assert k0(IsometricNorm(SHEAR)) == 3
    sup = IsometricNorm.sup()
    assert compose_with_matrix(sup, UnimodularMatrix.identity()) == sup
    perm = UnimodularMatrix(((0, 1, 0), (-1, 0, 0), (0, 0, 1)))
    assert k0(compose_with_matrix(sup, perm)) == 2
    assert k0(compose_with_matrix(sup, UnimodularMatrix(SHEAR))) == 3


def test_json_round_trip():
    N = IsometricNorm((("1/3", 0, 1), (0, 2, 0), (0, "-1/2", 1)))
    assert N.to_json() == {"g": [["1/3", 0, 1], [0, 2, 0], [0, "-1/2", 1]]}
    assert IsometricNorm.from_json({"norm": N.to_json()}) == N
    assert IsometricNorm.from_json(None).is_sup
    # floats are taken at face value, exactly
    assert IsometricNorm.diag(0.5, 1, 1).g[0][0] == Fraction(1, 2)


@given(st.lists(st.integers(-4, 4), min_size=9, max_size=9), st.integers(0, 2**32))
def test_sup_ratio_against_sampling(entries, seed):
    g = (tuple(entries[0:3]), tuple(entries[3:6]), tuple(entries[6:9]))
    try:
        N = IsometricNorm(g)
    except ValueError:
        return
    ratio = float(sup_ratio(N))
    rng = np.random.default_rng(seed)
    G = np.array(g, dtype=float)
    # sup is attained where g x is a sign vector
    ys = rng.choice([-1.0, 1.0], size=(64, 3))
    xs = np.linalg.solve(G, ys.T).T
    sampled = np.abs(xs).max(axis=1) / np.abs(xs @ G.T).max(axis=1)
    assert sampled.max() <= ratio * (1 + 1e-9)
    signs = np.array([[a, b, c] for a in (-1, 1) for b in (-1, 1) for c in (-1, 1)], dtype=float)
    best = (np.abs(np.linalg.solve(G, signs.T).T)).max()
    assert abs(best - ratio) <= 1e-9 * max(1.0, ratio)
