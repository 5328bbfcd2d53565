"""Small exact integer helpers shared by the counting code."""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, isqrt

import numpy as np
from sympy import factorint

# Largest magnitude we allow in int64 numpy kernels before switching to
# Python integers (object arrays).
INT64_SAFE = 2**62


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, u, v) with u*a + v*b == g == gcd(a, b) >= 0."""
    old_r, r = a, b
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_u, u = u, old_u - q * u
        old_v, v = v, old_v - q * v
    if old_r < 0:
        old_r, old_u, old_v = -old_r, -old_u, -old_v
    return old_r, old_u, old_v


def gcd_all(values) -> int:
    return reduce(gcd, (int(v) for v in values), 0)


def round_div(a: int, b: int) -> int:
    """Nearest integer to a/b (b != 0); halves round up."""
    if b < 0:
        a, b = -a, -b
    return (2 * a + b) // (2 * b)


def exact_sqrt(n: int) -> int | None:
    if n < 0:
        return None
    r = isqrt(n)
    return r if r * r == n else None


def floor_frac(x) -> int:
    """Floor of an int or Fraction."""
    x = Fraction(x)
    return x.numerator // x.denominator


def factorize(n: int) -> dict[int, int]:
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor 0")
    return {int(p): int(k) for p, k in factorint(n).items()}


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, k in sorted(factorize(n).items()):
        divs = [d * p**i for d in divs for i in range(k + 1)]
    return sorted(divs)


def mobius(n: int) -> int:
    if n == 1:
        return 1
    f = factorize(n)
    if any(k > 1 for k in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def lcm_denominators(values) -> int:
    out = 1
    for v in values:
        d = Fraction(v).denominator
        out = out * d // gcd(out, d)
    return out


def isqrt_array(a: np.ndarray) -> np.ndarray:
    """Floor square root of a non-negative int64 array, exact below 2**62."""
    r = np.floor(np.sqrt(a.astype(np.float64))).astype(np.int64)
    # float sqrt is off by at most one here; correct both directions
    for _ in range(2):
        r = np.where(r * r > a, r - 1, r)
        r = np.where((r + 1) * (r + 1) <= a, r + 1, r)
    return r


def det3(m) -> int | Fraction:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def adjugate3(m):
    """Classical adjoint (transpose of the cofactor matrix)."""
    c = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            r = [k for k in range(3) if k != i]
            s = [k for k in range(3) if k != j]
            minor = m[r[0]][s[0]] * m[r[1]][s[1]] - m[r[0]][s[1]] * m[r[1]][s[0]]
            c[j][i] = (-1) ** (i + j) * minor
    return c


def matmul3(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)] for i in range(3)]


def matvec3(a, x):
    return [sum(a[i][k] * x[k] for k in range(3)) for i in range(3)]


def inverse3(m):
    d = Fraction(det3(m))
    if d == 0:
        raise ValueError("singular matrix")
    adj = adjugate3(m)
    return [[Fraction(adj[i][j]) / d for j in range(3)] for i in range(3)]


def transpose3(m):
    return [[m[j][i] for j in range(3)] for i in range(3)]
