"""Parametrising a conic through (0,1,0) by the pencil of lines sz = tx."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np

from .arith import adjugate3, det3, factorize, gcd_all
from .quadform import SpecialConic, evaluate

RHO_PRIME_POWER_CAP = 10**6
BASE_POINT = (0, 1, 0)


class DegenerateParameter(ValueError):
    pass


@dataclass(frozen=True)
class ParamSystem:
    source: SpecialConic
    Pi: tuple[tuple[int, int, int], ...]
    delta: int

    def L(self, s, t):
        return self.source.b * s + self.source.e * t

    def g(self, s, t):
        S = self.source
        return S.a * s * s + S.d * s * t + S.f * t * t

    def q(self, s, t) -> tuple[int, int, int]:
        L = self.L(s, t)
        return (s * L, -self.g(s, t), t * L)

    @property
    def adj(self):
        return adjugate3(self.Pi)

    @property
    def gcd_be(self) -> int:
        return gcd(self.source.b, self.source.e)

    @property
    def lambda_max(self) -> int:
        """|Delta| / gcd(b, e): every gcd(q(s,t)) with coprime s, t divides it."""
        g = self.gcd_be
        return abs(self.delta) // g if g else abs(self.delta)


@dataclass(frozen=True)
class ParamPoint:
    s: int
    t: int
    lam: int
    point: tuple[int, int, int]
    exceptional: bool


def build_param_system(S: SpecialConic) -> ParamSystem:
    Pi = ((S.b, S.e, 0), (-S.a, -S.d, -S.f), (0, S.b, S.e))
    delta = S.delta
    if det3(Pi) != delta:
        raise AssertionError(f"det(Pi) = {det3(Pi)} differs from discriminant {delta}")
    return ParamSystem(S, Pi, delta)


def q_via_matrix(P: ParamSystem, s: int, t: int) -> tuple[int, int, int]:
    m = (s * s, s * t, t * t)
    return tuple(sum(P.Pi[i][k] * m[k] for k in range(3)) for i in range(3))


def adj_identity_holds(P: ParamSystem, s: int, t: int) -> bool:
    q = P.q(s, t)
    lhs = [sum(P.adj[i][k] * q[k] for k in range(3)) for i in range(3)]
    return lhs == [P.delta * s * s, P.delta * s * t, P.delta * t * t]


def point_from_parameter(P: ParamSystem, s: int, t: int) -> ParamPoint:
    if gcd(s, t) != 1:
        raise ValueError(f"parameter ({s}, {t}) is not primitive")
    q = P.q(s, t)
    if q == (0, 0, 0):
        raise DegenerateParameter(f"q({s}, {t}) vanishes")
    lam = gcd_all(q)
    point = tuple(c // lam for c in q)
    exceptional = point in (BASE_POINT, (0, -1, 0))
    return ParamPoint(s, t, lam, point, exceptional)


def normalize_parameter(s: int, t: int) -> tuple[int, int]:
    g = gcd(s, t)
    s, t = s // g, t // g
    if t < 0 or (t == 0 and s < 0):
        s, t = -s, -t
    return s, t


def parameter_from_point(P: ParamSystem, x) -> tuple[int, int] | None:
    """(s, t) of the line through the base point and x, normalised to t > 0 (or (1, 0)).

    Returns None for the base point itself, which lies on every line of the pencil.
    """
    x1, x2, x3 = (int(c) for c in x)
    if evaluate(P.source, (x1, x2, x3)) != 0:
        raise ValueError(f"{tuple(x)} is not a zero of the form")
    if x1 == 0 and x3 == 0:
        return None
    return normalize_parameter(x1, x3)


def tangent_parameter(P: ParamSystem) -> tuple[int, int]:
    """The parameter whose line is tangent at the base point; it maps to the base point."""
    S = P.source
    s, t = normalize_parameter(S.e, -S.b)
    assert point_from_parameter(P, s, t).exceptional
    return s, t


# --- rho* -----------------------------------------------------------------

def _projective_counts(S: SpecialConic, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Residues r mod n with n | L(r,1), g(r,1), and u = 0 mod p with n | L(1,u), g(1,u).

    n must be a prime power here; p is its prime.
    """
    p = next(iter(factorize(n)))
    r = np.arange(n, dtype=np.int64)
    r2 = (r * r) % n
    a, b, d, e, f = (c % n for c in (S.a, S.b, S.d, S.e, S.f))
    L1 = (b * r + e) % n
    g1 = ((a * r2) % n + (d * r) % n + f) % n
    R1 = r[(L1 == 0) & (g1 == 0)]
    u = r[::p]
    u2 = (u * u) % n
    L2 = (b + e * u) % n
    g2 = (a + (d * u) % n + (f * u2) % n) % n
    R2 = u[(L2 == 0) & (g2 == 0)]
    return R1, R2


def _rho_prime_power(S: SpecialConic, p: int, k: int) -> int:
    n = p**k
    if n > RHO_PRIME_POWER_CAP:
        raise OverflowError(f"rho* at {p}^{k} exceeds the enumeration cap {RHO_PRIME_POWER_CAP}")
    R1, R2 = _projective_counts(S, n)
    return (n - n // p) * (len(R1) + len(R2))


@lru_cache(maxsize=4096)
def _rho_prime_power_cached(S: SpecialConic, p: int, k: int) -> int:
    # a solution mod p^k reduces to one mod p^j for every j < k
    for j in range(1, k):
        if _rho_prime_power(S, p, j) == 0:
            return 0
    return _rho_prime_power(S, p, k)


def rho_star(S: SpecialConic, n: int) -> int:
    """#{(s,t) in [0,n)^2 : n | q(s,t), gcd(s,t,n) = 1}, assembled over prime powers."""
    if n < 1:
        raise ValueError("n must be positive")
    out = 1
    for p, k in factorize(n).items():
        out *= _rho_prime_power_cached(S, p, k)
        if out == 0:
            return 0
    return out


def rho_star_direct(S: SpecialConic, n: int) -> int:
    """Same count by a plain double loop over [0, n)^2 (slow; n up to a few thousand)."""
    s = np.arange(n, dtype=np.int64)[:, None]
    t = np.arange(n, dtype=np.int64)[None, :]
    L = (S.b * s + S.e * t) % n
    g = ((S.a * s * s) % n + (S.d * s * t) % n + (S.f * t * t) % n) % n
    cop = np.gcd(np.gcd(s, t), n) == 1
    return int(np.count_nonzero((L == 0) & (g == 0) & cop))


def prime_power_classes(S: SpecialConic, p: int, k: int) -> list[tuple[int, int]]:
    """All (sigma, tau) mod p^k with gcd(sigma, tau, p) = 1 and p^k | q(sigma, tau)."""
    n = p**k
    if _rho_prime_power_cached(S, p, k) == 0:
        return []
    R1, R2 = _projective_counts(S, n)
    units = [m for m in range(n) if m % p]
    out = [(m * int(r) % n, m) for r in R1 for m in units]
    out += [(m, m * int(u) % n) for u in R2 for m in units]
    return out


@lru_cache(maxsize=1024)
def residue_classes(S: SpecialConic, n: int) -> tuple[tuple[int, int], ...]:
    """Classes (sigma, tau) mod n counted by rho*(n), combined across primes by CRT."""
    classes = [(0, 0)]
    mod = 1
    for p, k in sorted(factorize(n).items()) if n > 1 else []:
        pk = p**k
        local = prime_power_classes(S, p, k)
        if not local:
            return ()
        inv = pow(mod, -1, pk)
        merged = []
        for s0, t0 in classes:
            for s1, t1 in local:
                # x = x0 mod `mod`, x = x1 mod pk
                s = s0 + mod * (((s1 - s0) * inv) % pk)
                t = t0 + mod * (((t1 - t0) * inv) % pk)
                merged.append((s, t))
        classes = merged
        mod *= pk
    return tuple(sorted(classes))
