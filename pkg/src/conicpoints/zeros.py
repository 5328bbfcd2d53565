"""Small primitive zeros of ternary forms, and the box solver shared with brute counting."""
from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

import numpy as np

from .arith import INT64_SAFE, gcd_all, isqrt_array
from .quadform import SpecialConic, TernaryQuadraticForm, gram_doubled, height


class ZeroNotFound(LookupError):
    def __init__(self, cap: int, conclusive: bool):
        self.cap = cap
        self.conclusive = conclusive
        if conclusive:
            msg = f"no zero with sup-norm <= {cap}; cap exceeds the Cassels bound, so the form has no rational zero"
        else:
            msg = f"no zero with sup-norm <= {cap}; cap is below the Cassels bound (inconclusive)"
        super().__init__(msg)


@dataclass(frozen=True)
class PrimitiveZero:
    xi: tuple[int, int, int]
    search_radius_used: int

    def __post_init__(self):
        if gcd_all(self.xi) != 1:
            raise ValueError("zero is not primitive")
        if max(abs(c) for c in self.xi) > self.search_radius_used:
            raise ValueError("zero lies outside the search radius")

    def to_json(self) -> dict:
        return {"xi": list(self.xi), "search_radius_used": self.search_radius_used}


def cassels_bound(Q) -> int:
    """3 * sum |A_ij| for the doubled Gram matrix A."""
    A = gram_doubled(Q)
    return 3 * sum(abs(v) for row in A for v in row)


def default_cap(Q) -> int:
    return 3 * height(Q)


def _solver_setup(Q: TernaryQuadraticForm):
    """Pick the variable to solve for and return (perm, c, p, r, alpha, beta, gamma).

    In permuted coordinates (u, v, w) = x[perm] the form reads
    c w^2 + (p u + r v) w + alpha u^2 + beta u v + gamma v^2.
    """
    A = gram_doubled(Q)
    diag = [A[i][i] // 2 for i in range(3)]
    w = max(range(3), key=lambda i: (abs(diag[i]) > 0, -i))
    u, v = [i for i in range(3) if i != w]
    perm = (u, v, w)
    return perm, diag[w], A[u][w], A[v][w], diag[u], A[u][v], diag[v]


def _box_zeros_chunk(coeffs, U: np.ndarray, R: int, exact: bool):
    """Integer zeros (u, v, w) with u in U and |v|, |w| <= R, in permuted coordinates."""
    c, p, r, alpha, beta, gamma = coeffs
    dtype = object if exact else np.int64
    V = np.arange(-R, R + 1, dtype=np.int64).astype(dtype)
    UU = np.repeat(np.asarray(U, dtype=np.int64).astype(dtype), V.size)
    VV = np.tile(V, len(U))
    lin = p * UU + r * VV
    con = alpha * UU * UU + beta * UU * VV + gamma * VV * VV
    out = []
    if c == 0:
        # no square terms at all: lin * w + con = 0
        nz = lin != 0
        if np.any(nz):
            l, k = lin[nz], con[nz]
            ok = (-k) % l == 0
            W = (-k[ok]) // l[ok]
            keep = np.abs(W) <= R
            out.append(np.stack([UU[nz][ok][keep], VV[nz][ok][keep], W[keep]], axis=1))
        free = (lin == 0) & (con == 0)
        for u0, v0 in zip(UU[free], VV[free]):
            W = np.arange(-R, R + 1, dtype=np.int64).astype(dtype)
            out.append(np.stack([np.full_like(W, u0), np.full_like(W, v0), W], axis=1))
    else:
        D = lin * lin - 4 * c * con
        ok = D >= 0
        lin, Dk, UU, VV = lin[ok], D[ok], UU[ok], VV[ok]
        if exact:
            s = np.array([isqrt(int(d)) for d in Dk], dtype=object)
        else:
            s = isqrt_array(Dk)
        sq = s * s == Dk
        lin, s, UU, VV = lin[sq], s[sq], UU[sq], VV[sq]
        for sign in (1, -1):
            if sign == -1:
                nzs = s != 0
                lin, s, UU, VV = lin[nzs], s[nzs], UU[nzs], VV[nzs]
            num = -lin + sign * s
            div = num % (2 * c) == 0
            W = num[div] // (2 * c)
            keep = np.abs(W) <= R
            out.append(np.stack([UU[div][keep], VV[div][keep], W[keep]], axis=1))
    if not out:
        return np.zeros((0, 3), dtype=dtype)
    return np.concatenate(out, axis=0)


def box_zeros(Q, R: int, chunk_cells: int = 4_000_000):
    """Yield arrays of all integer zeros x (rows, original coordinate order) with ||x||_inf <= R."""
    if isinstance(Q, SpecialConic):
        Q = Q.form
    perm, c, p, r, alpha, beta, gamma = _solver_setup(Q)
    bound_lin = (abs(p) + abs(r)) * R
    bound_con = (abs(alpha) + abs(beta) + abs(gamma)) * R * R
    exact = bound_lin**2 + 4 * abs(c) * bound_con + bound_lin + 2 * abs(c) * R >= INT64_SAFE
    inv = [perm.index(i) for i in range(3)]
    width = 2 * R + 1
    rows_per_chunk = max(1, chunk_cells // width)
    for start in range(-R, R + 1, rows_per_chunk):
        U = np.arange(start, min(R, start + rows_per_chunk - 1) + 1)
        pts = _box_zeros_chunk((c, p, r, alpha, beta, gamma), U, R, exact)
        if len(pts):
            yield pts[:, inv]


def _zero_key(x):
    return (max(abs(c) for c in x), abs(x[0]), abs(x[1]), abs(x[2]), x[0] < 0, x[1] < 0, x[2] < 0)


def find_primitive_zero(Q, cap: int | None = None) -> PrimitiveZero:
    """Zero of minimal sup-norm, found by a doubling radius search up to cap."""
    if isinstance(Q, SpecialConic):
        Q = Q.form
    if cap is None:
        cap = default_cap(Q)
    if cap < 1:
        raise ValueError("cap must be positive")
    R = 1
    while True:
        R = min(R, cap)
        best = None
        for pts in box_zeros(Q, R):
            for row in pts:
                x = tuple(int(v) for v in row)
                if x == (0, 0, 0):
                    continue
                if best is None or _zero_key(x) < _zero_key(best):
                    best = x
        if best is not None:
            return PrimitiveZero(best, R)
        if R == cap:
            raise ZeroNotFound(cap, conclusive=cap >= cassels_bound(Q))
        R *= 2
