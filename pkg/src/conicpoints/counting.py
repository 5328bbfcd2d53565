"""Exact counters for points on conics and for the parameter lattice problems behind them.

Parameter regions are {(s, t) : t > 0, ||q(s, t)|| <= T}.  With the norm
matrix g and D its common denominator, the condition is
|alpha_i s^2 + beta_i s t + gamma_i t^2| <= D T for the three rows of
D g Pi, which for a fixed t is a union of integer intervals in s that we
solve exactly.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt

import numpy as np
from scipy import integrate

from .arith import INT64_SAFE, divisors, floor_frac, gcd_all, matmul3
from .norms import IsometricNorm, compose_with_matrix, k0, norm_value, sup_box
from .parametrization import (
    ParamSystem, build_param_system, point_from_parameter, residue_classes, tangent_parameter,
)
from .quadform import SpecialConic, TernaryQuadraticForm, UnimodularMatrix, transform
from .unimodular import complete_to_sl3
from .zeros import box_zeros, cassels_bound, find_primitive_zero

BRUTE_CAP = 10**4
VECTORS_PER_PARAMETER = 2


# --- integer interval algebra ----------------------------------------------

def _convex_le0(a: int, b: int, c: int):
    """Integer interval {s : a s^2 + b s + c <= 0} for a > 0, or None when empty."""
    disc = b * b - 4 * a * c
    if disc < 0:
        return None
    r = isqrt(disc)
    h = lambda s: (a * s + b) * s + c  # noqa: E731
    hi = (-b + r) // (2 * a)
    lo = -((b + r) // (2 * a))
    while h(hi + 1) <= 0:
        hi += 1
    while hi >= lo and h(hi) > 0:
        hi -= 1
    while h(lo - 1) <= 0:
        lo -= 1
    while lo <= hi and h(lo) > 0:
        lo += 1
    if lo > hi:
        return None
    return lo, hi


def _le(a: int, b: int, c: int, T: int) -> list:
    """{s in Z : a s^2 + b s + c <= T} as a list of (lo, hi), None meaning unbounded."""
    c0 = c - T
    if a > 0:
        iv = _convex_le0(a, b, c0)
        return [] if iv is None else [iv]
    if a < 0:
        # complement of {h >= 1}, i.e. of {-h + 1 <= 0}
        iv = _convex_le0(-a, -b, -c0 + 1)
        if iv is None:
            return [(None, None)]
        return [(None, iv[0] - 1), (iv[1] + 1, None)]
    if b > 0:
        return [(None, (-c0) // b)]
    if b < 0:
        return [(-((-c0) // (-b)), None)]
    return [(None, None)] if c0 <= 0 else []


def _intersect(xs: list, ys: list) -> list:
    out = []
    for lo1, hi1 in xs:
        for lo2, hi2 in ys:
            lo = lo2 if lo1 is None else (lo1 if lo2 is None else max(lo1, lo2))
            hi = hi2 if hi1 is None else (hi1 if hi2 is None else min(hi1, hi2))
            if lo is None or hi is None or lo <= hi:
                out.append((lo, hi))
    return sorted(out, key=lambda iv: -math.inf if iv[0] is None else iv[0])


def _minmax_abs_quadratics(rows) -> float:
    """min over real x of max_i |a_i x^2 + b_i x + c_i| (float)."""
    cands = [0.0]
    polys = [np.array(r, dtype=float) for r in rows]
    for p in polys:
        if p[0] != 0:
            cands.append(-p[1] / (2 * p[0]))
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            for sgn in (1.0, -1.0):
                diff = polys[i] - sgn * polys[j]
                nz = np.flatnonzero(np.abs(diff) > 0)
                if len(nz) == 0:
                    continue
                for root in np.roots(diff[nz[0]:]):
                    if abs(root.imag) <= 1e-12 * max(1.0, abs(root.real)):
                        cands.append(root.real)
    best = math.inf
    for x in cands:
        best = min(best, max(abs(np.polyval(p, x)) for p in polys))
    return best


# --- parameter regions ------------------------------------------------------

@dataclass
class RegionV:
    """{(s,t) : t > 0, ||q(s,t)|| <= T} for a special conic and a norm."""

    system: ParamSystem
    norm: IsometricNorm
    D: int = field(init=False)
    rows: list = field(init=False)
    fmin_t: float = field(init=False)
    fmin_s: float = field(init=False)
    box_const: Fraction = field(init=False)

    def __post_init__(self):
        D, G = self.norm.integer_matrix()
        self.D = D
        self.rows = [tuple(r) for r in matmul3(G, self.system.Pi)]
        # |s|,|t| <= 1/sqrt(min max|row(x,1)|) resp. min max|row(1,y)|, in units of D
        self.fmin_t = _minmax_abs_quadratics(self.rows) / D
        self.fmin_s = _minmax_abs_quadratics([r[::-1] for r in self.rows]) / D
        adj = self.system.adj
        adj_sup = max(abs(v) for r in adj for v in r)
        self.box_const = Fraction(3 * adj_sup) * (k0(self.norm) - 1) / abs(self.system.delta)

    @property
    def source(self) -> SpecialConic:
        return self.system.source

    def bound(self, T) -> int:
        return floor_frac(Fraction(T) * self.D)

    def t_max(self, T) -> int:
        return int(math.floor(math.sqrt(float(T) / self.fmin_t) * (1 + 1e-9))) + 1

    def s_max(self, T) -> int:
        return int(math.floor(math.sqrt(float(T) / self.fmin_s) * (1 + 1e-9))) + 1

    def box_r2(self, T) -> Fraction:
        """Rigorous r^2 with max(s^2, t^2) <= r^2 on the region (adjugate bound)."""
        return self.box_const * Fraction(T)

    def s_intervals(self, t: int, T) -> list[tuple[int, int]]:
        bound = self.bound(T)
        ivs = [(None, None)]
        for a, b, c in self.rows:
            bt, ct = b * t, c * t * t
            ivs = _intersect(ivs, _le(a, bt, ct, bound))
            if not ivs:
                return []
            ivs = _intersect(ivs, _le(-a, -bt, -ct, bound))
            if not ivs:
                return []
        r2 = self.box_r2(T)
        for lo, hi in ivs:
            if lo is None or hi is None:
                raise AssertionError("unbounded parameter region")
            if max(lo * lo, hi * hi, t * t) > r2:
                raise AssertionError(f"parameter ({lo}..{hi}, {t}) escapes the adjugate box")
        return ivs

    def contains(self, s: int, t: int, T) -> bool:
        bound = self.bound(T)
        return t > 0 and all(abs(a * s * s + b * s * t + c * t * t) <= bound for a, b, c in self.rows)


def param_region(S: SpecialConic, norm: IsometricNorm | None = None) -> RegionV:
    return RegionV(build_param_system(S), norm or IsometricNorm.sup())


def _first_at_least(lo: int, residue: int, n: int) -> int:
    return lo + ((residue - lo) % n)


def _count_progression(lo: int, hi: int, residue: int, n: int) -> int:
    return (hi - residue) // n - (lo - 1 - residue) // n


def _gcd_array(a, b):
    if a.dtype == object or (not isinstance(b, (int, np.integer)) and b.dtype == object):
        return np.frompyfunc(math.gcd, 2, 1)(a, b)
    return np.gcd(a, b)


# --- brute force ---------------------------------------------------------------

def primitive_zeros_brute(Q, norm: IsometricNorm | None = None, B=1, cap: int = BRUTE_CAP):
    """All primitive zeros x with ||x|| <= B, as an (n, 3) array."""
    if isinstance(Q, SpecialConic):
        Q = Q.form
    norm = norm or IsometricNorm.sup()
    if Fraction(B) < 1:
        raise ValueError("B must be at least 1")
    if Fraction(B) > cap:
        raise OverflowError(f"B = {B} exceeds the brute-force cap {cap}")
    R = sup_box(norm, B)
    D, G = norm.integer_matrix()
    bound = floor_frac(Fraction(B) * D)
    out = []
    for pts in box_zeros(Q, R):
        g = _gcd_array(_gcd_array(pts[:, 0], pts[:, 1]), pts[:, 2])
        pts = pts[g == 1]
        if not norm.is_sup or bound != R:
            vals = [np.abs(sum(G[i][k] * pts[:, k] for k in range(3))) for i in range(3)]
            pts = pts[(vals[0] <= bound) & (vals[1] <= bound) & (vals[2] <= bound)]
        out.append(pts)
    return np.concatenate(out) if out else np.zeros((0, 3), dtype=np.int64)


def count_N_brute(Q, norm: IsometricNorm | None = None, B=1, cap: int = BRUTE_CAP) -> int:
    return len(primitive_zeros_brute(Q, norm, B, cap))


# --- lattice counts in the parameter plane -------------------------------------

def bounding_box(S: SpecialConic, norm: IsometricNorm | None = None, T=1) -> float:
    """r with max(|s|, |t|) <= r on {t > 0, ||q(s,t)|| <= T}."""
    return math.sqrt(param_region(S, norm).box_r2(T))


def _check_class(n: int, sigma: int, tau: int):
    if n < 1:
        raise ValueError("modulus must be positive")
    if gcd(gcd(sigma, tau), n) != 1:
        raise ValueError(f"gcd({sigma}, {tau}, {n}) != 1")


def count_M(S, norm, T, n: int, sigma: int, tau: int, region: RegionV | None = None) -> int:
    """#{(s,t) = (sigma,tau) mod n : t > 0, ||q(s,t)|| <= T}."""
    _check_class(n, sigma, tau)
    region = region or param_region(S, norm)
    total = 0
    for t in range(_first_at_least(1, tau, n), region.t_max(T) + 1, n):
        for lo, hi in region.s_intervals(t, T):
            total += _count_progression(lo, hi, sigma, n)
    return total


def count_M_star(S, norm, T, n: int, sigma: int, tau: int, region: RegionV | None = None) -> int:
    """As count_M, restricted to coprime (s, t)."""
    _check_class(n, sigma, tau)
    region = region or param_region(S, norm)
    total = 0
    for t in range(_first_at_least(1, tau, n), region.t_max(T) + 1, n):
        for lo, hi in region.s_intervals(t, T):
            s = np.arange(_first_at_least(lo, sigma, n), hi + 1, n, dtype=np.int64)
            total += int(np.count_nonzero(np.gcd(s, t) == 1))
    return total


def _q_arrays(S: SpecialConic, s: np.ndarray, t: int):
    b, e = S.b, S.e
    L = b * s + e * t
    g = S.a * s * s + S.d * s * t + S.f * t * t
    return s * L, -g, t * L


def count_N_script(S: SpecialConic, norm: IsometricNorm | None = None, B=1,
                   region: RegionV | None = None) -> int:
    """#{(s,t) coprime : t > 0, ||q(s,t)|| <= gcd(q(s,t)) B}.

    Each admissible gcd lam divides |Delta|/gcd(b,e); for each lam only the
    residue classes mod lam on which lam | q(s,t) are visited.
    """
    norm = norm or IsometricNorm.sup()
    region = region or param_region(S, norm)
    P = region.system
    total = 0
    for lam in divisors(P.lambda_max):
        classes = residue_classes(S, lam)
        if not classes:
            continue
        by_tau: dict[int, list[int]] = {}
        for sigma, tau in classes:
            by_tau.setdefault(tau, []).append(sigma)
        T = Fraction(B) * lam
        tmax = region.t_max(T)
        smax = region.s_max(T)
        qbound = 3 * max(abs(c) for c in (S.a, S.b, S.d, S.e, S.f)) * max(smax, tmax) ** 2
        dtype = object if qbound >= INT64_SAFE else np.int64
        for tau, sigmas in by_tau.items():
            for t in range(_first_at_least(1, tau, lam), tmax + 1, lam):
                ivs = region.s_intervals(t, T)
                if not ivs:
                    continue
                parts = [
                    np.arange(_first_at_least(lo, sigma, lam), hi + 1, lam, dtype=np.int64)
                    for lo, hi in ivs for sigma in sigmas
                ]
                s = np.concatenate(parts).astype(dtype)
                if not len(s):
                    continue
                s = s[_gcd_array(s, t) == 1]
                q1, q2, q3 = _q_arrays(S, s, t)
                gq = _gcd_array(_gcd_array(q1, q2), q3)
                total += int(np.count_nonzero(gq == lam))
    return total


def count_N_script_brute(S: SpecialConic, norm: IsometricNorm | None = None, B=1) -> int:
    """Same count by scanning the whole adjugate box for T = lambda_max * B (small inputs only)."""
    region = param_region(S, norm)
    T = Fraction(B) * region.system.lambda_max
    r = isqrt(floor_frac(region.box_r2(T))) + 1
    D, G = region.norm.integer_matrix()
    Bf = Fraction(B)
    n = 0
    for t in range(1, r + 1):
        for s in range(-r, r + 1):
            if gcd(s, t) != 1:
                continue
            q = region.system.q(s, t)
            lam = gcd_all(q)
            bound = floor_frac(lam * Bf * D)
            if all(abs(G[i][0] * q[0] + G[i][1] * q[1] + G[i][2] * q[2]) <= bound for i in range(3)):
                n += 1
    return n


# --- the area of V ------------------------------------------------------------

def _radial_integrand_breaks(rows) -> list[float]:
    pts = set()
    polys = [np.array(r, dtype=float) for r in rows]
    for i, p in enumerate(polys):
        for q in [p] + [p - s * polys[j] for j in range(i + 1, len(polys)) for s in (1, -1)]:
            nz = np.flatnonzero(np.abs(q) > 0)
            if len(nz) == 0:
                continue
            for root in np.roots(q[nz[0]:]):
                if abs(root.imag) < 1e-12 and -1 < root.real < 1:
                    pts.add(float(root.real))
    return sorted(pts)


def volume_V_radial(S: SpecialConic, norm: IsometricNorm | None = None, epsrel: float = 1e-10):
    """(area, abserr) of V from area = 1/2 * integral over x of dx / max_i |Q_i(x, 1)|."""
    region = param_region(S, norm)
    D = region.D
    total, err = 0.0, 0.0
    for rows in (region.rows, [r[::-1] for r in region.rows]):
        polys = [np.array(r, dtype=float) / D for r in rows]

        def f(x, polys=polys):
            return 1.0 / max(abs((p[0] * x + p[1]) * x + p[2]) for p in polys)

        brk = [-1.0] + _radial_integrand_breaks(rows) + [1.0]
        for lo, hi in zip(brk[:-1], brk[1:]):
            if hi - lo <= 0:
                continue
            val, e = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=epsrel, limit=200)
            total += val
            err += e
    return 0.5 * total, 0.5 * err


def volume_V_grid(S: SpecialConic, norm: IsometricNorm | None = None, tol: float = 0.01,
                  start: int = 32, max_refinements: int = 14):
    """Midpoint-rule area of V, halving the grid until two estimates agree to tol."""
    region = param_region(S, norm)
    smax = math.sqrt(1.0 / region.fmin_s) * (1 + 1e-9)
    tmax = math.sqrt(1.0 / region.fmin_t) * (1 + 1e-9)
    rows = np.array(region.rows, dtype=float) / region.D

    def estimate(n: int) -> float:
        hs, ht = 2 * smax / n, tmax / n
        s = -smax + hs * (np.arange(n) + 0.5)
        inside = 0
        for t0 in range(0, n, max(1, 4_000_000 // n)):
            t = hs * 0 + ht * (np.arange(t0, min(n, t0 + max(1, 4_000_000 // n))) + 0.5)
            S_, T_ = np.meshgrid(s, t)
            m = np.stack([S_ * S_, S_ * T_, T_ * T_])
            vals = np.abs(np.tensordot(rows, m, axes=1))
            inside += int(np.count_nonzero(vals.max(axis=0) <= 1.0))
        return inside * hs * ht

    n = start
    prev = estimate(n)
    for _ in range(max_refinements):
        n *= 2
        cur = estimate(n)
        if abs(cur - prev) < tol * abs(cur):
            return cur
        prev = cur
    raise RuntimeError(f"area of V did not converge to {tol} after {max_refinements} refinements")


def volume_V(S: SpecialConic, norm: IsometricNorm | None = None, tol: float = 1e-3,
             method: str = "radial") -> float:
    if not 0 < tol <= 0.1:
        raise ValueError("tol must lie in (0, 0.1]")
    if method == "grid":
        return volume_V_grid(S, norm, tol)
    if method != "radial":
        raise ValueError(f"unknown method {method!r}")
    val, err = volume_V_radial(S, norm, epsrel=min(1e-8, tol * 1e-3))
    if err > tol * val:
        raise RuntimeError(f"area of V: quadrature error {err} above tolerance")
    return val


# --- the full pipeline ----------------------------------------------------------

@dataclass
class CountReport:
    B: object
    n_brute: int | None = None
    n_param: int | None = None
    script_n: int | None = None
    corrections: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    base_point: tuple | None = None
    transform: list | None = None
    special_form: dict | None = None

    def to_json(self) -> dict:
        return {
            "B": str(self.B) if isinstance(self.B, Fraction) else self.B,
            "n_brute": self.n_brute,
            "n_param": self.n_param,
            "script_n": self.script_n,
            "corrections": self.corrections,
            "timings_ms": self.timings,
            "base_point": list(self.base_point) if self.base_point else None,
            "transform": self.transform,
            "special_form": self.special_form,
        }


@dataclass(frozen=True)
class SpecialModel:
    """A general form moved to special shape: Q'(x) = Q(M x), ||x||' = ||M x||."""

    special: SpecialConic
    norm: IsometricNorm
    M: UnimodularMatrix
    xi: tuple[int, int, int]


def to_special_model(Q, norm: IsometricNorm | None = None, cap: int | None = None) -> SpecialModel:
    if isinstance(Q, SpecialConic):
        Q = Q.form
    norm = norm or IsometricNorm.sup()
    if Q.is_special():
        M = UnimodularMatrix.identity()
        xi = (0, 1, 0)
    else:
        xi = find_primitive_zero(Q, cap if cap is not None else cassels_bound(Q)).xi
        M = complete_to_sl3(xi)
    Qp = transform(Q, M)
    return SpecialModel(Qp.to_special(), compose_with_matrix(norm, M), M, xi)


def count_N_param(Q, norm: IsometricNorm | None = None, B=1, cap: int | None = None,
                  model: SpecialModel | None = None) -> CountReport:
    """N(Q, B) through the parametrisation, with each exceptional adjustment logged."""
    t0 = time.perf_counter()
    model = model or to_special_model(Q, norm, cap)
    S, normp = model.special, model.norm
    region = param_region(S, normp)
    P = region.system
    t1 = time.perf_counter()
    script = count_N_script(S, normp, B, region=region)
    t2 = time.perf_counter()

    Bf = Fraction(B)
    base_in = norm_value(normp, (0, 1, 0)) <= Bf
    tan = tangent_parameter(P)
    corr = [{"label": "vectors per parameter (x and -x)", "factor": VECTORS_PER_PARAMETER,
             "delta": (VECTORS_PER_PARAMETER - 1) * script}]
    corr.append({"label": "base point +-xi", "delta": 2 if base_in else 0})
    corr.append({"label": f"tangent parameter {tan} maps to xi (already added)",
                 "delta": -2 if (tan[1] > 0 and base_in) else 0})
    if tan != (1, 0):
        pt = point_from_parameter(P, 1, 0).point
        inside = norm_value(normp, pt) <= Bf
        corr.append({"label": f"parameter (1, 0) with t = 0 -> {pt}", "delta": 2 if inside else 0})
    n = script + sum(c["delta"] for c in corr)
    t3 = time.perf_counter()
    return CountReport(
        B=B, n_param=n, script_n=script, corrections=corr,
        timings={"setup": 1e3 * (t1 - t0), "script": 1e3 * (t2 - t1), "total": 1e3 * (t3 - t0)},
        base_point=model.xi, transform=model.M.to_json(), special_form=S.to_json(),
    )


def count_N(Q, norm: IsometricNorm | None = None, B=1, method: str = "param") -> CountReport:
    if method not in ("brute", "param", "both"):
        raise ValueError(f"unknown method {method!r}")
    rep = CountReport(B=B)
    if method in ("param", "both"):
        rep = count_N_param(Q, norm, B)
    if method in ("brute", "both"):
        t0 = time.perf_counter()
        rep.n_brute = count_N_brute(Q, norm, B)
        rep.timings["brute"] = 1e3 * (time.perf_counter() - t0)
    if method == "both" and rep.n_brute != rep.n_param:
        raise AssertionError(f"brute {rep.n_brute} != param {rep.n_param} at B = {B}")
    return rep


def lattice_error_ratio(S: SpecialConic, norm, T, n, sigma, tau, vol: float, region=None) -> float:
    """|M - vol T/n^2| divided by 1 + sqrt(K0 T)/n * <Q>/sqrt|Delta|."""
    from .quadform import height
    region = region or param_region(S, norm)
    m = count_M(S, norm, T, n, sigma, tau, region=region)
    K0 = float(k0(region.norm))
    scale = 1 + math.sqrt(K0 * float(T)) / n * height(S) / math.sqrt(abs(S.delta))
    return abs(m - vol * float(T) / n**2) / scale
