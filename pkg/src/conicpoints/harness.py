"""Corpora, identity batteries and sweeps."""
from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

import numpy as np

from .arith import divisors, gcd_all, mobius
from .counting import (
    count_M, count_M_star, count_N_brute, count_N_param, count_N_script, count_N_script_brute,
    lattice_error_ratio, param_region, primitive_zeros_brute, to_special_model, volume_V,
)
from .norms import IsometricNorm, k0
from .parametrization import (
    adj_identity_holds, build_param_system, parameter_from_point, point_from_parameter,
    q_via_matrix, residue_classes, rho_star, rho_star_direct,
)
from .quadform import (
    SpecialConic, TernaryQuadraticForm, UnimodularMatrix, height, transform,
)
from .unimodular import check_completion, complete_to_sl3
from .zeros import find_primitive_zero

SPEC_VERSION = "1.0"
MAX_DRAWS = 10**6


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class CorpusSpec:
    count: int
    height_bound: int
    shape: str = "special"
    seed: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if self.height_bound < 1:
            raise ValueError("height_bound must be at least 1")
        if self.shape not in ("special", "general"):
            raise ValueError(f"shape must be special or general, not {self.shape!r}")


@dataclass(frozen=True)
class CorpusForm:
    form_id: str
    form: TernaryQuadraticForm
    # for general shape: the special form it came from and the matrix applied
    origin: SpecialConic | None = None
    M: UnimodularMatrix | None = None

    def to_json(self) -> dict:
        out = {"id": self.form_id, "form": self.form.to_json()}
        if self.origin is not None:
            out["origin"] = self.origin.to_json()
            out["M"] = self.M.to_json()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "CorpusForm":
        origin = SpecialConic.from_json(obj["origin"]) if "origin" in obj else None
        M = UnimodularMatrix(tuple(map(tuple, obj["M"]))) if "M" in obj else None
        return cls(str(obj["id"]), TernaryQuadraticForm.from_json(obj["form"]), origin, M)


def random_special(rng, H: int) -> SpecialConic:
    for _ in range(MAX_DRAWS):
        a, b, d, e, f = (int(v) for v in rng.integers(-H, H + 1, size=5))
        if a * e * e - d * e * b + f * b * b != 0:
            return SpecialConic(a, b, d, e, f)
    raise RuntimeError("rejection sampling exceeded the draw limit")


def random_unimodular(rng, max_factors: int = 6, entry_bound: int = 3) -> UnimodularMatrix:
    """Product of between 1 and max_factors elementary matrices I + c E_ij."""
    M = [[int(i == j) for j in range(3)] for i in range(3)]
    for _ in range(int(rng.integers(1, max_factors + 1))):
        i, j = (int(v) for v in rng.choice(3, size=2, replace=False))
        c = int(rng.choice([v for v in range(-entry_bound, entry_bound + 1) if v]))
        # right-multiply by I + c E_ij: column j += c * column i
        for r in range(3):
            M[r][j] += c * M[r][i]
    return UnimodularMatrix(tuple(map(tuple, M)))


def generate_corpus(spec: CorpusSpec) -> list[CorpusForm]:
    """Isotropic forms of height <= H: special ones directly, general ones as unimodular images."""
    rng = make_rng(spec.seed)
    H = spec.height_bound
    out = []
    draws = 0
    while len(out) < spec.count:
        draws += 1
        if draws > MAX_DRAWS:
            raise RuntimeError("rejection sampling exceeded the draw limit")
        S = random_special(rng, H)
        fid = f"{spec.shape}-{spec.seed}-{len(out):04d}"
        if spec.shape == "special":
            out.append(CorpusForm(fid, S.form))
            continue
        M = random_unimodular(rng)
        Q = transform(S.form, M)
        # keep genuinely general forms that still respect the height bound
        if Q.c020 == 0 or height(Q) > H:
            continue
        out.append(CorpusForm(fid, Q, S, M))
    return out


# --- identity batteries --------------------------------------------------------------

DIRECT_CLASS_CAP = 4000


@lru_cache(maxsize=4096)
def classes_direct(S: SpecialConic, n: int) -> tuple[tuple[int, int], ...]:
    """(sigma, tau) mod n with gcd(sigma, tau, n) = 1 and n | q(sigma, tau), by a double loop.

    Above DIRECT_CLASS_CAP the CRT-assembled classes are used instead.
    """
    if n > DIRECT_CLASS_CAP:
        return residue_classes(S, n)
    s = np.arange(n, dtype=np.int64)[:, None]
    t = np.arange(n, dtype=np.int64)[None, :]
    L = (S.b * s + S.e * t) % n
    g = ((S.a * s * s) % n + (S.d * s * t) % n + (S.f * t * t) % n) % n
    ok = (L == 0) & (g == 0) & (np.gcd(np.gcd(s, t), n) == 1)
    ss, tt = np.nonzero(ok)
    return tuple(sorted(zip(ss.tolist(), tt.tolist())))


@dataclass
class Battery:
    name: str
    instances: int = 0
    failures: list = field(default_factory=list)

    def check(self, ok: bool, **inputs):
        self.instances += 1
        if not ok:
            self.failures.append(inputs)

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class VerificationReport:
    batteries: dict = field(default_factory=dict)
    # running maxima over the forms seen, e.g. the size of the smallest zero relative to the height
    stats: dict = field(default_factory=dict)

    def battery(self, name: str) -> Battery:
        return self.batteries.setdefault(name, Battery(name))

    @property
    def passed(self) -> bool:
        return all(b.passed for b in self.batteries.values())

    def merge(self, other: "VerificationReport"):
        for name, b in other.batteries.items():
            mine = self.battery(name)
            mine.instances += b.instances
            mine.failures.extend(b.failures)
        for k, v in other.stats.items():
            self.stats[k] = max(self.stats.get(k, v), v)

    def to_json(self) -> dict:
        return {
            "spec_version": SPEC_VERSION,
            "passed": self.passed,
            "stats": self.stats,
            "batteries": {
                n: {"instances": b.instances, "failures": b.failures, "passed": b.passed}
                for n, b in self.batteries.items()
            },
        }


def _special_of(item) -> tuple[str, SpecialConic]:
    if isinstance(item, CorpusForm):
        if item.form.is_special():
            return item.form_id, item.form.to_special()
        return item.form_id, to_special_model(item.form).special
    if isinstance(item, SpecialConic):
        return str(item.to_json()), item
    if item.is_special():
        return str(item.to_json()), item.to_special()
    return str(item.to_json()), to_special_model(item).special


def moebius_class_sum(S: SpecialConic, norm, B, classes_fn=classes_direct, rho_fn=rho_star, region=None):
    """sum over k lam | lambda_max of mu(k) sum over classes mod k lam of M*(B lam, k lam).

    Also returns the moduli at which len(classes) disagrees with rho_fn.
    """
    region = region or param_region(S, norm)
    lam_max = region.system.lambda_max
    total, mismatch = 0, []
    for lam in divisors(lam_max):
        for k in divisors(lam_max // lam):
            mk = mobius(k)
            if mk == 0:
                continue
            n = k * lam
            cls = classes_fn(S, n)
            if len(cls) != rho_fn(S, n):
                mismatch.append(n)
            for sigma, tau in cls:
                total += mk * count_M_star(S, norm, Fraction(B) * lam, n, sigma, tau, region=region)
    return total, mismatch


def inverted_class_sum(S: SpecialConic, norm, T, n, sigma, tau, region=None) -> tuple[int, int]:
    """(sum over m <= sqrt(2 T K0 / n), (m, n) = 1 of mu(m) M(T/m^2, n) at class m^-1 (sigma, tau),
    the same sum continued up to the adjugate box), for the truncation check."""
    region = region or param_region(S, norm)
    K0 = k0(region.norm)
    m_cut = math.isqrt(int(Fraction(2) * Fraction(T) * K0 / n)) + 1
    while m_cut * m_cut * n > 2 * Fraction(T) * K0:
        m_cut -= 1
    m_box = math.isqrt(int(region.box_r2(T))) + 1
    main = tail = 0
    for m in range(1, max(m_cut, m_box) + 1):
        if gcd(m, n) != 1:
            continue
        mu = mobius(m)
        if mu == 0:
            continue
        inv = pow(m, -1, n) if n > 1 else 0
        val = count_M(S, norm, Fraction(T) / (m * m), n, (inv * sigma) % n, (inv * tau) % n, region=region)
        if m <= m_cut:
            main += mu * val
        else:
            tail += mu * val
    return main, tail


def verify_form(item, B_max: int = 50, rng_seed: int = 0, norm: IsometricNorm | None = None,
                rho_star_fn=rho_star, classes_fn=classes_direct, n_max: int = 2000,
                adj_samples: int = 1000, mult_pairs: int = 50, inversion_instances: int = 10,
                B_values=None) -> VerificationReport:
    """All identity batteries for one form."""
    norm = norm or IsometricNorm.sup()
    if B_max > 100:
        raise ValueError("B_max must be at most 100")
    fid, S = _special_of(item)
    rng = make_rng(rng_seed)
    rep = VerificationReport()
    P = build_param_system(S)
    region = param_region(S, norm)

    # matrix identities
    b = rep.battery("adj_identity")
    for s, t in rng.integers(-10**6, 10**6, size=(adj_samples, 2)).tolist():
        ok = adj_identity_holds(P, s, t) and q_via_matrix(P, s, t) == P.q(s, t)
        b.check(ok, form=fid, s=s, t=t)

    # support and size of rho*
    b = rep.battery("rho_support_bound")
    lam_max, gbe = P.lambda_max, P.gcd_be
    for n in range(1, n_max + 1):
        r = rho_star_fn(S, n)
        ok = (r == 0 or lam_max % n == 0) and r <= n * gbe
        b.check(ok, form=fid, n=n, rho=r)

    b = rep.battery("rho_direct_vs_factored")
    for n in sorted(set(divisors(lam_max)) | set(range(1, 40))):
        if n > 3000:
            continue
        b.check(rho_star_fn(S, n) == rho_star_direct(S, n), form=fid, n=n)

    b = rep.battery("rho_multiplicativity")
    pool = [d for d in divisors(lam_max) if d <= 1000] + list(range(1, 1001))
    done = 0
    while done < mult_pairs:
        m, n = (int(pool[i]) for i in rng.integers(0, len(pool), size=2))
        if gcd(m, n) != 1:
            continue
        done += 1
        lhs = rho_star_fn(S, m * n)
        ok = lhs == rho_star_fn(S, m) * rho_star_fn(S, n)
        if m * n <= 3000:
            ok = ok and lhs == rho_star_direct(S, m * n)
        b.check(ok, form=fid, m=m, n=n)

    # class decomposition of the parameter count
    b = rep.battery("class_decomposition")
    Bs = B_values or sorted({1, 2, 5, B_max // 2 or 1, B_max})
    for B in Bs:
        try:
            lhs = count_N_script(S, norm, B, region=region)
            rhs, mismatch = moebius_class_sum(S, norm, B, classes_fn, rho_star_fn, region=region)
            ok = lhs == rhs and not mismatch
            if B <= 10:
                ok = ok and lhs == count_N_script_brute(S, norm, B)
        except AssertionError as exc:
            ok, lhs, rhs, mismatch = False, str(exc), None, []
        b.check(ok, form=fid, B=B, lhs=lhs, rhs=rhs, rho_mismatch=mismatch)

    # Moebius inversion of the lattice counts
    b = rep.battery("moebius_inversion")
    moduli = [n for n in divisors(lam_max) if rho_star(S, n) > 0][:6]
    for i in range(inversion_instances):
        n = moduli[i % len(moduli)]
        cls = residue_classes(S, n)
        sigma, tau = cls[int(rng.integers(0, len(cls)))]
        T = int(rng.integers(1, 60))
        lhs = count_M_star(S, norm, T, n, sigma, tau, region=region)
        main, tail = inverted_class_sum(S, norm, T, n, sigma, tau, region=region)
        b.check(lhs == main and tail == 0, form=fid, T=T, n=n, sigma=sigma, tau=tau,
                lhs=lhs, rhs=main, tail=tail)

    # round trip through the parametrisation
    b = rep.battery("round_trip")
    for x in primitive_zeros_brute(S, IsometricNorm.sup(), min(B_max, 100)).tolist():
        par = parameter_from_point(P, x)
        if par is None:
            b.check(tuple(x) in ((0, 1, 0), (0, -1, 0)), form=fid, x=x)
            continue
        pt = point_from_parameter(P, *par).point
        b.check(tuple(pt) in (tuple(x), tuple(-v for v in x)), form=fid, x=x, param=par)

    # oracle equality on the original (possibly general) form
    b = rep.battery("oracle_equality")
    form = item.form if isinstance(item, CorpusForm) else (item.form if isinstance(item, SpecialConic) else item)
    for B in Bs:
        nb = count_N_brute(form, norm, B)
        npar = count_N_param(form, norm, B).n_param
        b.check(nb == npar, form=fid, B=B, n_brute=nb, n_param=npar)
    xi = find_primitive_zero(form).xi
    rep.stats["max_zero_over_height"] = max(abs(c) for c in xi) / height(form)
    return rep


def _verify_job(args):
    item, B_max, seed, kwargs = args
    return verify_form(item, B_max, seed, **kwargs)


def pmap(fn, items, threads: int = 1):
    """Map preserving order; uses worker processes when threads > 1."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def verify_identities(corpus, B_max: int = 50, threads: int = 1, seed: int = 0, **kwargs) -> VerificationReport:
    """Run every battery on every form; failures are returned as data."""
    rep = VerificationReport()
    jobs = [(item, B_max, seed + i, kwargs) for i, item in enumerate(corpus)]
    for r in pmap(_verify_job, jobs, threads):
        rep.merge(r)
    return rep


def completion_battery(n: int = 10**4, bound: int = 10**9, seed: int = 0) -> Battery:
    rng = make_rng(seed)
    b = Battery("sl3_completion")
    while b.instances < n:
        a = [int(v) for v in rng.integers(-bound, bound + 1, size=3)]
        # thin out to sparse vectors now and then, they hit the special cases
        for i in range(3):
            if rng.random() < 0.1:
                a[i] = 0
        if a == [0, 0, 0]:
            continue
        g = gcd_all(a)
        a = [v // g for v in a]
        M = complete_to_sl3(a)
        bad = check_completion(a, M)
        b.check(not bad, a=a, problems=bad)
    return b


def lattice_error_grid(S: SpecialConic, norm=None, Ts=(10, 100, 1000, 10**4), n_moduli: int = 4):
    """Normalised lattice-count errors over a grid of (T, n, class)."""
    norm = norm or IsometricNorm.sup()
    region = param_region(S, norm)
    vol = volume_V(S, norm, tol=1e-6)
    ns = [n for n in divisors(region.system.lambda_max) if rho_star(S, n) > 0][:n_moduli]
    ns = sorted(set(ns) | {1, 2, 3})
    out = []
    for T in Ts:
        for n in ns:
            cls = [(s, t) for s in range(n) for t in range(n) if gcd(gcd(s, t), n) == 1][:4]
            for sigma, tau in cls:
                r = lattice_error_ratio(S, norm, T, n, sigma, tau, vol, region=region)
                out.append({"T": T, "n": n, "sigma": sigma, "tau": tau, "ratio": r})
    return out


# --- sweeps ----------------------------------------------------------------------

SWEEP_COLUMNS = ["form_id", "B", "N", "cB", "abs_err", "norm_err", "elapsed_ms"]
COUNT_COLUMNS = ["B", "n_brute", "n_param", "script_n", "elapsed_ms_brute", "elapsed_ms_param"]


@dataclass
class SweepRow:
    form_id: str
    B: int
    N: int
    cB: float
    abs_err: float
    norm_err: float
    elapsed_ms: float


def normalized_error(N: int, c: float, B, K0, h: int) -> float:
    BK = float(B) * float(K0)
    scale = math.sqrt(BK) * max(math.log(BK), 1.0) * h**5
    return abs(N - c * float(B)) / scale


def run_sweep(form, norm: IsometricNorm | None = None, B_list=(), form_id: str = "Q",
              c_Q: float | None = None, tol: float = 1e-3) -> list[SweepRow]:
    from .densities import peyre_constant
    norm = norm or IsometricNorm.sup()
    if isinstance(form, SpecialConic):
        form = form.form
    B_list = list(B_list)
    if not B_list:
        return []
    if c_Q is None:
        c_Q = peyre_constant(form, norm, tol).c_Q
    model = to_special_model(form, norm)
    K0 = k0(norm)
    h = height(form)
    rows = []
    for B in B_list:
        t0 = time.perf_counter()
        N = count_N_param(form, norm, B, model=model).n_param
        ms = 1e3 * (time.perf_counter() - t0)
        rows.append(SweepRow(form_id, B, N, c_Q * B, abs(N - c_Q * B), normalized_error(N, c_Q, B, K0, h), ms))
    return rows


def rows_to_csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        d = asdict(r) if hasattr(r, "__dataclass_fields__") else r
        w.writerow([_fmt_cell(d[c]) for c in columns])
    return buf.getvalue()


def _fmt_cell(v):
    if isinstance(v, float):
        return f"{v:.10g}"
    if v is None:
        return ""
    return v


def measure_vector_factor(corpus, B: int, norm: IsometricNorm | None = None) -> list[dict]:
    """N(Q,B) / script-N(Q,B) per form, to pin the number of vectors per parameter."""
    norm = norm or IsometricNorm.sup()
    out = []
    for item in corpus:
        form = item.form if isinstance(item, CorpusForm) else item
        fid = item.form_id if isinstance(item, CorpusForm) else str(form)
        rep = count_N_param(form, norm, B)
        out.append({"form_id": fid, "B": B, "N": rep.n_param, "script_N": rep.script_n,
                    "ratio": rep.n_param / rep.script_n if rep.script_n else math.nan,
                    "excess": rep.n_param - 2 * rep.script_n})
    return out
