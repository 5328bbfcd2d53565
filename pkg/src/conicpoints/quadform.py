"""Integer ternary quadratic forms, their invariants and unimodular changes of variable."""
from __future__ import annotations

from dataclasses import dataclass

from .arith import adjugate3, det3, gcd_all, matmul3, transpose3

_KEYS = ("c200", "c110", "c101", "c020", "c011", "c002")


@dataclass(frozen=True)
class TernaryQuadraticForm:
    """c200 x^2 + c110 xy + c101 xz + c020 y^2 + c011 yz + c002 z^2."""

    c200: int
    c110: int
    c101: int
    c020: int
    c011: int
    c002: int

    def __post_init__(self):
        for k in _KEYS:
            v = getattr(self, k)
            if not isinstance(v, int) or isinstance(v, bool):
                object.__setattr__(self, k, int(v))
        if all(c == 0 for c in self.coefficients):
            raise ValueError("zero quadratic form")
        if det3(gram_doubled(self)) == 0:
            raise ValueError(f"singular quadratic form {self.coefficients}")

    @property
    def coefficients(self) -> tuple[int, ...]:
        return tuple(getattr(self, k) for k in _KEYS)

    def __call__(self, x) -> int:
        return evaluate(self, x)

    def scaled(self, k: int) -> "TernaryQuadraticForm":
        return TernaryQuadraticForm(*(k * c for c in self.coefficients))

    def is_special(self) -> bool:
        return self.c020 == 0

    def to_special(self) -> "SpecialConic":
        if not self.is_special():
            raise ValueError("form has a y^2 term; (0,1,0) is not a zero")
        return SpecialConic(self.c200, self.c110, self.c101, self.c011, self.c002)

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in _KEYS}

    @classmethod
    def from_json(cls, obj: dict) -> "TernaryQuadraticForm":
        if "c200" not in obj and "a" in obj:
            return SpecialConic.from_json(obj).form
        if "coeffs" in obj:
            if len(obj["coeffs"]) != 6:
                raise ValueError("coeffs needs six entries")
            return cls(*(int(v) for v in obj["coeffs"]))
        return cls(*(int(obj[k]) for k in _KEYS))


@dataclass(frozen=True)
class SpecialConic:
    """a x^2 + b xy + d xz + e yz + f z^2, which vanishes at (0,1,0)."""

    a: int
    b: int
    d: int
    e: int
    f: int

    def __post_init__(self):
        if discriminant_special(self) == 0:
            raise ValueError(f"singular special conic {(self.a, self.b, self.d, self.e, self.f)}")

    @property
    def form(self) -> TernaryQuadraticForm:
        return TernaryQuadraticForm(self.a, self.b, self.d, 0, self.e, self.f)

    @property
    def delta(self) -> int:
        return discriminant_special(self)

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "d": self.d, "e": self.e, "f": self.f}

    @classmethod
    def from_json(cls, obj: dict) -> "SpecialConic":
        if "a" not in obj:
            return TernaryQuadraticForm.from_json(obj).to_special()
        return cls(*(int(obj[k]) for k in "abdef"))


@dataclass(frozen=True)
class UnimodularMatrix:
    rows: tuple[tuple[int, int, int], tuple[int, int, int], tuple[int, int, int]]

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in r) for r in self.rows)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise ValueError("expected a 3x3 matrix")
        object.__setattr__(self, "rows", rows)
        if det3(rows) != 1:
            raise ValueError(f"determinant {det3(rows)} != 1")

    @classmethod
    def identity(cls) -> "UnimodularMatrix":
        return cls(((1, 0, 0), (0, 1, 0), (0, 0, 1)))

    def column(self, j: int) -> tuple[int, int, int]:
        return tuple(self.rows[i][j] for i in range(3))

    def sup(self) -> int:
        return max(abs(v) for r in self.rows for v in r)

    def apply(self, x) -> tuple[int, int, int]:
        return tuple(sum(self.rows[i][k] * x[k] for k in range(3)) for i in range(3))

    def __matmul__(self, other: "UnimodularMatrix") -> "UnimodularMatrix":
        return UnimodularMatrix(tuple(tuple(r) for r in matmul3(self.rows, other.rows)))

    def inverse(self) -> "UnimodularMatrix":
        return UnimodularMatrix(tuple(tuple(r) for r in adjugate3(self.rows)))

    def to_json(self) -> list:
        return [list(r) for r in self.rows]


def gram_doubled(Q) -> list[list[int]]:
    """Symmetric integer matrix A with x.A.x == 2 Q(x)."""
    if isinstance(Q, SpecialConic):
        Q = Q.form
    return [
        [2 * Q.c200, Q.c110, Q.c101],
        [Q.c110, 2 * Q.c020, Q.c011],
        [Q.c101, Q.c011, 2 * Q.c002],
    ]


def discriminant_special(S: SpecialConic) -> int:
    return S.a * S.e**2 - S.d * S.e * S.b + S.f * S.b**2


def discriminant(Q) -> int:
    """-det(gram_doubled)/2; agrees with a e^2 - d e b + f b^2 on special forms."""
    d = det3(gram_doubled(Q))
    # odd-size symmetric matrices with even diagonal have even determinant
    assert d % 2 == 0
    return -d // 2


def delta_gcd_minors(Q) -> int:
    A = gram_doubled(Q)
    minors = []
    for r in ((0, 1), (0, 2), (1, 2)):
        for c in ((0, 1), (0, 2), (1, 2)):
            minors.append(A[r[0]][c[0]] * A[r[1]][c[1]] - A[r[0]][c[1]] * A[r[1]][c[0]])
    return gcd_all(abs(m) for m in minors)


def height(Q) -> int:
    if isinstance(Q, SpecialConic):
        Q = Q.form
    return max(abs(c) for c in Q.coefficients)


def evaluate(Q, x) -> int:
    if isinstance(Q, SpecialConic):
        Q = Q.form
    u, v, w = (int(c) for c in x)
    return (
        Q.c200 * u * u + Q.c110 * u * v + Q.c101 * u * w
        + Q.c020 * v * v + Q.c011 * v * w + Q.c002 * w * w
    )


def form_from_gram_doubled(A) -> TernaryQuadraticForm:
    for i in range(3):
        if A[i][i] % 2:
            raise ValueError("diagonal of a doubled Gram matrix must be even")
    return TernaryQuadraticForm(
        A[0][0] // 2, A[0][1], A[0][2], A[1][1] // 2, A[1][2], A[2][2] // 2
    )


def transform(Q, M: UnimodularMatrix) -> TernaryQuadraticForm:
    """The form x -> Q(M x)."""
    if isinstance(Q, SpecialConic):
        Q = Q.form
    A = gram_doubled(Q)
    return form_from_gram_doubled(matmul3(transpose3(M.rows), matmul3(A, M.rows)))


def content(Q) -> int:
    if isinstance(Q, SpecialConic):
        Q = Q.form
    return gcd_all(Q.coefficients)


Q0 = SpecialConic(1, 0, 0, -1, 0)
Q1 = SpecialConic(1, 3, 0, 5, 7)

__all__ = [
    "TernaryQuadraticForm", "SpecialConic", "UnimodularMatrix", "gram_doubled",
    "discriminant_special", "discriminant", "delta_gcd_minors", "height", "evaluate",
    "transform", "content", "Q0", "Q1",
]
