"""Norms of the shape ||x|| = ||g x||_inf for an invertible real matrix g."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arith import det3, floor_frac, inverse3, lcm_denominators, matmul3
from .quadform import UnimodularMatrix


def _as_fraction(v) -> Fraction:
    # floats are taken at their exact binary value, so no rounding slack is needed
    if isinstance(v, str):
        return Fraction(v.strip())
    return Fraction(v)


@dataclass(frozen=True)
class IsometricNorm:
    g: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        g = tuple(tuple(_as_fraction(v) for v in row) for row in self.g)
        if len(g) != 3 or any(len(r) != 3 for r in g):
            raise ValueError("norm matrix must be 3x3")
        if det3(g) == 0:
            raise ValueError("norm matrix is singular")
        object.__setattr__(self, "g", g)

    @classmethod
    def sup(cls) -> "IsometricNorm":
        return cls(((1, 0, 0), (0, 1, 0), (0, 0, 1)))

    @classmethod
    def diag(cls, a, b, c) -> "IsometricNorm":
        return cls(((a, 0, 0), (0, b, 0), (0, 0, c)))

    def __call__(self, x) -> Fraction | float:
        return norm_value(self, x)

    @property
    def is_sup(self) -> bool:
        return self.g == IsometricNorm.sup().g

    def integer_matrix(self) -> tuple[int, list[list[int]]]:
        """(D, D*g) with D the least common denominator, so D*g is integral."""
        D = lcm_denominators(v for r in self.g for v in r)
        return D, [[int(v * D) for v in r] for r in self.g]

    def inverse(self) -> list[list[Fraction]]:
        return inverse3(self.g)

    def det(self) -> Fraction:
        return det3(self.g)

    def to_json(self) -> dict:
        return {"g": [[_fmt(v) for v in r] for r in self.g]}

    @classmethod
    def from_json(cls, obj: dict | None) -> "IsometricNorm":
        if not obj:
            return cls.sup()
        if "norm" in obj:
            obj = obj["norm"]
        return cls(tuple(tuple(r) for r in obj["g"]))


def _fmt(v: Fraction):
    return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def norm_value(N: IsometricNorm, x):
    """max_i |(g x)_i|; exact for rational input."""
    return max(abs(sum(N.g[i][k] * x[k] for k in range(3))) for i in range(3))


def sup_ratio(N: IsometricNorm) -> Fraction:
    """sup_{x != 0} ||x||_inf / ||x||, the infinity-operator norm of g^{-1}."""
    ginv = N.inverse()
    return max(sum(abs(v) for v in row) for row in ginv)


def k0(N: IsometricNorm) -> Fraction:
    return 1 + sup_ratio(N)


def sup_box(N: IsometricNorm, B) -> int:
    """Largest integer R with ||x|| <= B  =>  ||x||_inf <= R."""
    return floor_frac(sup_ratio(N) * Fraction(B))


def compose_with_matrix(N: IsometricNorm, M: UnimodularMatrix) -> IsometricNorm:
    """The norm x -> ||M x||."""
    return IsometricNorm(tuple(tuple(r) for r in matmul3(N.g, M.rows)))
