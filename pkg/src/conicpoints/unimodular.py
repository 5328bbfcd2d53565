"""Completing a primitive integer vector to a matrix in SL3(Z) with small entries."""
from __future__ import annotations

from .arith import egcd, gcd_all, round_div
from .quadform import UnimodularMatrix

ENTRY_BOUND_FACTOR = 3


def _perm_sign(perm) -> int:
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def _signed(rows, perm_rows) -> list[list[int]]:
    """Undo a row permutation: row perm_rows[k] of the result is rows[k]."""
    out = [None] * 3
    for k, i in enumerate(perm_rows):
        out[i] = list(rows[k])
    return out


def _fix_det(M: list[list[int]], sign: int) -> list[list[int]]:
    if sign == -1:
        for i in range(3):
            M[i][0] = -M[i][0]
    return M


def _solve_small(x1p: int, x2p: int, rhs: int) -> tuple[int, int]:
    """Small (X, Y) with x1p X + x2p Y == rhs, where gcd(x1p, x2p) == 1."""
    _, u, v = egcd(x1p, x2p)
    X0, Y0 = u * rhs, v * rhs
    # general solution (X0 + k x2p, Y0 - k x1p)
    cands = set()
    if x1p:
        k = round_div(Y0, x1p)
        cands.update({k - 1, k, k + 1})
    if x2p:
        k = round_div(-X0, x2p)
        cands.update({k - 1, k, k + 1})
    best = min(cands, key=lambda k: (max(abs(X0 + k * x2p), abs(Y0 - k * x1p)), k))
    return X0 + best * x2p, Y0 - best * x1p


def complete_to_sl3(a) -> UnimodularMatrix:
    """M in SL3(Z) whose second column is a, with ||M||_inf <= 3 max(1, ||a||_inf)."""
    a = [int(v) for v in a]
    if len(a) != 3 or a == [0, 0, 0]:
        raise ValueError("need a non-zero integer 3-vector")
    if gcd_all(a) != 1:
        raise ValueError(f"vector {tuple(a)} is not primitive")
    nz = [i for i in range(3) if a[i] != 0]

    if len(nz) == 1:
        i = nz[0]
        others = [j for j in range(3) if j != i]
        M = [[0] * 3 for _ in range(3)]
        M[i][1] = a[i]
        M[others[0]][0] = 1
        M[others[1]][2] = 1
        det = _det_int(M)
        return UnimodularMatrix(tuple(map(tuple, _fix_det(M, det))))

    # smallest non-zero entry first, the other two by increasing modulus
    first = min(nz, key=lambda i: (abs(a[i]), i))
    rest = sorted((i for i in range(3) if i != first), key=lambda i: (abs(a[i]), i))
    perm = [first] + rest
    b1, b2, b3 = (a[i] for i in perm)

    g12, u, v = egcd(b1, b2)
    _, al, be = egcd(g12, b3)
    y1, y2, y3 = al * u, al * v, be
    s = round_div(y2, b1)
    t = round_div(y3, b1)
    x1 = y1 + s * b2 + t * b3
    x2 = y2 - s * b1
    x3 = y3 - t * b1
    assert b1 * x1 + b2 * x2 + b3 * x3 == 1

    g = gcd_all((x1, x2))
    x1p, x2p = x1 // g, x2 // g
    X, Y = _solve_small(x1p, x2p, x3)
    Mb = [
        [x2p, b1, -X],
        [-x1p, b2, -Y],
        [0, b3, g],
    ]
    assert _det_int(Mb) == 1
    M = _signed(Mb, perm)
    return UnimodularMatrix(tuple(map(tuple, _fix_det(M, _perm_sign(perm)))))


def _det_int(M) -> int:
    return (
        M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
        - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
        + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0])
    )


def check_completion(a, M: UnimodularMatrix, factor: int = ENTRY_BOUND_FACTOR) -> list[str]:
    """Failed postconditions of complete_to_sl3 for (a, M); empty when all hold."""
    bad = []
    if _det_int(M.rows) != 1:
        bad.append("det != 1")
    if list(M.column(1)) != [int(v) for v in a]:
        bad.append("second column != a")
    if M.sup() > factor * max(1, max(abs(int(v)) for v in a)):
        bad.append(f"entry bound exceeded: {M.sup()}")
    return bad

