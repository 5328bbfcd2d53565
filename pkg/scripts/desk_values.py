"""Independent triple-loop enumeration of the small hand-computed values.

Uses nothing from the package: plain loops over boxes, so the numbers it
prints can be frozen into the test-suite as oracles.

    python scripts/desk_values.py
"""
from fractions import Fraction
from math import gcd


def q0(x, y, z):
    return x * x - y * z


def q1(x, y, z):
    return x * x + 3 * x * y + 5 * y * z + 7 * z * z


def n_brute(form, B):
    """Primitive zeros with sup-norm at most B, by a full triple loop."""
    n = 0
    r = range(-B, B + 1)
    for x in r:
        for y in r:
            for z in r:
                if form(x, y, z) == 0 and gcd(gcd(x, y), z) == 1:
                    n += 1
    return n


def script_n(coeffs, B):
    """#{(s,t) coprime, t>0 : |q(s,t)|_inf <= gcd(q) * B} over a generous box."""
    a, b, d, e, f = coeffs
    delta = a * e * e - d * e * b + f * b * b
    lam_max = abs(delta) // gcd(b, e) if gcd(b, e) else abs(delta)
    box = 4 * (lam_max * B + 1)
    n = 0
    for s in range(-box, box + 1):
        for t in range(1, box + 1):
            if gcd(s, t) != 1:
                continue
            L = b * s + e * t
            g = a * s * s + d * s * t + f * t * t
            q = (s * L, -g, t * L)
            lam = gcd(gcd(q[0], q[1]), q[2])
            if max(abs(c) for c in q) <= lam * B:
                n += 1
    return n


def nstar(form, p, n):
    m = p ** n
    c = 0
    for x in range(m):
        for y in range(m):
            for z in range(m):
                if x % p == 0 and y % p == 0 and z % p == 0:
                    continue
                if form(x, y, z) % m == 0:
                    c += 1
    return c


def rho_star(coeffs, n):
    a, b, d, e, f = coeffs
    c = 0
    for s in range(n):
        for t in range(n):
            if gcd(gcd(s, t), n) != 1:
                continue
            if (b * s + e * t) % n == 0 and (a * s * s + d * s * t + f * t * t) % n == 0:
                c += 1
    return c


def main():
    for B in (1, 2, 4, 10):
        print(f"N(Q0,{B}) = {n_brute(q0, B)}")
    for B in (1, 2, 4, 10):
        print(f"script_N(Q0,{B}) = {script_n((1, 0, 0, -1, 0), B)}")
    for B in (1, 2, 5):
        print(f"N(Q1,{B}) = {n_brute(q1, B)}   script_N(Q1,{B}) = {script_n((1, 3, 0, 5, 7), B)}")
    for p, n in ((2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)):
        c = nstar(q0, p, n)
        print(f"N*_Q0({p}^{n}) = {c}   ratio {Fraction(c, p ** (2 * n))}")
    for n in (1, 2, 3, 4, 8, 11, 22, 44, 88, 121):
        print(f"rho*_Q1({n}) = {rho_star((1, 3, 0, 5, 7), n)}")


if __name__ == "__main__":
    main()
