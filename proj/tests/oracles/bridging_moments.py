#!/usr/bin/env python3
"""Independent oracle for the bridging-moment fixture.

Family side: fundamental discriminants from a numpy squarefree sieve and
quadratic characters from Euler's criterion tables (no Kronecker
algorithm). Model side: E[S] and E[S^2] from independence of the X_p
(E[S^2] = E[S]^2 + sum_p Var(B_p)), not from tuple enumeration.

Trivial coefficients, t = 0, so S is real and (1,1) = (2,0).
Usage: bridging_moments.py [Y] [N ...]
"""
import math
import sys

import numpy as np


def primes_upto(n):
    return [p for p in range(2, n + 1) if all(p % q for q in range(2, int(p**0.5) + 1))]


def discriminants(n):
    sf = np.ones(n + 1, dtype=bool)
    sf[0] = False
    for p in primes_upto(int(n**0.5) + 1):
        sf[p * p :: p * p] = False
    out = []
    for sign in (-1, 1):
        k = np.arange(1, n + 1, dtype=np.int64)
        d = sign * k
        r = np.mod(d, 4)
        odd_ok = (r == 1) & sf[k]
        m = d // 4
        mr = np.mod(m, 4)
        q = np.where(r == 0, k // 4, 0)
        even_ok = (r == 0) & ((mr == 2) | (mr == 3)) & sf[q]
        out.append(d[odd_ok | even_ok])
    return np.sort(np.concatenate(out))


def chi(d, p):
    if p == 2:
        r = np.mod(d, 8)
        return np.where(r % 2 == 0, 0, np.where((r == 1) | (r == 7), 1, -1))
    table = np.array([0] + [1 if pow(a, (p - 1) // 2, p) == 1 else -1 for a in range(1, p)])
    return table[np.mod(d, p)]


def blocks(p, y):
    even = odd = 0.0
    q, m = p, 1
    while q <= y:
        c = math.log(p) / q
        if m % 2:
            odd += c
        else:
            even += c
        q *= p
        m += 1
    return even, odd


def main():
    y = float(sys.argv[1]) if len(sys.argv) > 1 else 30.0
    ns = [int(a) for a in sys.argv[2:]] or [10**4, 10**6]
    ps = primes_upto(int(y))

    mean = 0.0
    var = 0.0
    for p in ps:
        e, o = blocks(p, y)
        w0, w1 = 1 / (p + 1), p / (2 * (p + 1))
        vals = [(w0, 0.0), (w1, e + o), (w1, e - o)]
        m1 = sum(w * v for w, v in vals)
        m2 = sum(w * v * v for w, v in vals)
        mean += m1
        var += m2 - m1 * m1
    exact1, exact2 = mean, mean * mean + var
    print(f"exact (1,0) {exact1:.12f}  (1,1)=(2,0) {exact2:.12f}")

    for n in ns:
        d = discriminants(n)
        s = np.zeros(len(d))
        for p in ps:
            e, o = blocks(p, y)
            c = chi(d, p)
            s += np.where(c == 0, 0.0, e + c * o)
        a1, a2 = s.mean(), (s * s).mean()
        print(f"N={n} |F|={len(d)} arith (1,0) {a1:.12f} diff {abs(a1 - exact1):.6e}  "
              f"(1,1) {a2:.12f} diff {abs(a2 - exact2):.6e}")


if __name__ == "__main__":
    main()
