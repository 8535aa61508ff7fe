"""Dense polynomial arithmetic over Z/m, factor extraction over F_p, and
Hensel lifting of cyclotomic factors.

Polynomials are lists of coefficients in ascending degree order. Degrees
stay tiny here (bounded by phi of the tame order), so everything is the
straightforward quadratic algorithm.
"""

from __future__ import annotations

import random
from functools import lru_cache

from sympy import factorint


def trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def padd(f, g, m):
    n = max(len(f), len(g))
    out = [0] * n
    for i, c in enumerate(f):
        out[i] = c
    for i, c in enumerate(g):
        out[i] = (out[i] + c) % m
    return trim(out)


def psub(f, g, m):
    n = max(len(f), len(g))
    out = [0] * n
    for i, c in enumerate(f):
        out[i] = c
    for i, c in enumerate(g):
        out[i] = (out[i] - c) % m
    return trim(out)


def pmul(f, g, m):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == 0:
            continue
        for j, b in enumerate(g):
            out[i + j] = (out[i + j] + a * b) % m
    return trim(out)


def pdivmod(f, g, m):
    """Division with remainder; leading coefficient of g must be a unit mod m."""
    f = list(f)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = pow(g[-1], -1, m)
    dg = len(g) - 1
    q = [0] * max(0, len(f) - dg)
    while len(f) - 1 >= dg and trim(f):
        df = len(f) - 1
        if df < dg:
            break
        c = f[-1] * inv_lead % m
        q[df - dg] = c
        for i, b in enumerate(g):
            f[df - dg + i] = (f[df - dg + i] - c * b) % m
        trim(f)
    return trim(q), trim(f)


def pmod(f, g, m):
    return pdivmod(f, g, m)[1]


def pgcd(f, g, p):
    """Monic gcd over F_p."""
    f = [c % p for c in f]
    g = [c % p for c in g]
    trim(f)
    trim(g)
    while g:
        f, g = g, pmod(f, g, p)
    if f:
        inv = pow(f[-1], -1, p)
        f = [c * inv % p for c in f]
    return f


def ppowmod(f, e: int, g, m):
    """f^e mod g over Z/m."""
    result = [1]
    base = pmod(f, g, m)
    while e:
        if e & 1:
            result = pmod(pmul(result, base, m), g, m)
        base = pmod(pmul(base, base, m), g, m)
        e >>= 1
    return result


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients of the n-th cyclotomic polynomial (exact integers)."""
    if n == 1:
        return (-1, 1)
    # x^n - 1 divided by the cyclotomic polynomials of proper divisors
    f = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            g = list(cyclotomic_poly(d))
            q, r = _zdivmod(f, g)
            assert not r, "cyclotomic division must be exact"
            f = q
    return tuple(f)


def _zdivmod(f, g):
    """Exact integer polynomial division (g monic up to sign of lead 1/-1)."""
    f = list(f)
    dg = len(g) - 1
    lead = g[-1]
    q = [0] * max(0, len(f) - dg)
    while len(f) - 1 >= dg and any(f):
        df = len(f) - 1
        if f[-1] == 0:
            f.pop()
            continue
        if df < dg:
            break
        assert f[-1] % lead == 0
        c = f[-1] // lead
        q[df - dg] = c
        for i, b in enumerate(g):
            f[df - dg + i] -= c * b
        while f and f[-1] == 0:
            f.pop()
    return q, f


def is_irreducible(f, p) -> bool:
    """Rabin test over F_p."""
    n = len(f) - 1
    if n <= 0:
        return False
    x = [0, 1]
    h = ppowmod(x, p**n, f, p)
    if psub(h, x, p):
        return False
    for q in {d for d in factorint(n)}:
        h = ppowmod(x, p ** (n // q), f, p)
        if len(pgcd(psub(h, x, p), f, p)) > 1:
            return False
    return True


def equal_degree_factors(f, p: int, d: int, rng: random.Random) -> list[list[int]]:
    """Split a squarefree product of degree-d irreducibles over F_p (p odd)."""
    n = len(f) - 1
    if n == d:
        inv = pow(f[-1], -1, p)
        return [[c * inv % p for c in f]]
    while True:
        r = [rng.randrange(p) for _ in range(n)] + [1]
        h = ppowmod(r, (p**d - 1) // 2, f, p)
        g = pgcd(psub(h, [1], p), f, p)
        if 0 < len(g) - 1 < n:
            other, rem = pdivmod(f, g, p)
            assert not rem
            return equal_degree_factors(g, p, d, rng) + equal_degree_factors(
                other, p, d, rng
            )


def cyclotomic_factor_mod_p(m: int, p: int, index: int = 0) -> list[int]:
    """One monic degree-f irreducible factor of Phi_m mod p, f = ord_m(p).

    The full factor list is sorted by coefficient tuple so `index` selects a
    reproducible embedding (a choice of prime above p).
    """
    if m % p == 0:
        raise ValueError("tame order must be prime to p")
    if m == 1:
        return [(-1) % p, 1]
    f = 1
    while pow(p, f, m) != 1:
        f += 1
    phi = [c % p for c in cyclotomic_poly(m)]
    trim(phi)
    rng = random.Random(0x1A5A + 31 * m + p)
    factors = equal_degree_factors(phi, p, f, rng)
    factors.sort(key=tuple)
    return factors[index % len(factors)]


def hensel_lift_factor(F, g, p: int, N: int) -> list[int]:
    """Lift a monic factor g of F from mod p to mod p^N (F monic over Z)."""
    if N == 1:
        return [c % p for c in g]
    m = p
    g = [c % p for c in g]
    h, r = pdivmod([c % p for c in F], g, p)
    assert not r, "g must divide F mod p"
    # Bezout: s*g + t*h = 1 mod p
    s, t = _bezout(g, h, p)
    while m < p**N:
        m2 = min(m * m, p**N)
        e = psub([c % m2 for c in F], pmul(g, h, m2), m2)
        q, r = pdivmod(pmul(s, e, m2), h, m2)
        g = padd(g, padd(pmul(t, e, m2), pmul(q, g, m2), m2), m2)
        h = padd(h, r, m2)
        if m2 == p**N:
            break
        b = psub(padd(pmul(s, g, m2), pmul(t, h, m2), m2), [1], m2)
        c, d = pdivmod(pmul(s, b, m2), h, m2)
        s = psub(s, d, m2)
        t = psub(t, padd(pmul(t, b, m2), pmul(c, g, m2), m2), m2)
        m = m2
    return g


def _bezout(g, h, p):
    """s, t with s*g + t*h = 1 over F_p for coprime g, h."""
    r0, r1 = [c % p for c in g], [c % p for c in h]
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = pdivmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, psub(s0, pmul(q, s1, p), p)
        t0, t1 = t1, psub(t0, pmul(q, t1, p), p)
    assert len(r0) == 1, "factors are not coprime"
    inv = pow(r0[0], -1, p)
    return [c * inv % p for c in s0], [c * inv % p for c in t0]
