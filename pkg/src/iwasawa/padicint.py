"""Scalar arithmetic in Z/p^M viewed as truncated Z_p.

Everything here works on plain Python ints; the ring-valued layer sits in
localring. Conventions: elements are residues in [0, p^M); "unit" means
prime to p; logarithms use the Iwasawa branch (log_p p = 0, log of roots
of unity = 0).
"""

from __future__ import annotations

from fractions import Fraction


def vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_fraction(x: Fraction, p: int) -> int:
    if x == 0:
        raise ValueError("valuation of 0 is infinite")
    return vp(x.numerator, p) - vp(x.denominator, p)


def inv_mod(a: int, modulus: int) -> int:
    return pow(a, -1, modulus)


def fraction_mod(x: Fraction, modulus: int) -> int:
    """Reduce a rational with denominator prime to the modulus."""
    return x.numerator * pow(x.denominator, -1, modulus) % modulus


def teichmuller_int(a: int, p: int, M: int) -> int:
    """The (p-1)-st root of unity in Z/p^M congruent to a mod p.

    Computed as a^(p^(M-1)) mod p^M; Fermat gives the fixed point.
    """
    if a % p == 0:
        raise ValueError("Teichmuller lift needs a unit")
    return pow(a, p ** (M - 1), p**M)


def log_series_bound(p: int, M: int) -> int:
    """Smallest cutoff i0 with v(u^i / i) >= M for all i >= i0 when v(u) >= 1."""
    i = M
    while i - vp(i, p) < M:
        i += 1
    # valuations i - v_p(i) are nondecreasing past this point only in
    # steps; rescan a short horizon to be safe
    j = i
    for k in range(i, 4 * i + 8):
        if k - vp(k, p) < M:
            j = k + 1
    return j


def log_principal_unit(u: int, p: int, M: int) -> int:
    """log_p of u with u = 1 mod p, exact in Z/p^M."""
    x = (u - 1) % p**M
    if x % p != 0:
        raise ValueError("argument is not a principal unit")
    if x == 0:
        return 0
    pM = p**M
    cut = log_series_bound(p, M)
    # work with guard digits so the division by i stays exact
    extra = 0
    i = 1
    while i <= cut:
        extra = max(extra, vp(i, p))
        i += 1
    big = p ** (M + extra)
    xb = x % big
    term = xb
    total = 0
    for i in range(1, cut + 1):
        t = vp(i, p)
        unit = i // p**t
        contrib = (term // p**t) * inv_mod(unit, big)
        if i % 2 == 1:
            total += contrib
        else:
            total -= contrib
        total %= big
        term = term * xb % big
    return total % pM


def log_unit(a: int, p: int, M: int) -> int:
    """Iwasawa log of a unit: strips the Teichmuller part first."""
    a %= p**M
    if a % p == 0:
        raise ValueError("log_unit needs a unit")
    om = teichmuller_int(a, p, M)
    principal = a * inv_mod(om, p**M) % p**M
    return log_principal_unit(principal, p, M)


def log_rational(x: Fraction, p: int, M: int) -> int:
    """Iwasawa log of a nonzero rational: log_p p = 0."""
    v = vp_fraction(x, p)
    unit = x / Fraction(p) ** v
    num = unit.numerator % p**M
    den = unit.denominator % p**M
    sign = 1
    if num < 0:
        num = -num
        sign = -1
    val = (log_unit(num, p, M) - log_unit(den, p, M)) % p**M
    # log(-u) = log(u): the sign is a root of unity
    del sign
    return val


def log_one_plus_p(p: int, M: int) -> int:
    """log_p(1 + p) mod p^M; has valuation exactly 1."""
    return log_principal_unit(1 + p, p, M)
