"""Classical and generalized Bernoulli numbers, Euler and Glaisher numbers.

Exact rational arithmetic is confined to setup (Bernoulli polynomial
coefficients, cleared to scaled integer weights once per (n, F)); the sum
over residues runs through the bucketed kernels in residue arithmetic,
which keeps the hot path linear in the conductor.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .characters import DirichletChar
from .kernels import CharSumPlan, power_sum_buckets
from .localring import LocalRing, RingElement
from .padicint import fraction_mod, vp_fraction


@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """B_n with the B_1 = -1/2 convention, via the binomial recurrence."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(-1, 2)
    if n % 2 == 1:
        return Fraction(0)
    s = Fraction(0)
    for k in range(n):
        s += comb(n + 1, k) * bernoulli_number(k)
    return -s / (n + 1)


@lru_cache(maxsize=None)
def bernoulli_polynomial(n: int) -> tuple[Fraction, ...]:
    """Coefficients of B_n(x), ascending: B_n(x) = sum_j C(n,j) B_{n-j} x^j."""
    return tuple(comb(n, j) * bernoulli_number(n - j) for j in range(n + 1))


@lru_cache(maxsize=None)
def euler_number(n: int) -> Fraction:
    """E_n from 2/(e^x + e^-x) = sum E_n x^n / n!."""
    if n == 0:
        return Fraction(1)
    # sum_{k<=n, n-k even} C(n,k) E_k = [n = 0]
    s = Fraction(0)
    for k in range(n):
        if (n - k) % 2 == 0:
            s += comb(n, k) * euler_number(k)
    return -s


@lru_cache(maxsize=None)
def glaisher_number(n: int) -> Fraction:
    """Glaisher I-numbers G_n from (3/2)/(1 + e^x + e^-x)."""
    # (1 + e^x + e^-x) has x^m coefficient c_m = (1 + (-1)^m)/m!, c_0 = 3
    if n == 0:
        return Fraction(1, 2)
    s = Fraction(0)
    for k in range(n):
        if (n - k) % 2 == 0:
            s += 2 * comb(n, k) * glaisher_number(k)
    return -s / 3


@dataclass
class BernoulliValue:
    """B_{n,chi} at a given precision, with the character and index kept."""

    value: RingElement
    n: int
    char: DirichletChar
    precision: int


def _sum_coefficients(n: int, F: int) -> list[tuple[int, Fraction]]:
    """(t, c_t) with B_{n,chi}@F = sum_t c_t * S_t, S_t = sum_a chi(a) a^t.

    From B_{n,chi} = F^(n-1) sum_a chi(a) B_n(a/F): the x^t coefficient of
    B_n contributes C(n,t) B_{n-t} F^(t-1) to S_t.
    """
    out = []
    for t in range(n + 1):
        c = comb(n, t) * bernoulli_number(n - t) * Fraction(F) ** (n - 1 - t)
        if c:
            out.append((t, c))
    return out


def generalized_bernoulli(n: int, chi: DirichletChar, ring: LocalRing,
                          precision: int | None = None,
                          modulus: int | None = None) -> BernoulliValue:
    """B_{n,chi} as a ring element.

    Evaluates the primitive character, so any modulus that is a multiple of
    the conductor reproduces the primitive value exactly (distribution
    relation of the Bernoulli polynomials).
    """
    if n < 1:
        raise ValueError("index must be >= 1")
    if chi.is_trivial and n == 1:
        raise ValueError("B_{1,1} excluded (trivial character at n = 1)")
    chi = chi.primitive()
    p = ring.p
    prec = ring.N if precision is None else precision
    F = chi.conductor if modulus is None else modulus
    if F % chi.conductor != 0:
        raise ValueError("modulus must be a multiple of the conductor")
    if chi.is_trivial:
        # B_n(1) = B_n for n >= 2; modulus-F sums still apply when asked
        if modulus is None:
            return BernoulliValue(ring.from_fraction(bernoulli_number(n)), n,
                                  chi, prec)
    coeffs = _sum_coefficients(n, F)
    shift = max(0, max(-vp_fraction(c, p) for _, c in coeffs))
    M = prec + shift + 2
    if M > ring.N:
        raise ValueError(
            f"requested precision {prec} needs {M} digits > ring's {ring.N}")
    pM = p**M
    plan = CharSumPlan(chi, p, F)
    sums = power_sum_buckets(plan, M, [t for t, _ in coeffs])
    buckets = [0] * plan.nbuckets
    for t, c in coeffs:
        scaled = fraction_mod(c * Fraction(p) ** shift, pM)
        st = sums[t]
        for b in range(plan.nbuckets):
            buckets[b] = (buckets[b] + scaled * st[b]) % pM
    value = plan.assemble(ring, buckets, -shift, M - shift)
    return BernoulliValue(value, n, chi, M - shift)


def generalized_bernoulli_exact(n: int, chi: DirichletChar) -> Fraction:
    """Exact rational B_{n,chi} for characters with values +-1."""
    chi = chi.primitive()
    if chi.order > 2:
        raise ValueError("exact path only for quadratic or trivial characters")
    F = chi.conductor
    poly = bernoulli_polynomial(n)
    total = Fraction(0)
    for a in range(1, F + 1):
        e = chi.value_exponent(a)
        if e is None:
            continue
        x = Fraction(a, F)
        val = sum(c * x**j for j, c in enumerate(poly))
        total += (-1) ** e * val
    if chi.is_trivial:
        total = sum(poly)  # B_n(1) = B_n for n != 1
    return Fraction(F) ** (n - 1) * total
