"""Finite fields F_q, power residue symbols, Jacobi sums, and the
Jacobi-sum route to L_p'(0, chi) in the trivial-zero case.

Gauss sums themselves are never formed (they live in F_q(zeta_p)); only the
d-th power combination J(a, phi) = phi(-1) q prod_j J(phi^-a, phi^-ja) is
used, so all arithmetic stays in Z[zeta_d]. The residue symbol is anchored
to the same prime above p as the host ring's root-of-unity embedding:
phi(g^i) = zeta_d^i for the subfield generator g derived from the ring's
canonical residue-field generator, which makes log J values and character
values live coherently in one ring.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from sympy import factorint

from . import gfpoly
from .localring import LocalRing, RingElement, iwasawa_log
from .padicint import inv_mod

_DLOG_TABLE_LIMIT = 1 << 24


class JacobiInfeasible(Exception):
    pass


class FiniteField:
    """F_q = F_(p^F) enumerated inside the residue field of a host ring.

    Elements are packed base-p integers of host-field coordinates. The
    generator is G^((p^f-1)/(q-1)) for the ring's canonical generator G, so
    exponents line up with the ring's Teichmuller roots.
    """

    def __init__(self, ring: LocalRing, F: int):
        if ring.f % F != 0:
            raise ValueError("subfield degree must divide the host degree")
        self.ring = ring
        self.p = ring.p
        self.F = F
        self.q = ring.p**F
        self.f = ring.f
        self.modulus = ring.residue_modulus
        if self.p**self.f > _DLOG_TABLE_LIMIT:
            raise JacobiInfeasible(
                f"host field size {self.p**self.f} exceeds the dlog table limit")
        self.generator = self._subfield_generator()
        self._pow_packed: np.ndarray | None = None
        self._dlog: np.ndarray | None = None

    def _subfield_generator(self) -> list[int]:
        G = self.ring.residue_generator()
        e = (self.p**self.f - 1) // (self.q - 1)
        return self.ring._res_pow(G, e)

    def _mul_matrix(self, h: list[int]) -> np.ndarray:
        """Matrix of multiplication by h on F_p^f (columns = h * y^k)."""
        p, f = self.p, self.f
        M = np.zeros((f, f), dtype=np.int64)
        col = list(h) + [0] * (f - len(h))
        for k in range(f):
            for i in range(f):
                M[i, k] = col[i] % p
            nxt = gfpoly.pmul(col, [0, 1], p)
            nxt = gfpoly.pmod(nxt, self.modulus, p)
            col = nxt + [0] * (f - len(nxt))
        return M

    def _tables(self):
        if self._pow_packed is not None:
            return self._pow_packed, self._dlog
        p, f, q = self.p, self.f, self.q
        weights = np.array([p**k for k in range(f)], dtype=np.int64)
        B = min(1 << 12, q - 1)
        baby = np.zeros((B, f), dtype=np.int64)
        cur = [1] + [0] * (f - 1)
        for i in range(B):
            baby[i] = cur
            nxt = gfpoly.pmod(gfpoly.pmul(cur, self.generator, p), self.modulus, p)
            cur = nxt + [0] * (f - len(nxt))
        giant = self._mul_matrix(cur)  # cur = g^B after the loop
        pow_packed = np.zeros(q - 1, dtype=np.int64)
        dlog = np.full(p**f, -1, dtype=np.int32)
        block = baby
        idx = 0
        while idx < q - 1:
            take = min(B, q - 1 - idx)
            packed = block[:take] @ weights
            pow_packed[idx:idx + take] = packed
            dlog[packed] = np.arange(idx, idx + take, dtype=np.int32)
            idx += take
            if idx < q - 1:
                block = block @ giant.T % p
        self._pow_packed = pow_packed
        self._dlog = dlog
        return pow_packed, dlog

    def dlog_of_one_minus(self) -> np.ndarray:
        """dlog(1 - g^i) for i = 1..q-2 (index 0 unused)."""
        pow_packed, dlog = self._tables()
        p, f = self.p, self.f
        packed = pow_packed.copy()
        out = np.zeros(self.q - 1, dtype=np.int64)
        # digits of 1 - x from digits of x
        rem = packed
        digits = []
        for k in range(f):
            digits.append(rem % p)
            rem = rem // p
        one_minus = np.zeros_like(packed)
        mult = 1
        for k in range(f):
            dk = (1 - digits[k]) % p if k == 0 else (-digits[k]) % p
            one_minus += dk * mult
            mult *= p
        out[1:] = dlog[one_minus[1:]]
        return out

    def dlog(self, packed: int) -> int:
        """Discrete log of a packed element (table, or Pohlig-Hellman)."""
        pw, dl = self._tables()
        v = int(dl[packed])
        if v < 0:
            raise ValueError("element not in the subfield")
        return v


def pohlig_hellman_dlog(field: FiniteField, target: list[int]) -> int:
    """Reference dlog without the full table (small-prime group orders)."""
    p, q = field.p, field.q
    n = q - 1
    ring = field.ring
    g = field.generator
    crt_residues = []
    crt_moduli = []
    for ell, k in factorint(n).items():
        m = ell**k
        ge = ring._res_pow(g, n // m)
        te = ring._res_pow(target, n // m)
        # baby-step giant-step in the order-m subgroup
        x = 0
        gamma = ring._res_pow(ge, m // ell)  # order ell
        for j in range(k):
            h = ring._res_pow(
                _res_mul_inv_pow(ring, te, ge, x), m // ell ** (j + 1))
            c = _bsgs(ring, gamma, h, ell)
            x += c * ell**j
        crt_residues.append(x)
        crt_moduli.append(m)
    x = 0
    mod = 1
    for r, m in zip(crt_residues, crt_moduli):
        inv = inv_mod(mod % m, m) if mod % m else 0
        x = x + mod * ((r - x) * inv % m) if mod > 1 else r
        mod *= m
    return x % n


def _res_mul_inv_pow(ring, a, g, e):
    """a * g^(-e) in the residue field."""
    q1 = ring.p**ring.f - 1
    ge = ring._res_pow(g, (-e) % q1)
    prod = gfpoly.pmod(gfpoly.pmul(list(a), ge, ring.p), ring.residue_modulus,
                       ring.p)
    return prod + [0] * (ring.f - len(prod))


def _bsgs(ring, gamma, h, ell):
    seen = {}
    cur = [1] + [0] * (ring.f - 1)
    m = int(ell**0.5) + 1
    for j in range(m):
        seen[tuple(cur)] = j
        cur = _res_mul_inv_pow(ring, cur, gamma, -1)
    factor = ring._res_pow(gamma, (-m) % (ring.p**ring.f - 1))
    y = list(h)
    for i in range(m + 1):
        if tuple(y + [0] * (ring.f - len(y))) in seen:
            return (i * m + seen[tuple(y + [0] * (ring.f - len(y)))]) % ell
        y = _res_mul_inv_pow(ring, y, factor, -1)
    raise ValueError("bsgs failed")


@dataclass
class ResidueSymbol:
    """The d-th power residue symbol phi(x) = x^((q-1)/d) mod the ring prime."""

    field: FiniteField
    d: int

    def __post_init__(self):
        if (self.field.q - 1) % self.d != 0:
            raise ValueError("d must divide q - 1")

    def exponent(self, i: int) -> int:
        """phi(g^i) = zeta_d^(this)."""
        return i % self.d

    @property
    def minus_one_exponent(self) -> int:
        return ((self.field.q - 1) // 2) % self.d


def jacobi_sum(sym: ResidueSymbol, e1: int, e2: int) -> list[int]:
    """J(phi^e1, phi^e2) = -sum_{x} phi^e1(x) phi^e2(1-x), as a Z[zeta_d] vector.

    Requires phi^e1, phi^e2 and their product nontrivial.
    """
    d = sym.d
    if e1 % d == 0 or e2 % d == 0 or (e1 + e2) % d == 0:
        raise ValueError("trivial symbol in a Jacobi sum; use jacobi_product")
    q = sym.field.q
    dlog1m = sym.field.dlog_of_one_minus()
    i = np.arange(1, q - 1, dtype=np.int64)
    expo = (e1 % d * i + e2 % d * dlog1m[1:]) % d
    counts = np.bincount(expo, minlength=d)
    return [-int(c) for c in counts]


def _polymul_cyclic(a: list[int], b: list[int], d: int) -> list[int]:
    out = [0] * d
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y:
                out[(i + j) % d] += x * y
    return out


def conjugate_vector(vec: list[int]) -> list[int]:
    d = len(vec)
    return [vec[(-e) % d] for e in range(d)]


def galois_twist_vector(vec: list[int], t: int) -> list[int]:
    d = len(vec)
    out = [0] * d
    for e, c in enumerate(vec):
        out[e * t % d] += c
    return out


def reduce_mod_cyclotomic(vec: list[int], d: int) -> list[int]:
    """Canonical form in Z[zeta_d]: reduce mod Phi_d (exact integers)."""
    phi = list(gfpoly.cyclotomic_poly(d))
    _, r = gfpoly._zdivmod(list(vec), phi)
    return r + [0] * (len(phi) - 1 - len(r))


def jacobi_product(a: int, sym: ResidueSymbol) -> list[int]:
    """J(a, phi) = phi(-1) q prod_{j=1}^{d-2} J(phi^-a, phi^-ja).

    Equals g(phi^-a)^d; for d = 2 the product is empty and the value is
    phi(-1) q.
    """
    d = sym.d
    if gcd(a, d) != 1:
        raise ValueError("a must be prime to d")
    q = sym.field.q
    out = [0] * d
    out[sym.minus_one_exponent] = q
    for j in range(1, d - 1):
        J = jacobi_sum(sym, (-a) % d, (-j * a) % d)
        out = _polymul_cyclic(out, J, d)
    return out


def embed_vector(vec: list[int], ring: LocalRing, d: int) -> RingElement:
    """sum_e vec[e] zeta_d^e under the ring's canonical embedding."""
    root = ring.root_of_unity(d)
    total = ring.zero()
    cur = ring.one()
    for e in range(d):
        if vec[e]:
            total = total + cur.scale_int(vec[e])
        if e + 1 < d:
            cur = cur * root
    return total


def jacobi_route_value(chi, ring: LocalRing, precision: int | None = None,
                       q_limit: int = 10**7):
    """L_p'(0, chi) = (1/d) sum over (Z/d)^*/<p> of chi omega^-1(a) log_p J(a, phi).

    Only valid in the trivial-zero case chi omega^-1(p) = 1. Works in an
    internal high-precision ring sized to the p-content of the J values
    (v_p(J) <= d F), then reduces into the caller's ring.
    """
    from .kernels import ring_for_char
    from .lvalues import LSpecialValue, RouteInfeasible, chi_omega_power

    p = ring.p
    prec = precision if precision is not None else min(ring.N, 4)
    xi = chi_omega_power(chi, p, -1)
    d = xi.conductor
    if d % p == 0:
        raise RouteInfeasible("conductor divisible by p: use the G_p route")
    if xi.value_exponent(p) != 0:
        raise RouteInfeasible("no trivial zero: the Jacobi route needs "
                              "chi omega^{-1}(p) = 1")
    F = 1
    while pow(p, F, d) != 1 % d:
        F += 1
    q = p**F
    if q > q_limit:
        raise RouteInfeasible(
            f"q = p^F = {q} over the feasibility bound; use the G_p route")
    probe = ring_for_char(p, 1, d, xi.order)
    if ring.tame_order % probe.tame_order != 0:
        raise ValueError(
            f"ring must contain zeta_{probe.tame_order}; build it with the "
            f"conductor of chi omega^-1 among the required orders")
    # same structure as the caller's ring, deeper precision: v_p(J) <= d*F
    NJ = prec + d * F + 3
    from .localring import make_ring

    big = make_ring(p, NJ, ring.tame_order, ring.wild_level,
                    ring.embedding_index)
    fld = FiniteField(big, F)
    sym = ResidueSymbol(fld, d)
    root = big.root_of_unity(xi.order) if xi.order > 1 else big.one()
    pow_cache = [root.pow(t) for t in range(xi.order)]
    total = big.zero()
    seen = [False] * d
    for a in range(1, d):
        if seen[a] or gcd(a, d) != 1:
            continue
        b = a
        while not seen[b]:
            seen[b] = True
            b = b * p % d
        J = jacobi_product(a, sym)
        lg = iwasawa_log(embed_vector(J, big, d))
        e = xi.value_exponent(a)
        total = total + pow_cache[e] * lg
    total = total * big.from_int(inv_mod(d, big.pN))
    # reduce into the caller's ring
    value = transfer_element(total, ring).truncate(prec)
    return LSpecialValue(value, "d/ds at 0", "gross-koblitz-jacobi", prec)


def transfer_element(x: RingElement, target: LocalRing) -> RingElement:
    """Move an element to a ring differing only in precision.

    Hensel lifts are unique over the chosen mod-p factor, so the lower
    precision ring's structure constants are reductions of the higher one's.
    """
    src = x.ring
    if (src.p, src.tame_order, src.wild_level, src.embedding_index) != (
            target.p, target.tame_order, target.wild_level,
            target.embedding_index):
        raise ValueError("rings are structurally different")
    cap = target.pN
    return RingElement(target, tuple(c % cap for c in x.coeffs), x.shift,
                       min(x.prec, target.N + x.shift))
