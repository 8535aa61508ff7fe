"""Bucketed character-sum kernels.

Every heavy sum in the library has the shape sum_a chi(a) * w(a) with w(a)
an explicitly computable p-adic scalar. The kernels bucket the a-range by
the exponent of chi(a), so the hot loop is integer array work; the handful
of bucket totals are assembled into a ring element at the end. Bucket
addition is commutative and exact, which keeps results bit-identical
regardless of chunking.

Weights are int64 arrays while p^(2M) fits (all survey-scale cases) and
object arrays of Python ints beyond that; bucket indices are always int64.
"""

from __future__ import annotations

import numpy as np

from .localring import LocalRing, RingElement
from .padicint import inv_mod, log_series_bound, vp


def int64_safe(p: int, M: int) -> bool:
    """Whether products of two residues mod p^M stay inside int64."""
    return (p**M) ** 2 < 2**62


def weight_dtype(p: int, M: int):
    return np.int64 if int64_safe(p, M) else object


class ScalarTables:
    """Per-(p, M) arrays over [0, limit): a^(-1) mod p^M and log_p<a>.

    Entries at p | a are 0. Grown on demand and shared across characters.
    """

    _cache: dict[tuple[int, int], "ScalarTables"] = {}

    def __init__(self, p: int, M: int):
        self.p = p
        self.M = M
        self.pM = p**M
        self.limit = 0
        self.dtype = weight_dtype(p, M)
        self.inv: np.ndarray | None = None
        self.log: np.ndarray | None = None

    @classmethod
    def get(cls, p: int, M: int, limit: int) -> "ScalarTables":
        key = (p, M)
        t = cls._cache.get(key)
        if t is None:
            t = cls(p, M)
            cls._cache[key] = t
        t.ensure(limit)
        return t

    def ensure(self, limit: int):
        if limit <= self.limit:
            return
        limit = max(limit, 2 * self.limit, 1024)
        self._build(limit)
        self.limit = limit

    def _powmod(self, base: np.ndarray, e: int) -> np.ndarray:
        out = np.ones_like(base)
        b = base % self.pM
        while e:
            if e & 1:
                out = out * b % self.pM
            b = b * b % self.pM
            e >>= 1
        return out

    def _build(self, limit: int):
        p, M, pM = self.p, self.M, self.pM
        a = np.arange(limit, dtype=self.dtype)
        unit = np.arange(limit, dtype=np.int64) % p != 0
        au = np.where(unit, a % pM, 1)
        # inverse: Fermat mod p, then Newton lifting to p^M
        x = self._powmod(au % p, p - 2) % p
        k = 1
        while (1 << k) < M + 1:
            k += 1
        for _ in range(k + 1):
            x = x * ((2 - au * x) % pM) % pM
        self.inv = np.where(unit, x, 0)
        # Teichmuller, then the log series on the principal-unit part
        tau = self._powmod(au, p ** (M - 1))
        tau_inv = self._powmod(tau, p - 2)
        u = au * tau_inv % pM
        w = (u - 1) // p  # exact: u = 1 mod p
        total = np.zeros(limit, dtype=self.dtype)
        wpow = w.copy()
        cutoff = log_series_bound(p, M)
        for i in range(1, cutoff + 1):
            t = vp(i, p) if i > 1 else 0
            exp = i - t
            if exp < M:
                c = inv_mod(i // p**t, pM)
                term = wpow * c % pM * (p**exp) % pM
                if i % 2 == 1:
                    total = (total + term) % pM
                else:
                    total = (total - term) % pM
            if i < cutoff:
                wpow = wpow * w % pM
        self.log = np.where(unit, total, 0)


class CharSumPlan:
    """Bucket indices for one character evaluated primitively on [0, F).

    chi(a) = zeta_A^tame * zeta_{p^c}^wild; the bucket index is
    tame * p^c + wild, with a trailing dead bucket for chi(a) = 0 (and,
    with skip_p, for p | a).
    """

    def __init__(self, chi, p: int, F: int, skip_p: bool = False):
        chi = chi.primitive()
        self.chi = chi
        self.p = p
        self.F = F
        self.skip_p = skip_p
        D = chi.order
        pc = 1
        while D % (pc * p) == 0:
            pc *= p
        A = D // pc
        self.A, self.pc, self.D = A, pc, D
        self.nbuckets = A * pc
        self.u = inv_mod(pc, A) if A > 1 else 0
        self.v = inv_mod(A, pc) if pc > 1 else 0
        self._indices: np.ndarray | None = None

    def indices(self) -> np.ndarray:
        if self._indices is not None:
            return self._indices
        F, D, p = self.F, self.D, self.p
        a = np.arange(F, dtype=np.int64)
        dead = np.zeros(F, dtype=bool)
        E = np.zeros(F, dtype=np.int64)
        chi = self.chi
        group = chi.group
        for e, c, dl in zip(chi.exps, group.components, group.dlog_tables()):
            w = D * e // c.order
            t = np.asarray(dl, dtype=np.int64)
            vals = t[a % c.modulus]
            dead |= vals < 0
            E = (E + vals % D * (w % D)) % D
        if self.skip_p:
            dead |= (a % p) == 0
        dead[0] = True
        tame = E * self.u % self.A if self.A > 1 else np.zeros(F, dtype=np.int64)
        wild = E * self.v % self.pc if self.pc > 1 else np.zeros(F, dtype=np.int64)
        idx = tame * self.pc + wild
        idx[dead] = self.nbuckets
        self._indices = idx
        return idx

    def accumulate(self, weights: np.ndarray, pM: int) -> list[int]:
        """Per-bucket sums of the weight array (dead bucket dropped)."""
        idx = self.indices()
        acc = np.zeros(self.nbuckets + 1,
                       dtype=np.int64 if weights.dtype != object else object)
        np.add.at(acc, idx, weights)
        return [int(x) % pM for x in acc[:-1]]

    def assemble(self, ring: LocalRing, bucket_vals: list[int], shift: int,
                 prec: int) -> RingElement:
        """sum over buckets of vals[t*pc + c] zeta_A^t zeta_{p^c}^c, times p^shift."""
        A, pc = self.A, self.pc
        pN = ring.pN
        zA = ring.root_of_unity(A) if A > 1 else ring.one()
        zW = ring.root_of_unity(pc) if pc > 1 else ring.one()
        dim = ring.dim
        total = [0] * dim
        scalar_tame = all(c == 0 for c in zA.coeffs[1:]) and zA.shift == 0
        if scalar_tame:
            zs = zA.coeffs[0]
            tame_pows = [1] * A
            for t in range(1, A):
                tame_pows[t] = tame_pows[t - 1] * zs % pN
            wild_elt = ring.one()
            for c in range(pc):
                inner = 0
                for t in range(A):
                    val = bucket_vals[t * pc + c]
                    if val:
                        inner = (inner + val * tame_pows[t]) % pN
                if inner:
                    for j in range(dim):
                        cj = wild_elt.coeffs[j]
                        if cj:
                            total[j] = (total[j] + inner * cj) % pN
                if c + 1 < pc:
                    wild_elt = wild_elt * zW
        else:
            tame_pows = [ring.one()]
            for t in range(1, A):
                tame_pows.append(tame_pows[-1] * zA)
            wild_elt = ring.one()
            for c in range(pc):
                inner = [0] * dim
                nonzero = False
                for t in range(A):
                    val = bucket_vals[t * pc + c]
                    if val:
                        nonzero = True
                        tp = tame_pows[t]
                        for j in range(dim):
                            inner[j] = (inner[j] + val * tp.coeffs[j]) % pN
                if nonzero:
                    term = RingElement(ring, tuple(inner), 0, ring.N) * wild_elt
                    for j in range(dim):
                        total[j] = (total[j] + term.coeffs[j]) % pN
                if c + 1 < pc:
                    wild_elt = wild_elt * zW
        return RingElement(ring, tuple(total), shift, prec)


def arange_mod(F: int, p: int, M: int) -> np.ndarray:
    return np.arange(F, dtype=weight_dtype(p, M)) % (p**M)


def power_sum_buckets(plan: CharSumPlan, M: int,
                      powers: list[int]) -> dict[int, list[int]]:
    """Bucketed sums of a^t for each t in `powers`, mod p^M."""
    p, F = plan.p, plan.F
    pM = p**M
    a = arange_mod(F, p, M)
    out: dict[int, list[int]] = {}
    need = sorted(set(powers))
    arr = np.ones(F, dtype=a.dtype)
    t = 0
    for target in need:
        while t < target:
            arr = arr * a % pM
            t += 1
        out[target] = plan.accumulate(arr, pM)
    return out


def ring_for_char(p: int, N: int, *orders: int, wild: int = 0,
                  embedding_index: int = 0) -> LocalRing:
    """Smallest-compositum ring containing mu_order for each given order.

    Tame order = lcm of the prime-to-p parts; divisors of p - 1 cost
    nothing since ord_A(p) = 1 for A | p - 1 (Teichmuller roots).
    """
    from math import lcm

    from .localring import make_ring

    tame = 1
    wild_level = wild
    for o in orders:
        pc = 0
        t = o
        while t % p == 0:
            t //= p
            pc += 1
        tame = lcm(tame, t)
        wild_level = max(wild_level, pc)
    return make_ring(p, N, tame, wild_level, embedding_index)
