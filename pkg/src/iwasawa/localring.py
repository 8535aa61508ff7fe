"""Exact arithmetic in truncated local rings Z_p[zeta_m', zeta_{p^w}] / p^N.

The ring is the compositum of an unramified part (one Hensel-lifted
irreducible factor G of the m'-th cyclotomic polynomial, degree f) and a
totally ramified part (pi = zeta_{p^w} - 1 with Eisenstein relation
Phi_{p^w}(1 + pi) = 0, degree e = phi(p^w)). Elements carry e*f residues
mod p^N in the basis pi^j y^k, an integer `shift` (the element is
vector * p^shift, so negative valuations stay exact), and an absolute
precision exponent.

Choosing the factor G fixes an embedding, i.e. a prime above p; the
`embedding_index` argument selects among the conjugate choices so that
embedding independence can be tested. The canonical prime-to-p root of
unity of order t is G_gen^((p^f-1)/t) where G_gen is the Teichmuller lift
of a residue-field generator normalised so that characters built on the
smallest primitive root mod p evaluate to honest Teichmuller lifts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from sympy import factorint, isprime, primitive_root

from . import gfpoly
from .padicint import fraction_mod, inv_mod, vp, vp_fraction


class PrecisionLoss(Exception):
    """A decision required more p-adic digits than were available."""


class NonUnitError(Exception):
    pass


@dataclass(frozen=True)
class Valuation:
    """Normalized valuation with v(p) = 1, or a proven lower bound.

    `value` is exact when set; otherwise the element was indistinguishable
    from zero and `below` carries the bound actually proven (v >= below).
    """

    value: Fraction | None
    below: int | None = None

    @classmethod
    def exact(cls, v) -> "Valuation":
        return cls(Fraction(v))

    @classmethod
    def below_precision(cls, bound: int) -> "Valuation":
        return cls(None, bound)

    @property
    def is_exact(self) -> bool:
        return self.value is not None

    def decides_less_than(self, threshold) -> bool:
        """Whether v < threshold, if decidable at this precision."""
        threshold = Fraction(threshold)
        if self.value is not None:
            return self.value < threshold
        if Fraction(self.below) >= threshold:
            return False
        raise PrecisionLoss(
            f"valuation only known to be >= {self.below}, "
            f"cannot compare with {threshold}"
        )

    def __str__(self):
        if self.value is not None:
            return str(self.value)
        return f">={self.below}"


class LocalRing:
    """Descriptor of Z_p[zeta_tame, zeta_{p^wild}] modulo p^N."""

    def __init__(self, p: int, N: int, tame_order: int = 1, wild_level: int = 0,
                 embedding_index: int = 0):
        if p == 2 or not isprime(p):
            raise ValueError("p must be an odd prime")
        if tame_order % p == 0:
            raise ValueError("tame order must be prime to p")
        if N < 1:
            raise ValueError("precision must be >= 1")
        self.p = p
        self.N = N
        self.tame_order = tame_order
        self.wild_level = wild_level
        self.embedding_index = embedding_index
        self.pN = p**N

        self.f = 1
        while pow(p, self.f, tame_order) != 1 % tame_order:
            self.f += 1
        self.e = (p - 1) * p ** (wild_level - 1) if wild_level > 0 else 1

        g0 = gfpoly.cyclotomic_factor_mod_p(tame_order, p, embedding_index)
        phi = [c % self.pN for c in gfpoly.cyclotomic_poly(tame_order)]
        self.unram_modulus = gfpoly.hensel_lift_factor(phi, g0, p, N)
        assert len(self.unram_modulus) - 1 == self.f

        if wild_level > 0:
            self.eisenstein = self._eisenstein_poly()
            self._pi_rows = self._reduction_rows()
        else:
            self.eisenstein = None
            self._pi_rows = []

        self.dim = self.e * self.f
        self._gen_cache: dict[int, "RingElement"] = {}
        self._teich_generator: RingElement | None = None
        self._g_p = primitive_root(p) if p > 3 else 2  # smallest for p=3 is 2

    # -- construction helpers -------------------------------------------------

    def _eisenstein_poly(self) -> list[int]:
        """Phi_{p^w}(1 + x) reduced mod p^N (monic, degree e, Eisenstein)."""
        base = gfpoly.cyclotomic_poly(self.p**self.wild_level)
        out = [0] * len(base)
        # substitute x -> 1 + x with exact binomials
        for k, c in enumerate(base):
            row = [1]
            for _ in range(k):
                row = [
                    (row[i] if i < len(row) else 0) + (row[i - 1] if i >= 1 else 0)
                    for i in range(len(row) + 1)
                ]
            for i, b in enumerate(row):
                out[i] += c * b
        out = [c % self.pN for c in out]
        assert out[-1] == 1 and out[0] == self.p % self.pN
        return out

    def _reduction_rows(self) -> list[list[int]]:
        """pi^(e+t) as integer combinations of pi^j, j < e, for t < e-1."""
        e, pN = self.e, self.pN
        rows = []
        row = [(-c) % pN for c in self.eisenstein[:e]]
        rows.append(row)
        for _ in range(e - 2):
            prev = rows[-1]
            row = [0] + prev[: e - 1]
            top = prev[e - 1]
            row = [(row[j] + top * rows[0][j]) % pN for j in range(e)]
            rows.append(row)
        return rows

    # -- unramified subring ---------------------------------------------------

    def _umul(self, a: list[int], b: list[int]) -> list[int]:
        if self.f == 1:
            return [a[0] * b[0] % self.pN]
        prod = gfpoly.pmul(a, b, self.pN)
        r = gfpoly.pmod(prod, self.unram_modulus, self.pN)
        return r + [0] * (self.f - len(r))

    # -- element factories ----------------------------------------------------

    def zero(self, prec: int | None = None) -> "RingElement":
        return RingElement(self, (0,) * self.dim, 0, self.N if prec is None else prec)

    def one(self) -> "RingElement":
        c = [0] * self.dim
        c[0] = 1
        return RingElement(self, tuple(c), 0, self.N)

    def from_int(self, n: int) -> "RingElement":
        c = [0] * self.dim
        c[0] = n % self.pN
        return RingElement(self, tuple(c), 0, self.N)

    def from_fraction(self, x: Fraction) -> "RingElement":
        x = Fraction(x)
        if x == 0:
            return self.zero()
        v = vp_fraction(x, self.p)
        unit = x / Fraction(self.p) ** v
        c = [0] * self.dim
        c[0] = fraction_mod(unit, self.pN)
        return RingElement(self, tuple(c), v, min(self.N + v, self.N))

    def from_unram(self, coeffs: list[int]) -> "RingElement":
        c = [0] * self.dim
        for k, v in enumerate(coeffs):
            c[k] = v % self.pN
        return RingElement(self, tuple(c), 0, self.N)

    def pi(self) -> "RingElement":
        if self.wild_level == 0:
            raise ValueError("ring has no wild part")
        c = [0] * self.dim
        c[self.f] = 1
        return RingElement(self, tuple(c), 0, self.N)

    def one_plus_pi(self) -> "RingElement":
        c = [0] * self.dim
        c[0] = 1
        c[self.f] = 1
        return RingElement(self, tuple(c), 0, self.N)

    def y_root(self) -> "RingElement":
        """The class of y: a primitive tame_order-th root of unity."""
        if self.f == 1:
            # degree-1 modulus y - r: the root is r
            r = (-self.unram_modulus[0]) % self.pN
            return self.from_int(r)
        c = [0] * self.dim
        c[1] = 1
        return RingElement(self, tuple(c), 0, self.N)

    # -- residue field --------------------------------------------------------

    @property
    def residue_modulus(self) -> list[int]:
        return [c % self.p for c in self.unram_modulus]

    def residue_of(self, x: "RingElement") -> tuple[int, ...]:
        """Image in F_{p^f} (only meaningful for shift-0 elements)."""
        return tuple(x.coeffs[k] % self.p for k in range(self.f))

    def _res_pow(self, a: list[int], n: int) -> list[int]:
        r = gfpoly.ppowmod(list(a), n, self.residue_modulus, self.p)
        return r + [0] * (self.f - len(r))

    def residue_generator(self) -> list[int]:
        """Generator of F_{p^f}^* compatible with the Teichmuller pairing.

        Normalised so its (p^f-1)/(p-1) power is the smallest primitive
        root mod p; characters then evaluate omega to true Teichmuller lifts.
        """
        if getattr(self, "_res_gen", None) is not None:
            return self._res_gen
        p, f = self.p, self.f
        q1 = p**f - 1
        prime_divs = list(factorint(q1))
        if f == 1:
            self._res_gen = [self._g_p % p]
            return self._res_gen
        import random

        rng = random.Random(0xFE11 + p + 97 * self.tame_order + self.embedding_index)
        while True:
            cand = [rng.randrange(p) for _ in range(f)]
            if not any(cand):
                continue
            if any(self._res_pow(cand, q1 // ell) == [1] + [0] * (f - 1)
                   for ell in prime_divs):
                continue
            # adjust so that cand^((q-1)/(p-1)) hits the canonical F_p^* generator
            sub = self._res_pow(cand, q1 // (p - 1))
            assert all(c == 0 for c in sub[1:])
            c_exp = _dlog_prime_field(sub[0], self._g_p, p)
            x = inv_mod(c_exp, p - 1)
            from math import gcd

            while gcd(x, q1) != 1:
                x += p - 1
            self._res_gen = self._res_pow(cand, x)
            return self._res_gen

    def teichmuller_generator(self) -> "RingElement":
        """Teichmuller lift of the canonical residue-field generator."""
        if self._teich_generator is None:
            lift = self.from_unram(list(self.residue_generator()))
            self._teich_generator = self.teichmuller_of_unit(lift)
        return self._teich_generator

    def teichmuller_of_unit(self, x: "RingElement") -> "RingElement":
        """The root of unity of order dividing p^f - 1 congruent to x mod m."""
        t = x
        for _ in range(self.N):
            t = t.pow(self.p**self.f)
        return t

    def teichmuller(self, a: int) -> "RingElement":
        """Teichmuller lift of an integer unit (spec op; exact mod p^N)."""
        if a % self.p == 0:
            raise ValueError("Teichmuller lift needs p not dividing a")
        return self.from_int(pow(a, self.p ** (self.N - 1), self.pN))

    def root_of_unity(self, order: int) -> "RingElement":
        """Canonical primitive root of unity of the given order, if present."""
        if order in self._gen_cache:
            return self._gen_cache[order]
        p = self.p
        c = 0
        t = order
        while t % p == 0:
            t //= p
            c += 1
        A = t
        q1 = p**self.f - 1
        if q1 % A != 0 or c > self.wild_level:
            raise EmbeddingUnavailable(
                f"no root of unity of order {order} in ring "
                f"(p={p}, tame={self.tame_order}, wild={self.wild_level})"
            )
        part_tame = self.teichmuller_generator().pow(q1 // A) if A > 1 else self.one()
        if c > 0:
            part_wild = self.one_plus_pi().pow(p ** (self.wild_level - c))
        else:
            part_wild = self.one()
        if A > 1 and c > 0:
            u = inv_mod(p**c, A)
            v = inv_mod(A, p**c)
            root = part_tame.pow(u) * part_wild.pow(v)
        elif A > 1:
            root = part_tame
        else:
            root = part_wild
        self._gen_cache[order] = root
        return root

    def __repr__(self):
        return (f"LocalRing(p={self.p}, N={self.N}, tame={self.tame_order}, "
                f"wild={self.wild_level}, e={self.e}, f={self.f})")


class EmbeddingUnavailable(Exception):
    pass


class RingElement:
    """vector * p^shift in a LocalRing, known modulo p^prec."""

    __slots__ = ("ring", "coeffs", "shift", "prec")

    def __init__(self, ring: LocalRing, coeffs: tuple[int, ...], shift: int,
                 prec: int):
        self.ring = ring
        self.coeffs = coeffs
        self.shift = shift
        self.prec = min(prec, ring.N + shift)

    # -- basic structure ------------------------------------------------------

    def _cap(self) -> int:
        """Coefficients are meaningful modulo p^cap."""
        return max(0, min(self.ring.N, self.prec - self.shift))

    def is_zero(self) -> bool:
        cap = self._cap()
        if cap == 0:
            return True
        m = self.ring.p**cap
        return all(c % m == 0 for c in self.coeffs)

    def eq_at_precision(self, other: "RingElement", prec: int | None = None) -> bool:
        d = self - other
        if prec is not None:
            d = d.truncate(prec)
        return d.is_zero()

    def truncate(self, prec: int) -> "RingElement":
        prec = min(prec, self.prec)
        cap = max(0, min(self.ring.N, prec - self.shift))
        m = self.ring.p**cap
        return RingElement(self.ring, tuple(c % m for c in self.coeffs), self.shift,
                           prec)

    def normalized(self) -> "RingElement":
        """Pull the p-content of the vector into the shift."""
        cap = self._cap()
        if cap == 0 or self.is_zero():
            return self
        g = min(vp(c, self.ring.p) if c % self.ring.p**cap else cap
                for c in self.coeffs)
        g = min(g, cap)
        if g == 0:
            return self
        pg = self.ring.p**g
        return RingElement(self.ring, tuple(c // pg for c in self.coeffs),
                           self.shift + g, self.prec)

    # -- arithmetic -----------------------------------------------------------

    def _aligned(self, other: "RingElement"):
        if self.ring is not other.ring:
            raise ValueError("elements of different rings")
        s = min(self.shift, other.shift)
        pN = self.ring.pN
        a = self.coeffs
        b = other.coeffs
        if self.shift > s:
            m = self.ring.p ** (self.shift - s)
            a = tuple(c * m % pN for c in a)
        if other.shift > s:
            m = self.ring.p ** (other.shift - s)
            b = tuple(c * m % pN for c in b)
        return a, b, s

    def __add__(self, other):
        if isinstance(other, int):
            other = self.ring.from_int(other)
        a, b, s = self._aligned(other)
        pN = self.ring.pN
        prec = min(self.prec, other.prec)
        return RingElement(self.ring, tuple((x + y) % pN for x, y in zip(a, b)), s,
                           prec)

    def __sub__(self, other):
        if isinstance(other, int):
            other = self.ring.from_int(other)
        a, b, s = self._aligned(other)
        pN = self.ring.pN
        prec = min(self.prec, other.prec)
        return RingElement(self.ring, tuple((x - y) % pN for x, y in zip(a, b)), s,
                           prec)

    def __neg__(self):
        pN = self.ring.pN
        return RingElement(self.ring, tuple(-c % pN for c in self.coeffs),
                           self.shift, self.prec)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale_int(other)
        if isinstance(other, Fraction):
            return self.scale_fraction(other)
        ring = self.ring
        if ring is not other.ring:
            raise ValueError("elements of different rings")
        e, f, pN = ring.e, ring.f, ring.pN
        a, b = self.coeffs, other.coeffs
        if e == 1:
            vec = tuple(ring._umul(list(a), list(b)))
        else:
            # convolution in pi with unramified coefficient blocks
            blocks = [[0] * f for _ in range(2 * e - 1)]
            for i in range(e):
                ai = list(a[i * f:(i + 1) * f])
                if not any(ai):
                    continue
                for j in range(e):
                    bj = list(b[j * f:(j + 1) * f])
                    if not any(bj):
                        continue
                    prod = ring._umul(ai, bj)
                    tgt = blocks[i + j]
                    for k in range(f):
                        tgt[k] = (tgt[k] + prod[k]) % pN
            for t in range(e - 2, -1, -1):
                blk = blocks[e + t]
                if not any(blk):
                    continue
                row = ring._pi_rows[t]
                for j in range(e):
                    r = row[j]
                    if r == 0:
                        continue
                    tgt = blocks[j]
                    for k in range(f):
                        tgt[k] = (tgt[k] + r * blk[k]) % pN
            vec = tuple(blocks[j][k] for j in range(e) for k in range(f))
        s = self.shift + other.shift
        prec = min(self.prec + other.shift, other.prec + self.shift,
                   ring.N + s)
        return RingElement(ring, vec, s, prec)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return -(self - other)

    def scale_int(self, c: int) -> "RingElement":
        if c == 0:
            return self.ring.zero(self.prec)
        pN = self.ring.pN
        v = vp(c, self.ring.p)
        if v:
            u = c // self.ring.p**v
            return RingElement(self.ring, tuple(x * u % pN for x in self.coeffs),
                               self.shift + v, self.prec + v)
        return RingElement(self.ring, tuple(x * c % pN for x in self.coeffs),
                           self.shift, self.prec)

    def scale_fraction(self, q: Fraction) -> "RingElement":
        q = Fraction(q)
        if q == 0:
            return self.ring.zero(self.prec)
        v = vp_fraction(q, self.ring.p)
        unit = q / Fraction(self.ring.p) ** v
        c = fraction_mod(unit, self.ring.pN)
        pN = self.ring.pN
        return RingElement(self.ring, tuple(x * c % pN for x in self.coeffs),
                           self.shift + v, self.prec + v)

    def pow(self, n: int) -> "RingElement":
        if n < 0:
            return self.invert().pow(-n)
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- valuation and inversion ----------------------------------------------

    def valuation(self) -> Valuation:
        cap = self._cap()
        p, e, f = self.ring.p, self.ring.e, self.ring.f
        if cap <= 0:
            return Valuation.below_precision(self.prec)
        m = p**cap
        best = None
        for j in range(e):
            for k in range(f):
                c = self.coeffs[j * f + k] % m
                if c == 0:
                    continue
                v = Fraction(vp(c, p)) + Fraction(j, e)
                if best is None or v < best:
                    best = v
        if best is None:
            return Valuation.below_precision(self.prec)
        return Valuation.exact(best + self.shift)

    def invert(self) -> "RingElement":
        val = self.valuation()
        if not val.is_exact:
            raise NonUnitError("cannot invert: zero at current precision")
        if val.value.denominator != 1:
            raise NonUnitError("cannot invert: non-integral valuation")
        t = int(val.value)
        ring = self.ring
        u = RingElement(ring, self.coeffs, self.shift - t, self.prec - t)
        u = u.normalized()
        # now v(u) = 0: Newton iteration from the residue-field inverse
        res = list(ring.residue_of(u))
        inv0 = _residue_inverse(res, ring)
        z = ring.from_unram(inv0)
        steps = 1
        while (1 << steps) < ring.N * ring.e + 1:
            steps += 1
        for _ in range(steps + 1):
            z = z * (ring.from_int(2) - u * z)
        prec = self.prec - 2 * t
        if prec <= 0:
            raise PrecisionLoss("inverse has no remaining precision")
        out = RingElement(ring, z.coeffs, z.shift - t, prec)
        return out

    def divide(self, other: "RingElement") -> "RingElement":
        return self * other.invert()

    # -- misc -----------------------------------------------------------------

    def lift_int(self) -> int:
        """Integer representative (requires a Z_p-line element, shift >= 0)."""
        if any(c % self.ring.pN for c in self.coeffs[1:]):
            raise ValueError("element is not on the Z_p line")
        if self.shift < 0:
            raise ValueError("element has a pole; no integer representative")
        return self.coeffs[0] * self.ring.p**self.shift % (
            self.ring.p ** max(1, self.prec)
        )

    def __repr__(self):
        v = self.valuation()
        return (f"RingElement(shift={self.shift}, prec={self.prec}, v={v}, "
                f"coeffs={self.coeffs})")


def _residue_inverse(res: list[int], ring: LocalRing) -> list[int]:
    p, f = ring.p, ring.f
    if all(c % p == 0 for c in res):
        raise NonUnitError("residue is zero")
    if f == 1:
        return [inv_mod(res[0] % p, p)]
    # inverse in F_p[y]/G via the power p^f - 2
    out = ring._res_pow([c % p for c in res], p**f - 2)
    return out


def _dlog_prime_field(a: int, g: int, p: int) -> int:
    x = 1
    for k in range(p - 1):
        if x == a % p:
            return k
        x = x * g % p
    raise ValueError("dlog: generator does not generate")


def iwasawa_log(x: RingElement) -> RingElement:
    """Iwasawa-branch logarithm: log_p p = 0, log of roots of unity = 0.

    Defined here for elements of integral valuation (all the library needs);
    the unit part is split off, its Teichmuller component dropped, and the
    alternating series summed until the tail valuation clears the precision.
    """
    ring = x.ring
    val = x.valuation()
    if not val.is_exact:
        raise PrecisionLoss("cannot separate unit part: zero at this precision")
    if val.value.denominator != 1:
        raise NonUnitError("log of fractional-valuation element not supported")
    t = int(val.value)
    u = RingElement(ring, x.coeffs, x.shift - t, x.prec - t).normalized()
    tau = ring.teichmuller_of_unit(u)
    u1 = u * tau.pow(ring.p**ring.f - 2)
    z = u1 - ring.one()
    zval = z.valuation()
    target = u1.prec
    if not zval.is_exact:
        return ring.zero(target)
    vz = zval.value
    assert vz > 0, "unit part did not reduce to a principal unit"
    # cutoff: all remaining terms have v(z^i / i) >= target
    imax = 1
    horizon = int(4 * ring.e * max(target, 1)) + 16
    for i in range(1, horizon + 1):
        if i * vz - vp(i, ring.p) < target:
            imax = i + 1
    total = ring.zero(target)
    zpow = z
    for i in range(1, imax + 1):
        term = zpow.scale_fraction(Fraction((-1) ** (i + 1), i))
        total = total + term
        if i < imax:
            zpow = zpow * z
    return total.truncate(target)


def padic_gamma_int(n: int, p: int, M: int) -> int:
    """Morita Gamma_p at the integer n mod p^M: (-1)^n prod_{0<j<n, p∤j} j."""
    pM = p**M
    n %= pM
    acc = 1
    for j in range(1, n):
        if j % p:
            acc = acc * j % pM
    return (-acc if n % 2 else acc) % pM


def padic_gamma_rational(x: Fraction, p: int, M: int) -> int:
    """Gamma_p at a rational with denominator prime to p, mod p^M.

    Continuity route: reduce the argument into Z/p^M and take the factorial
    product. Exponential in M, so callers keep p^M at validation scale.
    """
    x = Fraction(x)
    if x != 0 and vp_fraction(x, p) < 0:
        raise ValueError("argument must be p-integral")
    n = fraction_mod(x, p**M) if x != 0 else 0
    return padic_gamma_int(n, p, M)


def padic_gamma(x, ring: LocalRing) -> RingElement:
    """Spec-facing Gamma_p: arguments on the Z_p line, result a unit."""
    if isinstance(x, RingElement):
        n = x.lift_int()
        return ring.from_int(padic_gamma_int(n, ring.p, ring.N))
    return ring.from_int(padic_gamma_rational(Fraction(x), ring.p, ring.N))


@lru_cache(maxsize=None)
def _bernoulli_cached(j: int) -> Fraction:
    from .bernoulli import bernoulli_number

    return bernoulli_number(j)


def diamond_series_cutoff(s: int, p: int, M: int) -> int:
    """First even j beyond which every tail term of G_p has valuation >= M."""
    j = 2
    last_bad = 0
    horizon = 2 * (M + 4) + 2 * s + 8
    for jj in range(2, horizon + 1, 2):
        digits = 0
        x = jj * (jj - 1)
        while x:
            x //= p
            digits += 1
        if s * (jj - 1) - 1 - digits < M:
            last_bad = jj
    j = last_bad + 2
    return max(j, 4)


def diamond_log_gamma_scaled(a: int, F: int, p: int, M: int) -> tuple[int, int]:
    """Diamond's G_p(a/F) for v(a/F) < 0, as (integer mod p^M, shift).

    Returns (R, -s) with G_p(a/F) = R * p^(-s), R exact mod p^M, where
    s = v_p(F). Requires p | F and p not dividing a.
    """
    from .padicint import log_unit

    s = vp(F, p)
    if s == 0:
        raise ValueError("G_p needs |X|_p > 1")
    if a % p == 0:
        raise ValueError("numerator must be a unit")
    F0 = F // p**s
    pM = p**M
    xhat = a * inv_mod(F0, pM) % pM  # p^s * X
    logX = (log_unit(a, p, M) - log_unit(F0, p, M)) % pM
    inv2 = inv_mod(2, pM)
    total = (xhat - p**s * inv2) * logX % pM
    total = (total - xhat) % pM
    # series sum_{j>=2 even} B_j/(j(j-1)) X^(1-j), scaled by p^s
    invx = inv_mod(xhat, pM)
    jcut = diamond_series_cutoff(s, p, M)
    invx_pow = invx          # invx^(j-1) at j = 2
    for j in range(2, jcut + 1, 2):
        Bj = _bernoulli_cached(j) / (j * (j - 1))
        # p^s * B_j * X^(1-j) = B_j * invx^(j-1) * p^(s*j)
        v = vp_fraction(Bj, p) if Bj else 0
        if Bj != 0:
            unit = Bj / Fraction(p) ** v
            c = fraction_mod(unit, pM)
            term = c * invx_pow % pM
            exp = s * j + v
            if exp < 0:
                raise ValueError("series term escaped integrality")
            total = (total + term * p**exp) % pM
        invx_pow = invx_pow * invx % pM
        invx_pow = invx_pow * invx % pM
    return total, -s


def diamond_log_gamma(a: int, F: int, ring: LocalRing) -> RingElement:
    """G_p(a/F) as a ring element (spec op: rejects v(X) >= 0)."""
    R, sh = diamond_log_gamma_scaled(a, F, ring.p, ring.N)
    c = [0] * ring.dim
    c[0] = R
    return RingElement(ring, tuple(c), sh, ring.N + sh)


@lru_cache(maxsize=None)
def make_ring(p: int, N: int, tame_order: int = 1, wild_level: int = 0,
              embedding_index: int = 0) -> LocalRing:
    """Shared-cache LocalRing factory (rings are immutable)."""
    return LocalRing(p, N, tame_order, wild_level, embedding_index)
