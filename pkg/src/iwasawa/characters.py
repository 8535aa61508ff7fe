"""Dirichlet characters as finite data.

A character mod m is stored by its exponents on the canonical generators of
(Z/mZ)*: one generator per odd prime power, the pair (-1, 5) for 2^k with
k >= 3. Exponent k_g is taken w.r.t. the generator's own order, i.e.
chi(g) = zeta_{ord(g)}^{k_g}. Values materialise into a LocalRing only at
evaluation time, so one character serves many rings and precisions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, lcm, prod

from sympy import factorint, isprime, primitive_root

from .localring import LocalRing, RingElement
from .padicint import log_principal_unit, teichmuller_int


@lru_cache(maxsize=None)
def _spf_table(limit: int) -> list[int]:
    spf = list(range(limit + 1))
    i = 2
    while i * i <= limit:
        if spf[i] == i:
            for j in range(i * i, limit + 1, i):
                if spf[j] == j:
                    spf[j] = i
        i += 1
    return spf


def factor_small(m: int) -> dict[int, int]:
    if m <= 1:
        return {}
    if m <= 10**6:
        spf = _spf_table(10**6)
        out: dict[int, int] = {}
        while m > 1:
            p = spf[m]
            out[p] = out.get(p, 0) + 1
            m //= p
        return out
    return dict(factorint(m))


@dataclass(frozen=True)
class GroupComponent:
    modulus: int          # prime power l^k
    generator: int        # residue mod modulus
    order: int


class UnitGroup:
    """Structure of (Z/mZ)* with canonical generators and dlog tables."""

    def __init__(self, m: int):
        self.m = m
        comps: list[GroupComponent] = []
        for ell, k in sorted(factor_small(m).items()):
            q = ell**k
            if ell == 2:
                if k == 1:
                    continue
                if k == 2:
                    comps.append(GroupComponent(4, 3, 2))
                else:
                    comps.append(GroupComponent(q, q - 1, 2))
                    comps.append(GroupComponent(q, 5, 2 ** (k - 2)))
            else:
                g = primitive_root(q)
                comps.append(GroupComponent(q, g, (ell - 1) * ell ** (k - 1)))
        self.components = comps
        self._dlogs: list[list[int]] | None = None

    def dlog_tables(self) -> list[list[int]]:
        """Per-component discrete logs, indexed by residue (-1 = nonunit)."""
        if self._dlogs is not None:
            return self._dlogs
        tables = []
        i = 0
        while i < len(self.components):
            c = self.components[i]
            if c.modulus % 2 == 0 and c.modulus % 8 == 0:
                # the pair (-1, 5): fill both tables in one sweep
                q = c.modulus
                t_sign = [-1] * q
                t_five = [-1] * q
                x = 1
                for t in range(c.modulus // 4):
                    t_sign[x] = 0
                    t_five[x] = t
                    t_sign[q - x] = 1
                    t_five[q - x] = t
                    x = x * 5 % q
                tables.append(t_sign)
                tables.append(t_five)
                i += 2
            else:
                q = c.modulus
                table = [-1] * q
                x = 1
                for t in range(c.order):
                    table[x] = t
                    x = x * c.generator % q
                tables.append(table)
                i += 1
        self._dlogs = tables
        return tables

    def lifted_generators(self) -> list[int]:
        """CRT lifts of the component generators to (Z/mZ)*."""
        return [_crt_pair(c.generator % c.modulus, c.modulus, 1,
                          self.m // c.modulus) for c in self.components]


def _crt_pair(a: int, ma: int, b: int, mb: int) -> int:
    if mb == 1:
        return a % ma
    inv = pow(ma, -1, mb)
    return (a + ma * ((b - a) * inv % mb)) % (ma * mb)


@lru_cache(maxsize=None)
def unit_group(m: int) -> UnitGroup:
    return UnitGroup(m)


class DirichletChar:
    """chi mod m given by exponents on the canonical generators."""

    __slots__ = ("modulus", "exps", "_order", "_conductor", "_parity")

    def __init__(self, modulus: int, exps: tuple[int, ...]):
        g = unit_group(modulus)
        if len(exps) != len(g.components):
            raise ValueError("one exponent per generator required")
        self.modulus = modulus
        self.exps = tuple(e % c.order for e, c in zip(exps, g.components))
        self._order = None
        self._conductor = None
        self._parity = None

    # -- invariants -----------------------------------------------------------

    @property
    def group(self) -> UnitGroup:
        return unit_group(self.modulus)

    @property
    def order(self) -> int:
        if self._order is None:
            o = 1
            for e, c in zip(self.exps, self.group.components):
                o = lcm(o, c.order // gcd(c.order, e))
            self._order = o
        return self._order

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    @property
    def conductor(self) -> int:
        if self._conductor is not None:
            return self._conductor
        cond = 1
        comps = self.group.components
        i = 0
        while i < len(comps):
            c = comps[i]
            ell = min(factor_small(c.modulus)) if c.modulus > 1 else 1
            if ell == 2 and c.modulus % 8 == 0:
                e_sign, e_five = self.exps[i], self.exps[i + 1]
                t = c.modulus // 4 // gcd(c.modulus // 4, e_five) if e_five else 1
                if t > 1:
                    cond *= 4 * t
                elif e_sign:
                    cond *= 4
                i += 2
                continue
            e = self.exps[i]
            t = c.order // gcd(c.order, e)
            if t > 1:
                if ell == 2:
                    cond *= 4
                else:
                    vt = 0
                    tt = t
                    while tt % ell == 0:
                        tt //= ell
                        vt += 1
                    cond *= ell ** (1 + vt)
            i += 1
        self._conductor = cond
        return cond

    @property
    def parity(self) -> int:
        """chi(-1)."""
        if self._parity is None:
            e = self.value_exponent(self.modulus - 1 if self.modulus > 1 else 1)
            assert e is not None and (2 * e) % self.order == 0
            self._parity = -1 if e else 1
        return self._parity

    @property
    def is_odd(self) -> bool:
        return self.parity == -1

    @property
    def is_even(self) -> bool:
        return self.parity == 1

    # -- values ---------------------------------------------------------------

    def value_exponent(self, a: int) -> int | None:
        """Exponent x with chi(a) = zeta_order^x, or None when gcd(a,m) > 1."""
        if self.modulus == 1:
            return 0
        a %= self.modulus
        if gcd(a, self.modulus) != 1:
            return None
        D = self.order
        tables = self.group.dlog_tables()
        total = 0
        for e, c, table in zip(self.exps, self.group.components, tables):
            d = table[a % c.modulus]
            assert d >= 0
            total += (D * e // c.order) * d
        return total % D

    def __call__(self, a: int) -> int | None:
        return self.value_exponent(a)

    def evaluate(self, a: int, ring: LocalRing) -> RingElement:
        """chi(a) in the ring under the fixed embedding; 0 on nonunits."""
        e = self.value_exponent(a)
        if e is None:
            return ring.zero()
        root = ring.root_of_unity(self.order)
        return root.pow(e)

    # -- structure ------------------------------------------------------------

    def primitive(self) -> "DirichletChar":
        """The primitive character inducing chi."""
        f = self.conductor
        if f == self.modulus:
            return self
        g_new = unit_group(f)
        exps = []
        for c in g_new.components:
            lift = _component_lift(c.generator, c.modulus, self.modulus)
            x = self.value_exponent(lift)
            assert x is not None
            # convert exponent base zeta_order -> zeta_{c.order}
            exps.append(x * c.order // self.order % c.order)
        return DirichletChar(f, tuple(exps))

    def restrict_to(self, modulus: int) -> "DirichletChar":
        """Induce chi to a multiple of its conductor."""
        if modulus % self.conductor != 0:
            raise ValueError("modulus must be a multiple of the conductor")
        chi0 = self.primitive()
        g_new = unit_group(modulus)
        exps = []
        for c in g_new.components:
            lift = _component_lift(c.generator, c.modulus, modulus)
            x = chi0.value_exponent(lift)
            assert x is not None
            exps.append(x * c.order // chi0.order % c.order)
        return DirichletChar(modulus, tuple(exps))

    def __mul__(self, other: "DirichletChar") -> "DirichletChar":
        m = lcm(self.modulus, other.modulus)
        a = self.restrict_to(m) if self.modulus != m else self
        b = other.restrict_to(m) if other.modulus != m else other
        exps = tuple((x + y) for x, y in zip(a.exps, b.exps))
        return DirichletChar(m, exps).primitive()

    def galois_power(self, t: int) -> "DirichletChar":
        """chi^t (conjugate for gcd(t, order) = 1)."""
        return DirichletChar(self.modulus, tuple(e * t for e in self.exps))

    def conjugate(self) -> "DirichletChar":
        return self.galois_power(-1)

    def qp_orbit(self, p: int) -> list["DirichletChar"]:
        """Q_p-Galois conjugates: chi^(p^j)."""
        out = []
        seen = set()
        t = 1
        while True:
            c = self.galois_power(t)
            key = c.exps
            if key in seen:
                break
            seen.add(key)
            out.append(c)
            t = t * p % self.order if self.order > 1 else 1
            if self.order == 1:
                break
        return out

    # -- serialization --------------------------------------------------------

    def serialize(self) -> str:
        if self.modulus == 1:
            return "1"
        gens = self.group.lifted_generators()
        parts = [f"{g}^{e}" for g, e in zip(gens, self.exps)]
        return f"{self.modulus}:{','.join(parts)}"

    @classmethod
    def parse(cls, text: str) -> "DirichletChar":
        text = text.strip()
        if text == "1":
            return cls(1, ())
        try:
            mod_str, rest = text.split(":", 1)
            m = int(mod_str)
        except ValueError as exc:
            raise ValueError(f"bad character spec {text!r}") from exc
        g = unit_group(m)
        gens = g.lifted_generators()
        exps = [0] * len(gens)
        if rest:
            for part in rest.split(","):
                gs, es = part.split("^")
                gi, e = int(gs), int(es)
                if gi not in gens:
                    raise ValueError(
                        f"{gi} is not a canonical generator of (Z/{m})*; "
                        f"expected one of {gens}"
                    )
                exps[gens.index(gi)] = e
        return cls(m, tuple(exps))

    def __eq__(self, other):
        return (isinstance(other, DirichletChar)
                and self.modulus == other.modulus and self.exps == other.exps)

    def __hash__(self):
        return hash((self.modulus, self.exps))

    def __repr__(self):
        return f"DirichletChar({self.serialize()!r}, order={self.order})"


def _component_lift(g: int, q: int, modulus: int) -> int:
    """Unit mod `modulus`: g on the prime part of q, 1 on every other prime."""
    if q == 1:
        return 1
    ell = min(factor_small(q))
    K = 1
    mm = modulus
    while mm % ell == 0:
        mm //= ell
        K *= ell
    return _crt_pair(g % K, K, 1, mm)


def trivial_char() -> DirichletChar:
    return DirichletChar(1, ())


def teichmuller_char(p: int) -> DirichletChar:
    """omega: the character mod p with omega(a) = a mod p (Teichmuller values)."""
    return DirichletChar(p, (1,))


def quadratic_char(D: int) -> DirichletChar:
    """The quadratic character of fundamental discriminant D."""
    if not is_fundamental_discriminant(D):
        raise ValueError(f"{D} is not a fundamental discriminant")
    m = abs(D)
    g = unit_group(m)
    exps = []
    for c in g.components:
        val = kronecker_symbol(D, _component_lift(c.generator, c.modulus, m))
        assert val in (1, -1)
        exps.append(0 if val == 1 else c.order // 2)
    return DirichletChar(m, tuple(exps))


def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for n > 0."""
    if n <= 0:
        raise ValueError("positive n only")
    result = 1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def is_fundamental_discriminant(D: int) -> bool:
    if D == 1 or D == 0:
        return False
    from sympy import factorint as fi

    def squarefree(n):
        return all(e == 1 for e in fi(abs(n)).values())

    if D % 4 == 1:
        return squarefree(D)
    if D % 4 == 0:
        q = D // 4
        return q % 4 in (2, 3) and squarefree(q)
    return False


# -- decomposition into first and second kind ---------------------------------


@dataclass
class CharDecomposition:
    """chi = theta * omega^i * psi with p prime to cond(theta)."""

    theta: DirichletChar
    i: int
    psi: DirichletChar
    level: int            # psi has conductor p^(level+1), 0 when trivial
    p: int

    @property
    def zeta_psi_exponent(self) -> int:
        """zeta_psi = psi(1+p)^(-1) = zeta_{p^level}^(this exponent)."""
        if self.level == 0:
            return 0
        e = self.psi.value_exponent(1 + self.p)
        return -e % self.psi.order


def decompose(chi: DirichletChar, p: int) -> CharDecomposition:
    """Unique triple (theta, i, psi) with chi = theta * omega^i * psi."""
    if p % 2 == 0 or not isprime(p):
        raise ValueError("p must be an odd prime")
    m = chi.modulus
    a = 0
    mm = m
    while mm % p == 0:
        mm //= p
        a += 1
    m0 = mm
    # prime-to-p part
    g0 = unit_group(m0)
    theta_exps = []
    for c in g0.components:
        lift = _component_lift(c.generator, c.modulus, m)
        x = chi.value_exponent(lift)
        assert x is not None
        theta_exps.append(x * c.order // chi.order % c.order)
    theta = DirichletChar(m0, tuple(theta_exps)).primitive()
    if a == 0:
        return CharDecomposition(theta, 0, trivial_char(), 0, p)
    # p-part character mod p^a
    q = p**a
    gq = unit_group(q)
    comp = gq.components[0]
    lift = _crt_pair(comp.generator, q, 1, m // q)
    x = chi.value_exponent(lift)
    assert x is not None
    e = x * comp.order // chi.order % comp.order   # chi_p(g) = zeta_{s}^e
    s = comp.order                                  # (p-1)p^(a-1)
    # tame exponent: zeta_s = zeta_{p-1}^A * zeta_{p^{a-1}}^B (CRT)
    pa1 = p ** (a - 1)
    tame_part = e * pow(pa1, -1, p - 1) % (p - 1) if a >= 1 else 0
    # i solves i * dlog_{g_p}(g) = tame_part mod p-1
    g_p = primitive_root(p)
    d = _dlog_mod_p(comp.generator % p, g_p, p)
    i = tame_part * pow(d, -1, p - 1) % (p - 1)
    omega_i = DirichletChar(p, (i,))
    psi = (chi * theta.conjugate() * omega_i.conjugate()).primitive()
    level = 0
    if not psi.is_trivial:
        cond = psi.conductor
        while cond > 1:
            assert cond % p == 0, "second-kind part must have p-power conductor"
            cond //= p
            level += 1
        level -= 1
        assert psi.order == p**level
    return CharDecomposition(theta, i, psi, level, p)


def _dlog_mod_p(a: int, g: int, p: int) -> int:
    x = 1
    for k in range(p - 1):
        if x == a % p:
            return k
        x = x * g % p
    raise ValueError("not a unit")


def second_kind(p: int, n: int) -> DirichletChar:
    """The canonical character of the second kind of order p^n.

    Conductor p^(n+1), trivial on the Teichmuller part, normalised by
    psi(1+p) = zeta_{p^n}.
    """
    if n < 1:
        raise ValueError("level must be >= 1")
    q = p ** (n + 1)
    g = unit_group(q)
    comp = g.components[0]
    # dlog of <g> = g/omega(g) w.r.t. base 1+p, via p-adic logs
    M = n + 1
    gen = comp.generator
    om = teichmuller_int(gen, p, M)
    principal = gen * pow(om, -1, q) % q
    x = (
        (log_principal_unit(principal, p, M) // p)
        * pow(log_principal_unit(1 + p, p, M) // p, -1, p**n)
    ) % p**n
    # psi(gen) = zeta_{p^n}^x  ->  exponent w.r.t. zeta_{comp.order}
    e = (p - 1) * x % comp.order
    psi = DirichletChar(q, (e,))
    assert psi.order == p**n and psi.conductor == q
    assert psi.value_exponent(1 + p) == 1, "normalisation psi(1+p) = zeta"
    return psi


# -- enumeration ---------------------------------------------------------------


def _prime_power_primitive_parts(ell: int, k: int, order_div: int):
    """Primitive exponent tuples mod ell^k whose order divides order_div.

    Yields (exps_for_components, order, parity) for this prime power.
    """
    q = ell**k
    if ell == 2:
        if k == 1:
            return
        if k == 2:
            if order_div % 2 == 0:
                yield ((1,), 2, -1)
            return
        half = 2 ** (k - 2)
        if order_div % half != 0:
            return
        for e_sign in (0, 1):
            for u in range(1, half, 2):
                parity = -1 if e_sign else 1
                yield ((e_sign, u), half, parity)
        return
    s = (ell - 1) * ell ** (k - 1)
    gd = gcd(s, order_div)
    for t in _divisors(gd):
        if t == 1:
            continue
        # conductor of an order-t character mod ell^k is ell^(1 + v_ell(t))
        vt = 0
        tt = t
        while tt % ell == 0:
            tt //= ell
            vt += 1
        if 1 + vt != k:
            continue
        base = s // t
        for u in range(1, t):
            if gcd(u, t) == 1:
                e = base * u
                parity = -1 if (e % 2) else 1  # zeta_s^{e*s/2} = (-1)^e
                yield ((e,), t, parity)


def _divisors(n: int) -> list[int]:
    out = [1]
    for p, e in factor_small(n).items():
        out = [d * p**j for d in out for j in range(e + 1)]
    return sorted(out)


def enumerate_primitive(order: int, cond_max: int, parity: int | None = None,
                        p: int | None = None, p_constraint: str = "none",
                        orbits: bool = False):
    """Primitive characters of exact `order` and conductor <= cond_max.

    p_constraint: 'split' (chi(p)=1), 'nonsplit' (chi(p) != 1, including 0),
    'inert' (chi(p) not in {0,1}), or 'none'. 'split' and 'inert' force the
    conductor prime to p. With `orbits`, one representative per Q_p-orbit.
    """
    if p_constraint not in ("none", "split", "nonsplit", "inert"):
        raise ValueError(f"unknown constraint {p_constraint!r}")
    if p_constraint != "none" and p is None:
        raise ValueError("constraint requires p")
    seen_orbit: set[tuple] = set()
    for m in range(3, cond_max + 1):
        fac = factor_small(m)
        if 2 in fac and fac[2] == 1:
            continue  # no primitive characters mod 2*odd
        if p is not None and p_constraint in ("split", "inert") and m % p == 0:
            continue
        parts_per_prime = []
        dead = False
        for ell, k in sorted(fac.items()):
            parts = list(_prime_power_primitive_parts(ell, k, order))
            if not parts:
                dead = True
                break
            parts_per_prime.append(parts)
        if dead:
            continue
        for combo in itertools.product(*parts_per_prime):
            o = 1
            par = 1
            exps: list[int] = []
            for exp_tuple, t, pr in combo:
                o = lcm(o, t)
                par *= pr
                exps.extend(exp_tuple)
            if o != order:
                continue
            if parity is not None and par != parity:
                continue
            chi = DirichletChar(m, tuple(exps))
            if p is not None and p_constraint != "none":
                v = chi.value_exponent(p)
                if p_constraint == "split" and v != 0:
                    continue
                if p_constraint == "nonsplit" and v == 0:
                    continue
                if p_constraint == "inert" and (v is None or v == 0):
                    continue
            if orbits:
                key = min(tuple(c.exps) for c in chi.qp_orbit(p or 1))
                if (m, key) in seen_orbit:
                    continue
                seen_orbit.add((m, key))
            yield chi


def enumerate_odd(order: int, cond_max: int, p: int | None = None,
                  p_constraint: str = "none", orbits: bool = False):
    """Odd primitive characters (spec surface for the survey families)."""
    yield from enumerate_primitive(order, cond_max, parity=-1, p=p,
                                   p_constraint=p_constraint, orbits=orbits)
