"""Special values and derivatives of the p-adic L-function.

Routes implemented:
  - interpolation: L_p(1-n, chi) from twisted Bernoulli numbers;
  - s1-series: L_p(1, chi) and L_p'(1, chi) mod p^3 from the explicit sums
    over a <= N with log/inverse kernels;
  - ferrero-greenberg-gamma: L_p'(0, chi) from Morita Gamma_p values
    (validation scale, product cost p^precision);
  - washington-gp: L_p'(0, chi) from Diamond's log gamma (always feasible);
  - gross-koblitz-jacobi: L_p'(0, chi) via Jacobi sums (see gaussjacobi).

Derivatives at other negative integers are produced by three-point divided
differences of interpolated values; the quadratic error term cancels, so
the estimate carries valuation error >= 2 + v(node spacing).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm

import numpy as np

from .bernoulli import generalized_bernoulli
from .characters import DirichletChar, teichmuller_char
from .kernels import CharSumPlan, ScalarTables, arange_mod, int64_safe, weight_dtype
from .localring import (LocalRing, RingElement, diamond_log_gamma_scaled,
                        padic_gamma_rational)
from .padicint import fraction_mod, inv_mod, log_one_plus_p, log_unit, vp


class RouteInfeasible(Exception):
    """The requested route cannot run at this size; use another."""


@dataclass
class LSpecialValue:
    value: RingElement
    s_point: str
    route: str
    precision: int


def chi_omega_power(chi: DirichletChar, p: int, k: int) -> DirichletChar:
    """chi * omega^k, primitive."""
    om = teichmuller_char(p)
    return (chi * om.galois_power(k % (p - 1))).primitive()


def euler_factor_at_p(xi: DirichletChar, p: int, exponent: int,
                      ring: LocalRing) -> RingElement:
    """1 - xi(p) p^exponent as a ring element (xi(p) = 0 when p | cond)."""
    e = xi.value_exponent(p)
    one = ring.one()
    if e is None:
        return one
    val = ring.root_of_unity(xi.order).pow(e) if xi.order > 1 else ring.one()
    return one - val.scale_int(p**exponent) if exponent >= 0 else one - val

def lp_interpolated(n: int, chi: DirichletChar, ring: LocalRing,
                    precision: int | None = None) -> LSpecialValue:
    """L_p(1-n, chi) = -(1 - chi omega^{-n}(p) p^{n-1}) B_{n, chi omega^{-n}} / n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = ring.p
    prec = precision if precision is not None else ring.N - 2
    xi = chi_omega_power(chi, p, -n)
    if xi.is_trivial and n == 1:
        raise ValueError("chi = omega branch at n = 1 is the excluded pole")
    want = prec + max(0, vp(n, p))
    b = generalized_bernoulli(n, xi, ring, precision=want)
    eul = euler_factor_at_p(xi, p, n - 1, ring)
    value = -(eul * b.value).scale_fraction(Fraction(1, n))
    return LSpecialValue(value.truncate(prec), f"1-{n}", "interpolation", prec)


def lp_at_nonpositive(k: int, chi: DirichletChar, ring: LocalRing,
                      precision: int | None = None) -> LSpecialValue:
    """Spec surface: L_p(1-k, chi) for k in 1..p-1."""
    return lp_interpolated(k, chi, ring, precision)


def lp_at_b_point(k: int, chi: DirichletChar, ring: LocalRing,
                  precision: int | None = None) -> LSpecialValue:
    """The companion value L_p(2-p-k, chi) = L_p(1-(p+k-1), chi)."""
    return lp_interpolated(ring.p + k - 1, chi, ring, precision)


# -- values at s = 1 -----------------------------------------------------------


def _s1_weights(p: int, M: int, N: int, derivative: bool):
    """Weight array for the s=1 sums, scaled by p^(v_p(N)) to integers."""
    vN = vp(N, p)
    N0 = N // p**vN
    pM = p**M
    t = ScalarTables.get(p, M, N)
    L = t.log[:N]
    inv = t.inv[:N]
    invN0 = inv_mod(N0, pM)
    inv2 = inv_mod(2, pM)
    c12 = fraction_mod(Fraction(p**vN * N, 12), pM)  # p^vN * N/12, integral
    pvN = p**vN % pM
    if not derivative:
        # p^vN * [ (1/N) log a - 1/(2a) - N/(12 a^2) ]
        W = L * invN0 % pM
        W = (W - inv * inv2 % pM * pvN) % pM
        W = (W - inv * inv % pM * c12) % pM
        return W, vN
    # p^vN * [ N/(12a^2) - log(a)/(2a) - N log(a)/(12 a^2) + log(a)^2/(2N) ]
    inv_sq = inv * inv % pM
    W = inv_sq * c12 % pM
    W = (W - L * inv % pM * inv2 % pM * pvN) % pM
    W = (W - L * inv_sq % pM * c12) % pM
    W = (W + L * L % pM * inv_mod(2 * N0, pM)) % pM
    return W, vN


def _s1_value(chi: DirichletChar, ring: LocalRing, N_multiple: int | None,
              precision: int, derivative: bool) -> LSpecialValue:
    p = ring.p
    if chi.is_trivial:
        raise ValueError("s = 1 sums require a nontrivial character")
    if precision > 3:
        raise ValueError("the s = 1 sums are only valid modulo p^3")
    N = N_multiple if N_multiple is not None else lcm(p, chi.conductor)
    if N % p != 0 or N % chi.conductor != 0:
        raise ValueError("N must be a multiple of p and of the conductor")
    vN = vp(N, p)
    M = precision + vN
    if M > ring.N:
        raise ValueError(f"ring precision {ring.N} below required {M}")
    W, shift = _s1_weights(p, M, N, derivative)
    plan = CharSumPlan(chi, p, N, skip_p=True)
    buckets = plan.accumulate(W, p**M)
    val = plan.assemble(ring, buckets, -shift, M - shift)
    if not derivative:
        val = -val
    return LSpecialValue(val.truncate(precision),
                         "1" if not derivative else "d/ds at 1",
                         "s1-series", precision)


def lp_at_one(chi: DirichletChar, ring: LocalRing,
              N_multiple: int | None = None, precision: int = 3) -> LSpecialValue:
    """L_p(1, chi) mod p^precision (precision <= 3)."""
    return _s1_value(chi, ring, N_multiple, precision, derivative=False)


def lp_deriv_at_one(chi: DirichletChar, ring: LocalRing,
                    N_multiple: int | None = None,
                    precision: int = 3) -> LSpecialValue:
    """L_p'(1, chi) mod p^precision (precision <= 3)."""
    return _s1_value(chi, ring, N_multiple, precision, derivative=True)


# -- derivative at s = 0: three routes ------------------------------------------

_GAMMA_PRODUCT_LIMIT = 4 * 10**6


@lru_cache(maxsize=None)
def _gamma_table(d: int, p: int, M: int) -> tuple[int, ...]:
    """log_p Gamma_p(a/d) for a = 0..d-1 (0 at gcd(a,d) > 1), mod p^M."""
    out = [0] * d
    for a in range(1, d):
        g = padic_gamma_rational(Fraction(a, d), p, M)
        out[a] = log_unit(g, p, M)
    return tuple(out)


def lp_deriv_zero_gamma(chi: DirichletChar, ring: LocalRing,
                        precision: int | None = None) -> LSpecialValue:
    """L_p'(0, chi) by the Gamma_p route; needs p prime to cond(chi omega^-1).

    Validation route: each Gamma_p value costs O(p^precision) multiplies.
    In the trivial-zero case the sum is taken over cosets of <p>, grouping
    the Gamma_p factors along each orbit a, ap, ap^2, ...
    """
    p = ring.p
    prec = precision if precision is not None else min(ring.N, 4)
    xi = chi_omega_power(chi, p, -1)
    d = xi.conductor
    if d % p == 0:
        raise RouteInfeasible("conductor divisible by p: use the G_p route")
    if p**prec > _GAMMA_PRODUCT_LIMIT:
        raise RouteInfeasible(f"p^{prec} exceeds the Gamma_p product budget")
    M = prec
    pM = p**M
    table = _gamma_table(d, p, M)
    root = ring.root_of_unity(xi.order) if xi.order > 1 else ring.one()
    pow_cache = [root.pow(t) for t in range(xi.order)]
    total = ring.zero(M)
    if xi.value_exponent(p) == 0:
        # trivial zero: coset form over (Z/d)^* / <p>
        seen = [False] * d
        for a in range(1, d):
            if seen[a] or xi.value_exponent(a) is None:
                continue
            acc = 0
            b = a
            while not seen[b]:
                seen[b] = True
                acc = (acc + table[b]) % pM
                b = b * p % d
            e = xi.value_exponent(a)
            total = total + pow_cache[e].scale_int(acc)
    else:
        for a in range(1, d):
            e = xi.value_exponent(a)
            if e is None:
                continue
            total = total + pow_cache[e].scale_int(table[a])
        b1 = generalized_bernoulli(1, xi, ring, precision=M)
        eul = euler_factor_at_p(xi, p, 0, ring)
        total = total + eul * b1.value.scale_int(log_unit(d, p, M))
    return LSpecialValue(total.truncate(M), "d/ds at 0",
                         "ferrero-greenberg-gamma", M)


def lp_deriv_zero_washington(chi: DirichletChar, ring: LocalRing,
                             F_multiple: int | None = None,
                             precision: int | None = None) -> LSpecialValue:
    """L_p'(0, chi) from Diamond's G_p: always feasible.

    F must be divisible by p, cond(chi) and cond(chi omega^-1); the sum is
    over units a < F of chi omega^-1(a) G_p(a/F), plus the Euler-factor
    B_1 log_p(F) correction.
    """
    p = ring.p
    prec = precision if precision is not None else min(ring.N - 2, 4)
    xi = chi_omega_power(chi, p, -1)
    F = F_multiple if F_multiple is not None else lcm(p, chi.conductor,
                                                      xi.conductor)
    if F % p != 0 or F % xi.conductor != 0 or F % chi.conductor != 0:
        raise ValueError("F must be divisible by p and both conductors")
    s = vp(F, p)
    M = prec + s + 1
    if M > ring.N:
        raise ValueError(f"ring precision {ring.N} below required {M}")
    pM = p**M
    F0 = F // p**s
    t = ScalarTables.get(p, M, F)
    L = t.log[:F]
    inv = t.inv[:F]
    logF0 = log_unit(F0, p, M) if F0 > 1 else 0
    invF0 = inv_mod(F0, pM)
    a = arange_mod(F, p, M)
    xhat = a * invF0 % pM
    logX = (L - logF0) % pM
    inv2 = inv_mod(2, pM)
    # p^s G_p(X) = (xhat - p^s/2) logX - xhat + p^s * series
    W = (xhat - p**s * inv2) % pM * logX % pM
    W = (W - xhat) % pM
    invx = inv * (F0 % pM) % pM        # 1/xhat for units
    from .localring import _bernoulli_cached, diamond_series_cutoff
    from .padicint import vp_fraction

    jcut = diamond_series_cutoff(s, p, M)
    invx_pow = invx.copy()
    for j in range(2, jcut + 1, 2):
        Bj = _bernoulli_cached(j) / (j * (j - 1))
        v = vp_fraction(Bj, p)
        unit = Bj / Fraction(p) ** v
        exp = s * j + v
        if exp < M:
            c = fraction_mod(unit, pM) * pow(p, exp, pM) % pM
            W = (W + invx_pow * c) % pM
        invx_pow = invx_pow * invx % pM
        invx_pow = invx_pow * invx % pM
    plan = CharSumPlan(xi, p, F, skip_p=True)
    buckets = plan.accumulate(W, pM)
    total = plan.assemble(ring, buckets, -s, M - s)
    b1 = generalized_bernoulli(1, xi, ring, precision=prec + 1)
    eul = euler_factor_at_p(xi, p, 0, ring)
    total = total + eul * b1.value.scale_int(log_unit(F0, p, prec + 1))
    return LSpecialValue(total.truncate(prec), "d/ds at 0", "washington-gp",
                         prec)


def lp_deriv_zero_jacobi(chi: DirichletChar, ring: LocalRing,
                         precision: int | None = None,
                         q_limit: int = 10**7) -> LSpecialValue:
    """L_p'(0, chi) via the Jacobi-sum reduction (trivial-zero case only)."""
    from .gaussjacobi import jacobi_route_value

    return jacobi_route_value(chi, ring, precision, q_limit)


# -- power-series viewpoint ------------------------------------------------------


def one_plus_p_power(ring: LocalRing, exponent: int) -> RingElement:
    base = ring.from_int(1 + ring.p)
    if exponent >= 0:
        return base.pow(exponent)
    return base.invert().pow(-exponent)


def log_one_plus_p_elt(ring: LocalRing) -> RingElement:
    c = [0] * ring.dim
    c[0] = log_one_plus_p(ring.p, ring.N)
    return RingElement(ring, tuple(c), 0, ring.N)


def f_prime_at_t0(k: int, chi: DirichletChar, ring: LocalRing,
                  precision: int) -> RingElement:
    """F_chi'(t0) at t0 = (1+p)^(1-k) - 1 by a three-point divided difference.

    Nodes T_m = (1+p)^(1-k-(p-1)m) - 1, m = 0,1,2 carry interpolated values;
    the quadratic term cancels, leaving an error of valuation >= 2.
    """
    p = ring.p
    vals = []
    nodes = []
    for m in range(3):
        n = k + (p - 1) * m
        vals.append(lp_interpolated(n, chi, ring, precision + 2).value)
        nodes.append(one_plus_p_power(ring, 1 - n) - ring.one())
    t0, A, B = nodes
    f0, fA, fB = vals
    d0A = (fA - f0).divide(A - t0)
    d0B = (fB - f0).divide(B - t0)
    dAB = (fA - fB).divide(A - B)
    return d0A + d0B - dAB


def f_chi_at(chi: DirichletChar, ring: LocalRing, point: str, k: int = 1,
             precision: int | None = None) -> RingElement:
    """Iwasawa power-series values through the special-value formulas.

    Parameter set 1 (t0 = (1+p)^(1-k) - 1, b = (1+p)^(1-p+1-k) - 1):
      point "t0" -> L_p(1-k, chi); "b" -> L_p(2-p-k, chi);
      "deriv-t0" -> L_p'(1-k, chi) / ((1+p)^(1-k) log_p(1+p)).
    Parameter set 2 (t0 = p):
      point "p" -> L_p(1, chi); "deriv-p" -> L_p'(1, chi)/((1+p) log_p(1+p)).
    """
    p = ring.p
    prec = precision if precision is not None else min(ring.N - 2, 4)
    if point == "t0":
        return lp_interpolated(k, chi, ring, prec).value
    if point == "b":
        return lp_interpolated(p + k - 1, chi, ring, prec).value
    if point == "deriv-t0":
        return f_prime_at_t0(k, chi, ring, prec)
    if point == "p":
        return lp_at_one(chi, ring, precision=min(prec, 3)).value
    if point == "deriv-p":
        lder = lp_deriv_at_one(chi, ring, precision=min(prec, 3)).value
        denom = one_plus_p_power(ring, 1) * log_one_plus_p_elt(ring)
        return lder.divide(denom)
    raise ValueError(f"unsupported evaluation point {point!r}")
