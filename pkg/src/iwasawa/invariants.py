"""The criteria engine: rank detection, lambda-threshold tests, exact lambda.

The exact-lambda computation follows the Taylor-coefficient valuation
principle: for a power series with mu = 0 evaluated at a point of valuation
1/((p-1)p^(n-1)) (a twist by a second-kind character of order p^n), the
valuation of the value, of the value minus the constant term, or of the
value minus the linear jet detects lambda below e-dependent cutoffs, and
each successful detection returns lambda = v * (p-1)p^(n-1) exactly. The
level n escalates until a part fires.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm

from .characters import DirichletChar, decompose, second_kind, teichmuller_char
from .kernels import ring_for_char
from .localring import LocalRing, PrecisionLoss, RingElement, Valuation
from .lvalues import (LSpecialValue, chi_omega_power, f_prime_at_t0,
                      lp_at_one, lp_deriv_at_one, lp_deriv_zero_washington,
                      lp_interpolated, log_one_plus_p_elt, one_plus_p_power)


class InconsistencyError(Exception):
    """Routes disagree or an exact lambda failed the integrality contract."""


class PrecisionCeiling(Exception):
    """Escalation hit the configured precision ceiling."""


def precision_ceiling() -> int:
    return int(os.environ.get("IWASAWA_PREC_CEILING", "12"))


@dataclass
class LambdaResult:
    chi: str
    p: int
    rank: str                  # "r0" | "r1"
    lambda_: int
    lower_bound: bool
    method: str
    twist_level: int
    precision: int
    f: int
    e: int
    witnesses: list[tuple[str, str]] = field(default_factory=list)

    def __str__(self):
        rel = ">=" if self.lower_bound else "="
        return (f"lambda_{self.p} {rel} {self.lambda_} [rank {self.rank}, "
                f"method {self.method}, n={self.twist_level}]")


def ramification_data(chi: DirichletChar, p: int) -> tuple[int, int]:
    """(e, f) of Z_p[zeta_ord(chi)]."""
    order = chi.order
    w = 0
    t = order
    while t % p == 0:
        t //= p
        w += 1
    e = (p - 1) * p ** (w - 1) if w else 1
    f = 1
    while pow(p, f, t) != 1 % t:
        f += 1
    return e, f


def detect_rank(chi: DirichletChar, p: int) -> str:
    """'r1' iff L_p(s, chi) has a trivial zero at s = 0."""
    if chi.is_trivial:
        raise ValueError("trivial character rejected")
    if chi.is_odd:
        raise ValueError("odd character rejected (no nonzero branch)")
    dec = decompose(chi, p)
    if dec.level != 0:
        raise ValueError("character must be of the first kind")
    xi = chi_omega_power(chi, p, -1)
    return "r1" if xi.value_exponent(p) == 0 else "r0"


def _chi_key(chi: DirichletChar, p: int) -> str:
    return chi.primitive().serialize()


class _Budget:
    """Precision escalation: rerun with two extra digits on PrecisionLoss."""

    def __init__(self, start: int):
        self.extra = 0
        self.start = start

    def run(self, fn):
        while True:
            try:
                return fn(self.extra)
            except PrecisionLoss:
                self.extra += 2
                if self.start + self.extra > precision_ceiling():
                    raise PrecisionCeiling(
                        f"needed more than {precision_ceiling()} digits")


def _euler_b_over_k(k: int, chi: DirichletChar, ring: LocalRing,
                    prec: int) -> RingElement:
    """F_chi(t0) = L_p(1-k, chi) (the constant term of the twist jet)."""
    return lp_interpolated(k, chi, ring, prec).value


def lambda_gt(chi: DirichletChar, p: int, threshold: int,
              strategy: str = "bernoulli",
              embedding_index: int = 0) -> tuple[bool, list[tuple[str, str]]]:
    """Decide lambda_p(chi) > threshold for threshold in {0, 1, 2}.

    strategy: 'bernoulli' (generalized Bernoulli valuations), 's1' (values at
    s = 1), 'deriv' (L_p'(0, chi)), or 'all' (every applicable route, with an
    agreement check). In the rank-zero case the threshold-1 conditions are
    sufficient only; when none fires the decision falls back to the exact
    computation.
    """
    if threshold not in (0, 1, 2):
        raise ValueError("threshold must be 0, 1 or 2")
    rank = detect_rank(chi, p)
    xi = chi_omega_power(chi, p, -1)
    witnesses: list[tuple[str, str]] = []

    def ring_at(extra: int, *orders: int) -> LocalRing:
        return ring_for_char(p, 10 + extra, chi.order, *orders,
                             embedding_index=embedding_index)

    budget = _Budget(10)

    if threshold == 0:
        if rank == "r1":
            witnesses.append(("trivial-zero", "forced"))
            return True, witnesses

        def dec0(extra):
            ring = ring_at(extra)
            from .bernoulli import generalized_bernoulli

            b1 = generalized_bernoulli(1, xi, ring, precision=4 + extra)
            v = b1.value.valuation()
            witnesses.append(("v(B_{1,chi w^-1})", str(v)))
            return not v.decides_less_than(Fraction(1))

        return budget.run(dec0), witnesses

    # threshold >= 1 needs lambda > threshold - 1 first
    below, wits = lambda_gt(chi, p, threshold - 1, strategy, embedding_index)
    witnesses.extend(wits)
    if not below:
        return False, witnesses

    if threshold == 1:
        if rank == "r1":
            def dec1(extra):
                ring = ring_at(extra)
                results = {}
                if strategy in ("bernoulli", "all"):
                    from .bernoulli import generalized_bernoulli

                    b = generalized_bernoulli(p, xi, ring, precision=5 + extra)
                    v = b.value.valuation()
                    witnesses.append(("v(B_{p,chi w^-1})", str(v)))
                    results["bernoulli"] = not v.decides_less_than(Fraction(3))
                if strategy in ("s1", "all"):
                    l1 = lp_at_one(chi, ring, precision=3)
                    v = l1.value.valuation()
                    witnesses.append(("v(L_p(1,chi))", str(v)))
                    results["s1"] = not v.decides_less_than(Fraction(2))
                if strategy in ("deriv", "all"):
                    ld = lp_deriv_zero_washington(chi, ring,
                                                  precision=4 + extra)
                    v = ld.value.valuation()
                    witnesses.append(("v(L_p'(0,chi))", str(v)))
                    results["deriv"] = not v.decides_less_than(Fraction(2))
                vals = set(results.values())
                if len(vals) > 1:
                    raise InconsistencyError(
                        f"threshold-1 routes disagree for {chi.serialize()} "
                        f"at p={p}: {results}")
                return vals.pop()

            return budget.run(dec1), witnesses

        # rank zero: sufficient conditions, fallback to exact lambda
        def dec1r0(extra):
            ring = ring_at(extra)
            from .bernoulli import generalized_bernoulli

            fired = []
            if strategy in ("deriv", "all"):
                ld = lp_deriv_zero_washington(chi, ring, precision=4 + extra)
                v = ld.value.valuation()
                witnesses.append(("v(L_p'(0,chi))", str(v)))
                fired.append(not v.decides_less_than(Fraction(2)))
            if strategy in ("s1", "all"):
                l1 = lp_at_one(chi, ring, precision=3)
                ft0 = _euler_b_over_k(1, chi, ring, 3)
                v = (ft0 - l1.value).valuation()
                witnesses.append(("v(L_p(0,chi)-L_p(1,chi))", str(v)))
                fired.append(not v.decides_less_than(Fraction(2)))
            if strategy in ("bernoulli", "all"):
                fb = lp_interpolated(p, chi, ring, 4 + extra).value
                ft0 = _euler_b_over_k(1, chi, ring, 4 + extra)
                v = (fb - ft0).valuation()
                witnesses.append(("v(F(b)-F(0))", str(v)))
                fired.append(not v.decides_less_than(Fraction(2)))
            return any(fired)

        if budget.run(dec1r0):
            return True, witnesses
        res = lambda_exact(chi, p, strategy="bernoulli-twist",
                           embedding_index=embedding_index)
        witnesses.append(("exact-fallback", str(res.lambda_)))
        return res.lambda_ > 1, witnesses

    # threshold == 2: both displayed conditions are equivalences
    def dec2(extra):
        ring = ring_at(extra)
        results = {}
        b_pt = one_plus_p_power(ring, 1 - p) - ring.one()
        logp1 = log_one_plus_p_elt(ring)
        if strategy in ("bernoulli", "deriv", "all"):
            fb = lp_interpolated(p, chi, ring, 5 + extra).value
            ld = lp_deriv_zero_washington(chi, ring, precision=5 + extra)
            ft0 = (_euler_b_over_k(1, chi, ring, 5 + extra)
                   if rank == "r0" else ring.zero())
            q = fb - ft0 - ld.value.divide(logp1) * b_pt
            v = q.valuation()
            witnesses.append(("v(F(b)-jet) via L'(0)", str(v)))
            results["bp-deriv"] = not v.decides_less_than(Fraction(3))
        if strategy in ("s1", "all"):
            l1 = lp_at_one(chi, ring, precision=3)
            ld1 = lp_deriv_at_one(chi, ring, precision=3)
            # F(0) + p F'(p) - F(p), with F(0) = -(1 - xi(p)) B_{1,xi}
            ft0 = (_euler_b_over_k(1, chi, ring, 5 + extra)
                   if rank == "r0" else ring.zero())
            opp = one_plus_p_power(ring, 1)
            q = ld1.value.scale_int(p).divide(opp * logp1) \
                - l1.value + ft0
            v = q.valuation()
            witnesses.append(("v(s1 jet)", str(v)))
            results["s1"] = not v.decides_less_than(Fraction(3))
        vals = set(results.values())
        if len(vals) > 1:
            raise InconsistencyError(
                f"threshold-2 conditions disagree for {chi.serialize()} "
                f"at p={p}: {results}")
        return vals.pop()

    return budget.run(dec2), witnesses


def lambda_exact(chi: DirichletChar, p: int, max_twist_level: int = 3,
                 strategy: str = "bernoulli-twist",
                 embedding_index: int = 0) -> LambdaResult:
    """Exact lambda by second-kind twist escalation.

    strategy 'bernoulli-twist' reads the twisted values at s = 1-k,
    's1-twist' at s = 1. Level n supplies a twist of order p^n; parts 1-3
    peel off the jet of the series at t0 before measuring the valuation.
    A fired part returns lambda = v * (p-1)p^(n-1), which must be a
    nonnegative integer (hard error otherwise).
    """
    if strategy not in ("bernoulli-twist", "s1-twist"):
        raise ValueError(f"unknown strategy {strategy!r}")
    chi = chi.primitive()
    rank = detect_rank(chi, p)
    dec = decompose(chi, p)
    theta, i = dec.theta, dec.i
    k = i if i != 0 else p - 1
    e, f = ramification_data(chi, p)
    witnesses: list[tuple[str, str]] = []
    budget = _Budget(8)

    for n in range(1, max_twist_level + 1):
        T = (p - 1) * p ** (n - 1)
        psi = second_kind(p, n)
        chipsi = (chi * psi).primitive()

        def level(extra: int, n=n, T=T, psi=psi, chipsi=chipsi):
            prec = 4 + extra
            ring = ring_for_char(p, prec + n + 5, chi.order, chipsi.order,
                                 embedding_index=embedding_index)
            zeta_psi = ring.root_of_unity(p**n).pow(
                dec_zeta_exponent(psi, p, n))
            if strategy == "bernoulli-twist":
                f_pi = lp_interpolated(k, chipsi, ring, prec).value
                f_t0 = lp_interpolated(k, chi, ring, prec).value
            else:
                f_pi = lp_at_one(chipsi, ring, precision=3).value
                f_t0 = lp_at_one(chi, ring, precision=3).value
            v1 = f_pi.valuation()
            witnesses.append((f"n={n} part1 v", str(v1)))
            if v1.decides_less_than(Fraction(1, e)):
                return _finish(chi, p, rank, v1.value, T, "part1", n,
                               strategy, prec, e, f, witnesses)
            q2 = f_pi - f_t0
            v2 = q2.valuation()
            witnesses.append((f"n={n} part2 v", str(v2)))
            if v2.decides_less_than(Fraction(1, e) + Fraction(1, T)):
                return _finish(chi, p, rank, v2.value, T, "part2", n,
                               strategy, prec, e, f, witnesses)
            # part 3: subtract the linear jet F'(t0) (pi_n - t0)
            if strategy == "bernoulli-twist":
                if k == 1:
                    ld = lp_deriv_zero_washington(chi, ring,
                                                  precision=prec + 2)
                    fp = ld.value.divide(log_one_plus_p_elt(ring))
                else:
                    fp = f_prime_at_t0(k, chi, ring, prec)
                step = one_plus_p_power(ring, 1 - k) * (zeta_psi - ring.one())
            else:
                ld1 = lp_deriv_at_one(chi, ring, precision=3)
                fp = ld1.value.divide(
                    one_plus_p_power(ring, 1) * log_one_plus_p_elt(ring))
                step = one_plus_p_power(ring, 1) * (zeta_psi - ring.one())
            q3 = q2 - fp * step
            v3 = q3.valuation()
            witnesses.append((f"n={n} part3 v", str(v3)))
            if v3.decides_less_than(Fraction(1, e) + Fraction(2, T)):
                return _finish(chi, p, rank, v3.value, T, "part3", n,
                               strategy, prec, e, f, witnesses)
            return None

        out = budget.run(level)
        if out is not None:
            return out

    T = (p - 1) * p ** (max_twist_level - 1)
    bound = -(-T // e) + 2  # ceil(T/e) + 2
    return LambdaResult(_chi_key(chi, p), p, rank, bound, True,
                        f"{strategy}:exhausted", max_twist_level, 0, f, e,
                        witnesses)


def dec_zeta_exponent(psi: DirichletChar, p: int, n: int) -> int:
    """Exponent x with zeta_psi = psi(1+p)^(-1) = zeta_{p^n}^x."""
    e = psi.value_exponent(1 + p)
    return (-e) % p**n


def _finish(chi, p, rank, v: Fraction, T: int, part: str, n: int,
            strategy: str, prec: int, e: int, f: int,
            witnesses) -> LambdaResult:
    lam = v * T
    if lam.denominator != 1 or lam < 0:
        raise InconsistencyError(
            f"non-integral lambda {lam} for {chi.serialize()} at p={p} "
            f"({strategy} {part}, n={n}); embedding or precision defect")
    lam = int(lam)
    if rank == "r1" and lam < 1:
        raise InconsistencyError(
            f"trivial zero but lambda={lam} for {chi.serialize()} at p={p}")
    return LambdaResult(_chi_key(chi, p), p, rank, lam, False,
                        f"{strategy}:{part}", n, prec, f, e, list(witnesses))


def lambda_field(theta: DirichletChar, p: int,
                 embedding_index: int = 0) -> tuple[list[LambdaResult], int]:
    """lambda of all odd-power twists theta^i omega (i odd), and their sum.

    For theta(p) = 1 every twist has a trivial zero, so the sum is at least
    ord(theta)/2 (the analytic shadow of lambda_p(K) >= r2).
    """
    if not theta.is_odd:
        raise ValueError("theta must be odd")
    if theta.conductor % p == 0:
        raise ValueError("conductor must be prime to p")
    om = teichmuller_char(p)
    results = []
    for i in range(1, theta.order, 2):
        chi = (theta.galois_power(i) * om).primitive()
        results.append(lambda_exact(chi, p, embedding_index=embedding_index))
    total = sum(r.lambda_ for r in results)
    if theta.value_exponent(p) == 0:
        r2 = theta.order // 2
        assert total >= r2, "rank-one twists must carry at least r2 zeros"
    return results, total
