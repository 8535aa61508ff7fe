"""Batch surveys: lambda distributions, predicted probabilities,
trivial-zero prime searches, JSONL persistence with resume.

Records are append-only JSONL keyed by (p, theta, twist); interrupted scans
resume by skipping persisted keys, and shards merge into the same report
because aggregation is a commutative fold over records.
"""

from __future__ import annotations

import json
import time
import warnings
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from sympy import isprime, primerange

from .characters import DirichletChar, enumerate_primitive, teichmuller_char
from .invariants import LambdaResult, lambda_exact, lambda_gt


def predicted_probability(p: int, f: int, r: int, tol: float = 1e-12) -> float:
    """p^(-f r) * prod_{t > r} (1 - p^(-f t)), factors cut below 1 - tol."""
    if r < 0 or f < 1:
        raise ValueError("need r >= 0 and f >= 1")
    out = float(p) ** (-f * r)
    t = r + 1
    while True:
        factor = float(p) ** (-f * t)
        if factor < tol:
            break
        out *= 1.0 - factor
        t += 1
    return out


def predicted_row(p: int, f: int, r_max: int) -> list[float]:
    """Probabilities for r = 0..r_max-1 plus the tail mass P(r >= r_max)."""
    row = [predicted_probability(p, f, r) for r in range(r_max)]
    row.append(max(0.0, 1.0 - sum(row)))
    return row


def family_residue_degree(p: int, order: int) -> int:
    """Residue degree of the theta-value field: ord of p mod the
    prime-to-p part of `order` (divisors of p-1 contribute 1)."""
    t = order
    while t % p == 0:
        t //= p
    f = 1
    while pow(p, f, t) != 1 % t:
        f += 1
    return f


@dataclass
class SurveySpec:
    p: int
    order: int
    cond_max: int
    rank: int                  # 1: theta(p)=1 families; 0: rank-zero families
    i: int = 1                 # twist index
    constraint: str | None = None   # override the rank-implied theta(p) filter
    strategy: str = "bernoulli-twist"
    max_twist_level: int = 3
    out: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.p % 2 == 0 or not isprime(self.p):
            raise ValueError("p must be an odd prime")
        if self.cond_max < 1 or self.order < 1:
            raise ValueError("bounds must be positive")
        if self.rank == 1 and self.i != 1:
            raise ValueError("trivial zeros only occur at twist i = 1")

    @property
    def theta_parity(self) -> int:
        # chi = theta omega^i is even iff theta(-1) = (-1)^i
        return -1 if self.i % 2 == 1 else 1

    @property
    def p_constraint(self) -> str:
        if self.constraint is not None:
            return self.constraint
        if self.rank == 1:
            return "split"
        return "nonsplit" if self.i == 1 else "none"

    def family(self):
        yield from enumerate_primitive(self.order, self.cond_max,
                                       parity=self.theta_parity, p=self.p,
                                       p_constraint=self.p_constraint)


@dataclass
class DistributionReport:
    spec: dict
    counts: dict[int, int]
    n_total: int
    lower_bound_count: int
    runtime_s: float
    predicted: list[float] = dc_field(default_factory=list)

    @property
    def proportions(self) -> dict[int, float]:
        if self.n_total == 0:
            return {}
        return {k: v / self.n_total for k, v in sorted(self.counts.items())}

    def to_dict(self) -> dict:
        return {
            "spec": self.spec,
            "N": self.n_total,
            "counts": {str(k): v for k, v in sorted(self.counts.items())},
            "proportions": {str(k): v for k, v in self.proportions.items()},
            "predicted": self.predicted,
            "lower_bounds": self.lower_bound_count,
            "runtime_s": self.runtime_s,
        }

    def table(self) -> str:
        lines = []
        shift = 1 if self.spec.get("rank") == 1 else 0
        lams = sorted(self.counts)
        lines.append("lambda   count   proportion   predicted")
        for lam in lams:
            r = lam - shift
            pred = self.predicted[r] if 0 <= r < len(self.predicted) else 0.0
            lines.append(f"{lam:>6}  {self.counts[lam]:>6}   "
                         f"{self.counts[lam]/max(1,self.n_total):>9.4f}   {pred:>9.4f}")
        lines.append(f"N = {self.n_total}")
        return "\n".join(lines)


def record_key(rec: dict) -> tuple:
    return (rec["p"], rec["char"], rec.get("i", 1))


class JsonlStore:
    """Append-only JSONL persistence with corrupt-line-tolerant loading."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def load_records(self) -> list[dict]:
        out = []
        if not self.path.exists():
            return out
        with self.path.open() as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    out.append(json.loads(line))
                except json.JSONDecodeError:
                    warnings.warn(f"{self.path}:{lineno}: corrupt record "
                                  "skipped")
        return out

    def completed_keys(self) -> set[tuple]:
        return {record_key(r) for r in self.load_records()}

    def append(self, rec: dict):
        with self.path.open("a") as fh:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")

    def write_manifest(self, spec: dict):
        from . import __version__

        manifest = {"spec": spec, "version": __version__,
                    "created": time.strftime("%Y-%m-%dT%H:%M:%S")}
        self.path.with_suffix(".manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def result_record(theta: DirichletChar, i: int, res: LambdaResult,
                  runtime_ms: int) -> dict:
    return {
        "p": res.p,
        "char": theta.serialize(),
        "i": i,
        "rank": res.rank,
        "lambda": res.lambda_,
        "lower_bound": res.lower_bound,
        "method": res.method,
        "n": res.twist_level,
        "prec": res.precision,
        "f": res.f,
        "e": res.e,
        "runtime_ms": runtime_ms,
    }


def _scan_one(args):
    theta_ser, i, p, strategy, max_n = args
    theta = DirichletChar.parse(theta_ser)
    chi = (theta * teichmuller_char(p).galois_power(i)).primitive()
    t0 = time.time()
    res = lambda_exact(chi, p, max_twist_level=max_n, strategy=strategy)
    return result_record(theta, i, res, int((time.time() - t0) * 1000))


def scan_distribution(spec: SurveySpec, progress=None) -> DistributionReport:
    """Enumerate the family, run lambda_exact on each member, aggregate.

    Per-character failures are recorded (lambda = -1) rather than fatal.
    """
    t_start = time.time()
    store = JsonlStore(spec.out) if spec.out else None
    done: set[tuple] = set()
    records: list[dict] = []
    if store:
        records = store.load_records()
        done = {record_key(r) for r in records}
        store.write_manifest(spec.__dict__ | {"resumed": len(done)})
    todo = []
    for theta in spec.family():
        key = (spec.p, theta.serialize(), spec.i)
        if key in done:
            continue
        todo.append((theta.serialize(), spec.i, spec.p, spec.strategy,
                     spec.max_twist_level))
    if spec.jobs > 1 and len(todo) > 1:
        import concurrent.futures as cf

        with cf.ProcessPoolExecutor(max_workers=spec.jobs) as ex:
            for j, rec in enumerate(ex.map(_scan_one, todo, chunksize=16)):
                records.append(rec)
                if store:
                    store.append(rec)
                if progress and j % 200 == 0:
                    progress(j, len(todo))
    else:
        for j, args in enumerate(todo):
            try:
                rec = _scan_one(args)
            except Exception as exc:  # recorded, not fatal
                rec = {"p": spec.p, "char": args[0], "i": spec.i,
                       "lambda": -1, "error": str(exc)}
            records.append(rec)
            if store:
                store.append(rec)
            if progress and j % 200 == 0:
                progress(j, len(todo))
    return aggregate(spec, records, time.time() - t_start)


def aggregate(spec: SurveySpec, records: list[dict],
              runtime_s: float = 0.0) -> DistributionReport:
    counts: dict[int, int] = {}
    lower = 0
    n = 0
    for rec in records:
        lam = rec.get("lambda", -1)
        if lam < 0:
            continue
        n += 1
        counts[lam] = counts.get(lam, 0) + 1
        if rec.get("lower_bound"):
            lower += 1
    r_max = max((lam for lam in counts), default=0) + 1
    shift = 1 if spec.rank == 1 else 0
    predicted = predicted_row(spec.p, family_residue_degree(spec.p, spec.order),
                              max(1, r_max - shift))
    return DistributionReport(spec.__dict__.copy(), counts, n, lower,
                              runtime_s, predicted)


def trivial_zero_prime_search(theta: DirichletChar, p_max: int,
                              strategy: str = "bernoulli") -> list[dict]:
    """All odd p <= p_max with theta(p) = 1 and lambda_p(theta omega) > 1.

    Returns hit dicts carrying the residue class degree f and the witness
    valuations that decided each hit.
    """
    if not theta.is_odd:
        raise ValueError("theta must be odd")
    hits = []
    for p in primerange(3, p_max + 1):
        if theta.conductor % p == 0:
            continue
        if theta.value_exponent(p) != 0:
            continue
        chi = (theta * teichmuller_char(p)).primitive()
        gt, wits = lambda_gt(chi, p, 1, strategy=strategy)
        if gt:
            order = theta.order
            f = 1
            while pow(p, f, order) != 1 % order:
                f += 1
            hits.append({"p": p, "f": f, "witnesses": wits})
    return hits
