"""Command-line front end.

Subcommands: lambda (single character), scan (distribution survey),
trivial-zeros (prime search for a fixed character), validate (cross-formula
suites), predict (distribution predicted by the heuristic).

Exit codes: 0 success, 1 usage error, 2 computational inconsistency
(non-integral lambda, route disagreement), 3 precision ceiling reached.
"""

from __future__ import annotations

import argparse
import json
import sys

from .characters import DirichletChar, quadratic_char, teichmuller_char
from .invariants import (InconsistencyError, PrecisionCeiling, lambda_exact,
                         lambda_gt)
from .survey import (SurveySpec, predicted_row, scan_distribution,
                     trivial_zero_prime_search)


def _theta_from_args(args) -> DirichletChar:
    if getattr(args, "disc", None) is not None:
        return quadratic_char(args.disc)
    if getattr(args, "char", None):
        return DirichletChar.parse(args.char)
    raise SystemExit("one of --char or --disc is required")


def cmd_lambda(args) -> int:
    theta = _theta_from_args(args)
    chi = (theta * teichmuller_char(args.p).galois_power(args.i)).primitive()
    res = lambda_exact(chi, args.p, max_twist_level=args.max_n,
                       strategy=args.strategy)
    print(f"chi = {theta.serialize()} * omega^{args.i}  (p = {args.p})")
    print(res)
    print(f"residue degree f = {res.f}, ramification e = {res.e}")
    for label, val in res.witnesses:
        print(f"  witness {label}: {val}")
    if args.json:
        print(json.dumps({
            "p": res.p, "char": theta.serialize(), "i": args.i,
            "rank": res.rank, "lambda": res.lambda_,
            "lower_bound": res.lower_bound, "method": res.method,
            "n": res.twist_level, "prec": res.precision,
            "f": res.f, "e": res.e,
        }, sort_keys=True))
    return 0


def cmd_scan(args) -> int:
    spec = SurveySpec(p=args.p, order=args.order, cond_max=args.cond_max,
                      rank=args.rank, i=args.i, strategy=args.strategy,
                      max_twist_level=args.max_n, out=args.out,
                      jobs=args.jobs)

    def progress(done, total):
        print(f"  ... {done}/{total}", file=sys.stderr)

    rep = scan_distribution(spec, progress=progress if args.verbose else None)
    print(rep.table())
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(rep.to_dict(), fh, indent=2, sort_keys=True)
        print(f"report written to {args.report}")
    return 0


def cmd_trivial_zeros(args) -> int:
    theta = _theta_from_args(args)
    hits = trivial_zero_prime_search(theta, args.p_max)
    if not hits:
        print(f"no primes p <= {args.p_max} with a trivial zero and "
              f"lambda > 1 for {theta.serialize()}")
        return 0
    for h in hits:
        wit = "; ".join(f"{k}={v}" for k, v in h["witnesses"])
        print(f"p = {h['p']}  (f = {h['f']})  [{wit}]")
    return 0


def cmd_validate(args) -> int:
    from .validate import SUITES

    suite = SUITES[args.suite]
    kwargs = {}
    if args.suite == "congruences":
        kwargs = {"samples": args.samples, "seed": args.seed}
    elif args.suite == "identities":
        kwargs = {"seed": args.seed}
    checks, failures = suite(**kwargs)
    for label, ok, detail in checks:
        if args.verbose or not ok:
            print(f"[{'pass' if ok else 'FAIL'}] {label}: {detail}")
    print(f"{args.suite}: {len(checks) - len(failures)}/{len(checks)} passed")
    return 0 if not failures else 2


def cmd_predict(args) -> int:
    row = predicted_row(args.p, args.f, args.rows)
    body = "  ".join(f"{x:.4f}" for x in row[:-1])
    print(f"p={args.p} f={args.f}: {body}  (tail {row[-1]:.4f})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="iwasawa",
        description="Iwasawa lambda-invariants of Dirichlet characters from "
                    "p-adic L-values")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def add_char_opts(sp):
        sp.add_argument("--char", help="character spec m:g1^k1,g2^k2,...")
        sp.add_argument("--disc", type=int,
                        help="fundamental discriminant (quadratic character)")

    sp = sub.add_parser("lambda", help="exact lambda for one character")
    add_char_opts(sp)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--i", type=int, default=1, help="twist index (default 1)")
    sp.add_argument("--strategy", default="bernoulli-twist",
                    choices=["bernoulli-twist", "s1-twist"])
    sp.add_argument("--max-n", type=int, default=3)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(fn=cmd_lambda)

    sp = sub.add_parser("scan", help="lambda distribution over a family")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--order", type=int, required=True)
    sp.add_argument("--cond-max", type=int, required=True)
    sp.add_argument("--rank", type=int, choices=[0, 1], required=True)
    sp.add_argument("--i", type=int, default=1)
    sp.add_argument("--strategy", default="bernoulli-twist",
                    choices=["bernoulli-twist", "s1-twist"])
    sp.add_argument("--max-n", type=int, default=3)
    sp.add_argument("--out", help="JSONL output (resumable)")
    sp.add_argument("--report", help="JSON report path")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--verbose", action="store_true")
    sp.set_defaults(fn=cmd_scan)

    sp = sub.add_parser("trivial-zeros",
                        help="primes with a trivial zero and lambda > 1")
    add_char_opts(sp)
    sp.add_argument("--p-max", type=int, required=True)
    sp.set_defaults(fn=cmd_trivial_zeros)

    sp = sub.add_parser("validate", help="cross-formula validation suites")
    sp.add_argument("--suite", required=True,
                    choices=["routes", "congruences", "identities"])
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--seed", type=int, default=20260809)
    sp.add_argument("--verbose", action="store_true")
    sp.set_defaults(fn=cmd_validate)

    sp = sub.add_parser("predict", help="predicted lambda distribution row")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--f", type=int, default=1)
    sp.add_argument("--rows", type=int, default=7)
    sp.set_defaults(fn=cmd_predict)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except InconsistencyError as exc:
        print(f"inconsistency: {exc}", file=sys.stderr)
        return 2
    except PrecisionCeiling as exc:
        print(f"precision ceiling: {exc}", file=sys.stderr)
        return 3
    except (ValueError, SystemExit) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
