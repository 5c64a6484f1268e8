"""Command-line front end.

Exit codes: 0 success / all proved, 1 a claim refuted or an inequality
violated, 2 a claim inconclusive, 3 bad input (usage, file format, domain).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import __version__
from .certify import (
    REFERENCE_LINE,
    claims_from_text,
    emit_figure_data,
    verify_claims,
    verify_theorem_certificates,
)
from .errors import PreconditionError, SumfreeError, UsageError
from .fields import BinaryFieldCtx, PrimeFieldCtx
from .search import (
    SCAN_HEADER,
    conjecture_scan,
    exhaustive_limit,
    heuristic_search,
    max_sum_free,
    max_sum_free_inverse_closed,
)
from .spectrum import diagnose, kloosterman_char2_all, kloosterman_prime, kloosterman_prime_matrix
from .subsets import (
    char2_density_bound,
    construct_char2,
    construct_interval_intersection,
    dump_set,
    is_inverse_closed,
    is_sum_free,
    load_set,
    set_to_json,
)

EXIT_OK, EXIT_REFUTED, EXIT_INCONCLUSIVE, EXIT_ERROR = 0, 1, 2, 3
RUN_LOG = "runs.jsonl"


def fmt(x) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def results_dir() -> Path:
    return Path(os.environ.get("SUMFREE_RESULTS_DIR", "results"))


@dataclass
class RunRecord:
    command: str
    params: dict
    started: str
    finished: str = ""
    outcome: dict = field(default_factory=dict)
    version: str = __version__

    def append(self, directory: Path) -> None:
        directory.mkdir(parents=True, exist_ok=True)
        line = (json.dumps(asdict(self), default=str, sort_keys=True) + "\n").encode()
        # a single O_APPEND write keeps concurrent appends whole
        fd = os.open(directory / RUN_LOG, os.O_WRONLY | os.O_APPEND | os.O_CREAT, 0o644)
        try:
            os.write(fd, line)
        finally:
            os.close(fd)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


def _write_json(path: Path, data) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, default=str) + "\n")


# ---------------------------------------------------------------------------
# commands


def cmd_spectrum(args, out) -> tuple[int, dict]:
    A = load_set(args.set_file)
    if A.field.kind != "prime":
        raise UsageError("Fourier diagnostics need a prime field")
    if args.require_inverse_closed and not is_inverse_closed(A):
        raise PreconditionError("set is not inverse-closed (or contains 0)")
    if args.require_sum_free and not is_sum_free(A):
        raise PreconditionError("set is not sum-free")
    if A.size == 0:
        raise PreconditionError("diagnostics need a nonempty set")
    report = diagnose(A, ks=args.k or (), m=args.m, rs=args.r or (), alpha0=args.alpha0)
    path = Path(args.out) if args.out else results_dir() / f"spectrum_p{A.field.p}.json"
    _write_json(path, report.to_json())
    for r in report.records:
        status = "n/a" if r.holds is None else ("ok" if r.holds else "VIOLATED")
        print(f"{r.name:<16} lhs={fmt(r.lhs)} {r.relation} rhs={fmt(r.rhs)}  {status}", file=out)
    bad = report.violations()
    print(f"report: {path}  violations: {len(bad)}", file=out)
    return (EXIT_REFUTED if bad else EXIT_OK), {"report": str(path), "violations": len(bad)}


def _parse_range(text: str) -> list[int]:
    try:
        a, b = text.split("..")
        lo, hi = int(a), int(b)
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected LO..HI") from None
    if lo > hi:
        raise UsageError(f"empty range {text!r}")
    from sympy import primerange

    return list(primerange(lo, hi + 1))


def _field_from_args(args):
    if args.p is not None:
        return PrimeFieldCtx(args.p)
    if args.n is not None:
        return BinaryFieldCtx(args.n, int(args.modulus, 16) if args.modulus else 0)
    raise UsageError("give --p or --n")


def cmd_search(args, out) -> tuple[int, dict]:
    if args.scan:
        primes = _parse_range(args.scan)
        rows = conjecture_scan(primes, heuristic=args.heuristic, seed=args.seed,
                               budget=args.budget, workers=args.threads)
        path = Path(args.out) if args.out else results_dir() / f"scan_{args.scan.replace('..', '_')}.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(SCAN_HEADER)
            for row in rows:
                w.writerow(row.csv_fields())
        w = csv.writer(out)
        w.writerow(SCAN_HEADER)
        for row in rows:
            w.writerow(row.csv_fields())
        return EXIT_OK, {"scan": str(path), "rows": len(rows)}

    ctx = _field_from_args(args)
    if args.heuristic:
        res = heuristic_search(ctx, seed=args.seed, budget=args.budget, kind=args.kind)
    else:
        fn = max_sum_free if args.kind == "sigma" else max_sum_free_inverse_closed
        limit = args.limit
        if ctx.order > (exhaustive_limit(args.kind, ctx) if limit is None else limit):
            raise UsageError(f"field of order {ctx.order} exceeds the exhaustive limit; "
                             "pass --heuristic")
        res = fn(ctx, limit=limit, seed=args.seed, budget=args.budget)
    tag = f"p{ctx.p}" if ctx.kind == "prime" else f"n{ctx.n}"
    path = Path(args.out) if args.out else results_dir() / f"search_{args.kind}_{tag}.json"
    _write_json(path, res.to_json())
    print(f"{args.kind} {tag}: best_size={res.best_size} density={fmt(res.density)} "
          f"optimal={str(res.optimal).lower()} nodes={res.nodes_explored} "
          f"time={fmt(res.wall_time)}s", file=out)
    print(f"set: {set_to_json(res.best_set)['elements']}", file=out)
    return EXIT_OK, {"best_size": res.best_size, "optimal": res.optimal, "result": str(path)}


def cmd_construct(args, out) -> tuple[int, dict]:
    if args.kind == "char2":
        if args.n is None:
            raise UsageError("char2 construction needs --n")
        ctx = BinaryFieldCtx(args.n, int(args.modulus, 16) if args.modulus else 0)
        A = construct_char2(ctx)
        bound = char2_density_bound(ctx.n)
        tag = f"n{ctx.n}"
    else:
        if args.p is None:
            raise UsageError("interval construction needs --p")
        ctx = PrimeFieldCtx(args.p)
        A = construct_interval_intersection(ctx)
        bound = (ctx.p + 1) / 3 / ctx.p
        tag = f"p{ctx.p}"
    if A.size == 0:
        print(f"warning: the construction is empty for {tag}", file=sys.stderr)
    path = Path(args.out) if args.out else results_dir() / f"construct_{args.kind}_{tag}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    dump_set(A, path)
    alpha = A.alpha
    print(f"size={A.size} alpha={fmt(alpha)} ({fmt(float(alpha))})", file=out)
    if args.kind == "char2":
        dev = abs(float(alpha) - 0.25)
        print(f"|alpha - 1/4| = {fmt(dev)} <= (1+2 sqrt q)/(4q) = {fmt(bound)}", file=out)
    else:
        print(f"sum-free cap (p+1)/(3p) = {fmt(bound)}", file=out)
    print(f"set file: {path}", file=out)
    return EXIT_OK, {"size": A.size, "alpha": fmt(alpha), "set": str(path)}


def cmd_verify(args, out) -> tuple[int, dict]:
    if args.theorem == bool(args.claims_file):
        raise UsageError("give a claims file or --theorem (not both)")
    if args.theorem:
        report = verify_theorem_certificates(budget=args.budget or 10 ** 6, workers=args.threads)
    else:
        claims = claims_from_text(Path(args.claims_file).read_text())
        if args.budget:
            for c in claims:
                c.budget = args.budget
        report = verify_claims(claims, workers=args.threads)
    for i, (c, r) in enumerate(zip(report.claims, report.results)):
        label = c.name or f"claim{i}"
        extra = ""
        if r.status == "proved" and r.certified_bound is not None:
            extra = f" bound={fmt(r.certified_bound)}"
        elif r.status == "refuted":
            extra = (f" at x={[fmt(v) for v in r.refutation_point]}"
                     f" value=[{r.refutation_value[0]!r}, {r.refutation_value[1]!r}]")
        thr = "" if c.threshold is None else f" {c.threshold}"
        print(f"{label:<8} {c.expr:<6} {c.kind}{thr}: {r.status.upper()}"
              f" boxes={r.boxes_processed} depth={r.max_depth}{extra}", file=out)
    print(f"{report.proved}/{len(report.results)} proved", file=out)
    path = Path(args.report) if args.report else results_dir() / "verify_report.json"
    _write_json(path, report.to_json())
    return report.exit_code, {"proved": report.proved, "total": len(report.results),
                              "report": str(path)}


def cmd_figure(args, out) -> tuple[int, dict]:
    rows = emit_figure_data(args.expr, args.lo, args.hi, args.samples)
    print(f"# expr={args.expr}", file=out)
    print(f"# reference_line={REFERENCE_LINE}", file=out)
    w = csv.writer(out)
    w.writerow(["x", "value"])
    for x, v in rows:
        w.writerow([fmt(x), fmt(v)])
    return EXIT_OK, {"rows": len(rows), "min": min(v for _, v in rows)}


def cmd_kloosterman(args, out) -> tuple[int, dict]:
    if args.p is not None:
        ctx = PrimeFieldCtx(args.p)
        bound = 2 * ctx.p ** 0.5
        if args.a is not None:
            b = 1 if args.b is None else args.b
            v = kloosterman_prime(ctx, args.a, b)
            print(f"K({args.a},{b}) = {fmt(v)}  Weil bound {fmt(bound)}", file=out)
            return EXIT_OK, {"value": v}
        K = kloosterman_prime_matrix(ctx)[1:, 1:]
        worst = float(abs(K.real).max())
        imag = float(abs(K.imag).max())
    else:
        if args.n is None:
            raise UsageError("give --p or --n")
        ctx = BinaryFieldCtx(args.n, int(args.modulus, 16) if args.modulus else 0)
        bound = 2 * ctx.order ** 0.5
        K = kloosterman_char2_all(ctx)[1:]
        if args.a is not None:
            v = int(K[ctx.check(args.a) - 1])
            print(f"K({args.a}) = {v}  Weil bound {fmt(bound)}", file=out)
            return EXIT_OK, {"value": v}
        worst = float(abs(K).max())
        imag = 0.0
    ok = worst <= bound + 1e-9 * bound
    print(f"max |K| = {fmt(worst)}  Weil bound {fmt(bound)}  max |Im| = {fmt(imag)}  "
          f"{'ok' if ok else 'VIOLATED'}", file=out)
    return (EXIT_OK if ok else EXIT_REFUTED), {"max": worst, "bound": bound}


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_ERROR)


def _field_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p", type=int, help="prime field order")
    p.add_argument("--n", type=int, help="degree of GF(2^n)")
    p.add_argument("--modulus", help="irreducible modulus for GF(2^n), hex")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="RNG seed (default 0)")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="max worker processes (default 1)")
    ap = _Parser(prog="sumfree", description=__doc__.splitlines()[0], parents=[common])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("spectrum", parents=[common], help="Fourier diagnostics for a set file")
    sp.add_argument("set_file")
    sp.add_argument("--k", type=int, action="append", help="tail-bound index (repeatable)")
    sp.add_argument("--m", type=int, help="number of shifts for the self-inverse bound")
    sp.add_argument("--r", type=int, action="append", help="frequency for doubling bounds")
    sp.add_argument("--alpha0", type=float)
    sp.add_argument("--require-inverse-closed", action="store_true")
    sp.add_argument("--require-sum-free", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_spectrum)

    se = sub.add_parser("search", parents=[common], help="largest sum-free (sigma) or also inverse-closed (mu) set")
    se.add_argument("kind", choices=["sigma", "mu"])
    _field_flags(se)
    se.add_argument("--scan", help="prime range LO..HI; prints scan CSV")
    se.add_argument("--heuristic", action="store_true", help="allow tabu search beyond the limit")
    se.add_argument("--budget", type=int, default=10000, help="heuristic move budget")
    se.add_argument("--limit", type=int, help="override the exhaustive field-size limit")
    se.add_argument("--out")
    se.set_defaults(func=cmd_search)

    co = sub.add_parser("construct", parents=[common], help="explicit constructions")
    co.add_argument("kind", choices=["char2", "interval"])
    _field_flags(co)
    co.add_argument("--out")
    co.set_defaults(func=cmd_construct)

    ve = sub.add_parser("verify", parents=[common], help="interval branch-and-bound certificates")
    ve.add_argument("claims_file", nargs="?")
    ve.add_argument("--theorem", action="store_true", help="run the built-in suite")
    ve.add_argument("--budget", type=int, help="override the per-claim box budget")
    ve.add_argument("--report", help="where to write the JSON report")
    ve.set_defaults(func=cmd_verify)

    fi = sub.add_parser("figure", parents=[common], help="CSV samples of a catalogued expression")
    fi.add_argument("expr")
    fi.add_argument("lo")
    fi.add_argument("hi")
    fi.add_argument("samples", type=int)
    fi.set_defaults(func=cmd_figure)

    kl = sub.add_parser("kloosterman", parents=[common], help="Kloosterman sums and the Weil bound")
    _field_flags(kl)
    kl.add_argument("--a", type=int)
    kl.add_argument("--b", type=int)
    kl.set_defaults(func=cmd_kloosterman)
    return ap


def _params(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func",)}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code
    # --seed/--threads may appear before or after the subcommand
    args.seed = getattr(args, "seed", 0)
    args.threads = getattr(args, "threads", 1)
    record = RunRecord(args.command, _params(args), _now())
    t0 = time.perf_counter()
    try:
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        code, summary = args.func(args, out)
    except (SumfreeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        code, summary = EXIT_ERROR, {"error": str(exc)}
    record.finished = _now()
    record.outcome = {"exit_code": code, "seconds": round(time.perf_counter() - t0, 6), **summary}
    try:
        record.append(results_dir())
    except OSError as exc:
        print(f"warning: could not write run log: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
