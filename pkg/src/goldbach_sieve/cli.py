"""goldbach-sieve command line: identity suites, evaluations and hypothesis scans.

Exit codes: 0 success / no violation, 1 violations (or failed checks), 2 usage, 3 internal.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction

from . import admissible as adm
from . import counting as cnt
from . import densities as dens
from . import scanner as scn
from . import spectra as sp
from .modulus import ModulusError, ProblemInstance, SquareFreeModulus, primorial
from .suites import SUITES, run_suite

EXIT_OK, EXIT_FOUND, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
SLOW_N = 10**7


class UsageError(Exception):
    pass


def rational(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}")


def positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def g12(v: float) -> str:
    return f"{v:.12g}"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="goldbach-sieve", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run a seeded invariant suite")
    v.add_argument("--suite", required=True, choices=SUITES)
    v.add_argument("--max-p", type=positive_int, default=2310, help="largest modulus sampled")
    v.add_argument("--samples", type=positive_int, default=50)
    v.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("scan", help="scan the windowed slice-count hypotheses")
    s.add_argument("kind", choices=("ubh", "ubh-theta", "twin"))
    s.add_argument("--at", type=positive_int, help="single N")
    s.add_argument("--from", dest="n_from", type=positive_int)
    s.add_argument("--to", dest="n_to", type=positive_int)
    s.add_argument("--n", type=positive_int, help="N for the twin variant")
    s.add_argument("--m", type=positive_int, help="M for the twin variant")
    s.add_argument("--theta", action="store_true", help="twin variant: add theta'(M)")
    s.add_argument("--workers", type=positive_int, default=1)
    s.add_argument("--checkpoint", help="append-only progress file; resumes completed N")
    s.add_argument("--stride", type=positive_int, default=50, help="checkpoint flush stride")
    s.add_argument("--full", action="store_true", help="report every per-prime verdict")
    s.add_argument("--slow-ok", action="store_true", help=f"allow N >= {SLOW_N:.0e}")
    fmt = s.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")

    e = sub.add_parser("eval", help="evaluate a single quantity")
    e.add_argument("what", choices=("spectrum", "count", "error", "density", "witness"))
    e.add_argument("--n", type=positive_int, required=True)
    mod = e.add_mutually_exclusive_group()
    mod.add_argument("--p-limit-product", dest="P", type=positive_int, help="squarefree modulus P")
    mod.add_argument("--z", type=rational, help="P = product of primes <= z")
    e.add_argument("--k", type=int)
    e.add_argument("--x", type=rational)
    e.add_argument("--d", type=positive_int, help="slice divisor of P_6N")
    e.add_argument("--m", type=positive_int, help="witness: twin search with this M")
    e.add_argument("--fourier-k", type=positive_int, help="error: also the sine series to this many terms")
    e.add_argument("--json", action="store_true")
    return ap


# ---------------------------------------------------------------------------


def cmd_verify(args) -> int:
    results = run_suite(args.suite, args.max_p, args.samples, args.seed)
    for r in results:
        print(r.line())
    ok = all(r.ok for r in results)
    print(f"suite {args.suite}: {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FOUND


def _emit_report(report: scn.ScanReport, args) -> None:
    if args.json:
        print(report.to_json())
    elif args.csv:
        sys.stdout.write(report.to_csv())
    else:
        for s in report.summaries:
            m = "-" if s.worst_margin is None else g12(float(s.worst_margin))
            print(f"N={s.N} {s.status} worst_margin={m}")
        for v in report.verdicts:
            m = "-" if v.margin is None else g12(float(v.margin))
            x = "-" if v.worst_x is None else scn.fmt_q(v.worst_x)
            print(f"  N={v.N} p={v.p} {v.status} x={x} lhs={v.lhs} margin={m}")
        print(f"{len(report.violated_N)} of {len(report.summaries)} N violated")


def cmd_scan(args) -> int:
    if args.kind == "twin":
        if args.m is None or args.n is None:
            raise UsageError("scan twin needs --n and --m")
        if args.m < 2 * args.n + 1:
            raise UsageError(f"--m must be >= 2N + 1 = {2 * args.n + 1}")
        if args.m * args.m >= SLOW_N and not args.slow_ok:
            raise UsageError("M^2 this large is a slow operation; pass --slow-ok")
        t0 = time.perf_counter()
        vs = scn.check_ubh_prime(args.n, args.m, args.theta)
        summary = scn.NSummary(args.n, scn.overall_status(vs), scn.worst(vs).margin)
        report = scn.ScanReport("twin", (args.n, args.n), [summary], vs,
                                {"M": args.m, "theta": args.theta, "full": True},
                                sum(v.cells for v in vs), time.perf_counter() - t0)
    else:
        if args.at is not None:
            if args.n_from is not None or args.n_to is not None:
                raise UsageError("use either --at or --from/--to")
            lo = hi = args.at
            full = True
        else:
            if args.n_from is None or args.n_to is None:
                raise UsageError("give --at N or both --from and --to")
            lo, hi, full = args.n_from, args.n_to, args.full
        if lo > hi:
            raise UsageError(f"empty range: --from {lo} > --to {hi}")
        if lo < 2:
            raise UsageError("N must be >= 2")
        if hi >= SLOW_N and not args.slow_ok:
            raise UsageError(f"N >= {SLOW_N} is a slow operation; pass --slow-ok")
        report = scn.scan_ubh_range(lo, hi, theta=args.kind == "ubh-theta", workers=args.workers,
                                    checkpoint=args.checkpoint, stride=args.stride, full=full)
    _emit_report(report, args)
    print(f"wall_time={report.wall_time:.3f}s cells_sieved={report.cells_sieved}", file=sys.stderr)
    return EXIT_FOUND if report.violated_N else EXIT_OK


def _instance(args) -> ProblemInstance:
    if args.P is not None:
        try:
            return ProblemInstance(args.n, SquareFreeModulus.from_int(args.P))
        except ModulusError as exc:
            raise UsageError(str(exc))
    if args.z is not None:
        return ProblemInstance(args.n, primorial(math.floor(args.z)))
    return ProblemInstance.goldbach(args.n)


def _out(args, payload: dict, text: str) -> None:
    print(json.dumps(payload) if args.json else text)


def cmd_eval(args) -> int:
    if args.what == "witness":
        if args.m is not None:
            w = scn.twin_witness(args.n, args.m) if args.m >= 2 * args.n + 1 else None
            if w is None:
                raise UsageError(f"--m must be >= 2N + 1 = {2 * args.n + 1}")
            text = f"n={w.n} {w.p_large}-{w.p_small}" if w.found else "no witness found"
        else:
            if args.n < 4:
                raise UsageError("Goldbach witness needs N >= 4")
            w = scn.goldbach_witness(args.n)
            text = f"n={w.n} {w.p_small}+{w.p_large}" if w.found else "no witness found"
        _out(args, w.to_dict(), text)
        return EXIT_OK if w.found else EXIT_FOUND

    inst = _instance(args)
    if args.d is not None:
        try:
            inst.require_slice(args.d)
        except ModulusError as exc:
            raise UsageError(str(exc))
    if args.what == "spectrum":
        if args.k is None:
            raise UsageError("eval spectrum needs --k")
        val = (sp.spectrum_product(inst, args.k) if args.d is None
               else sp.slice_spectrum_product(inst, args.d, args.k))
        _out(args, {"N": inst.N, "P": inst.Pv, "k": args.k, "d": args.d, "value": val}, g12(val))
    elif args.what == "count":
        if args.x is None:
            raise UsageError("eval count needs --x")
        val = cnt.count_S(inst, args.x, args.d)
        _out(args, {"N": inst.N, "P": inst.Pv, "x": scn.fmt_q(args.x), "d": args.d, "S": val}, str(val))
    elif args.what == "error":
        if args.x is None:
            raise UsageError("eval error needs --x")
        if args.x.denominator == 1:
            raise UsageError("eval error needs a non-integer --x")
        if inst.Pv <= adm.ENUMERATION_LIMIT:
            val = cnt.error_T_fracsum(inst, args.x, args.d)
        else:
            val = cnt.error_T_from_counts(inst, args.x, args.d)
        payload = {"N": inst.N, "P": inst.Pv, "x": scn.fmt_q(args.x), "d": args.d,
                   "T": scn.fmt_q(val), "T_float": float(val)}
        text = f"{scn.fmt_q(val)} ({g12(float(val))})"
        if args.fourier_k:
            f = cnt.error_T_fourier(inst, args.x, args.fourier_k, args.d)
            payload["T_fourier"] = f
            text += f" fourier[{args.fourier_k}]={g12(f)}"
        _out(args, payload, text)
    else:
        w = dens.omega(inst, args.d)
        rows = {str(d): scn.fmt_q(dens.omega(inst, d).exact) for d in inst.slice_divisors()}
        payload = {"N": inst.N, "P": inst.Pv, "d": args.d, "omega": scn.fmt_q(w.exact),
                   "omega_float": w.approx, "omega_d": rows}
        lines = [f"{scn.fmt_q(w.exact)} ({g12(w.approx)})"]
        if args.d is None:
            lines += [f"  d={d}: {q}" for d, q in rows.items()]
        _out(args, payload, "\n".join(lines))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"verify": cmd_verify, "scan": cmd_scan, "eval": cmd_eval}[args.command]
    try:
        return handler(args)
    except (UsageError, cnt.IntegerArgumentError) as exc:
        print(f"goldbach-sieve: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # stable contract: anything unexpected is exit 3
        print(f"goldbach-sieve: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
