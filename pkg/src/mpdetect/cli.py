"""Command-line front end.

Exit codes: 0 success (or MP verdict holds), 1 MP verdict fails,
2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from .detectors import TestSpec, np_power_exact
from .gaussian import rdt_threshold, threshold_residual
from .montecarlo import estimate_pfa, rows_to_csv, rows_to_json, sweep
from .observation import Interference, ObservationSpec
from .preorder import build_landscape_abstraction

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

RDT_RULE = "RDT rejects (decides 1) when |sum(y)| > sqrt(n) * lambda"
NP_RULE = "NP rejects (decides 1) when sum(y) > sqrt(n) * phi_inv(1 - gamma)"


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    if not text.strip():
        return []
    return [int(v) for v in text.split(",")]


def _float_list(text: str) -> list[float]:
    if not text.strip():
        return []
    return [float(v) for v in text.split(",")]


def _sig10(x: float) -> str:
    return f"{x:.10g}"


def _p6(x: float) -> str:
    return f"{x:.6f}"


def _table(records: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(records, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(records[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(records)
    return buf.getvalue()


def cmd_threshold(args) -> tuple[str, int]:
    if not (0 < args.gamma < 1) or not (0 <= args.tau < 0.5) or args.n < 1:
        raise UsageError("need 0 < gamma < 1, 0 <= tau < 1/2 and n >= 1")
    a = args.tau * math.sqrt(args.n)
    lam = rdt_threshold(args.gamma, a)
    record = {
        "gamma": args.gamma,
        "tau": args.tau,
        "n": args.n,
        "a": _sig10(a),
        "lambda": _sig10(lam),
        "sum_threshold": _sig10(math.sqrt(args.n) * lam),
        "residual": f"{threshold_residual(lam, args.gamma, a):.3e}",
        "rule": RDT_RULE,
    }
    return _table([record], args.format), EXIT_OK


def cmd_np_power(args) -> tuple[str, int]:
    n_list = _int_list(args.n)
    if not n_list or not (0 < args.gamma < 1) or min(n_list) < 1:
        raise UsageError("need a non-empty n list of positive integers and 0 < gamma < 1")
    records = [{"n": n, "gamma": args.gamma, "pdet": _p6(np_power_exact(args.gamma, n))}
               for n in n_list]
    return _table(records, args.format), EXIT_OK


def cmd_sweep(args) -> tuple[str, int]:
    n_list = _int_list(args.n)
    if args.test.upper() == "RDT" and args.tau is None:
        raise UsageError("RDT sweeps need --tau")
    rows = sweep(args.test, args.gamma, args.q, args.interference, n_list, args.trials,
                 seed=args.seed, tau=args.tau, threads=args.threads)
    text = rows_to_json(rows) if args.format == "json" else rows_to_csv(rows)
    return text, EXIT_OK


def cmd_selectivity_demo(args) -> tuple[str, int]:
    if not (0 < args.q < 0.5):
        raise UsageError("selectivity-demo requires 0 < q < 1/2")
    tau = args.q if args.tau is None else args.tau
    model = ObservationSpec(0, args.q, args.n, Interference("worst_case_size"), args.seed)
    records = []
    for spec in (TestSpec.np(args.n, args.gamma), TestSpec.rdt(args.n, args.gamma, tau)):
        est = estimate_pfa(spec, model, args.trials, threads=args.threads)
        if spec.kind.value == "NP":
            violated = est.ci_low > args.gamma
            verdict = ("NP size guarantee violated for q>0" if violated
                       else "no violation detected")
            rule = NP_RULE
        else:
            within = est.ci_low <= args.gamma
            verdict = "RDT size guarantee holds" if within else "RDT size guarantee violated"
            rule = RDT_RULE
        records.append({
            "test": spec.label(),
            "q": args.q,
            "n": args.n,
            "trials": args.trials,
            "pfa": _p6(est.p_hat),
            "pfa_lo": _p6(est.ci_low),
            "pfa_hi": _p6(est.ci_high),
            "verdict": verdict,
            "rule": rule,
        })
    return _table(records, args.format), EXIT_OK


def cmd_mp_check(args) -> tuple[str, int]:
    n_grid = _int_list(args.n_grid)
    q_grid = _float_list(args.q_grid)
    if not n_grid or not q_grid:
        raise UsageError("n-grid and q-grid must be non-empty")
    abstraction = build_landscape_abstraction(
        args.gamma, args.tau, n_grid, q_grid, mode=args.mode, trials=args.trials,
        seed=args.seed, threads=args.threads,
        same_dimension_only=not args.cross_dimension,
    )
    verdict = abstraction.check()
    record = abstraction.verdict_record(verdict)
    if abstraction.degenerate:
        record["failure_reason"] = (
            "degenerate: tau=0 gives RDT the selectivity {0} of NP; "
            + str(record["failure_reason"])
        )
    return json.dumps(record, indent=2) + "\n", EXIT_OK if verdict.holds else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mpdetect", description="NP and RDT detectors, Monte Carlo checks and MP verification."
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--threads", type=int, default=1, help="worker threads; results do not depend on it")
    common.add_argument("--seed", type=int, default=0)

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("threshold", parents=[common], help="RDT threshold lambda_gamma(tau sqrt(n))")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--n", type=int, default=1)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("np-power", parents=[common], help="exact NP detection probability")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--n", required=True, help="comma-separated sample sizes")
    p.set_defaults(func=cmd_np_power)

    p = sub.add_parser("sweep", parents=[common], help="Monte Carlo size/power sweep over n")
    p.add_argument("--test", choices=("NP", "RDT", "np", "rdt"), required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--q", type=float, default=0.0)
    p.add_argument("--interference", default="zero",
                   help="zero | const:<c> | alt:<a> | unif | worst | sin:<a>:<p>")
    p.add_argument("--n", required=True, help="comma-separated sample sizes")
    p.add_argument("--trials", type=int, default=100_000)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("selectivity-demo", parents=[common],
                       help="NP size violation under interference, with an RDT comparison row")
    p.add_argument("--gamma", type=float, default=0.05)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--tau", type=float, default=None, help="RDT tau (default: q)")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--trials", type=int, default=100_000)
    p.set_defaults(func=cmd_selectivity_demo)

    p = sub.add_parser("mp-check", parents=[common], help="Multiplicity Principle on the landscape abstraction")
    p.add_argument("--gamma", type=float, default=0.05)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--n-grid", required=True)
    p.add_argument("--q-grid", required=True)
    p.add_argument("--mode", choices=("analytic", "mc"), default="analytic")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--cross-dimension", action="store_true",
                   help="also order landscapes of different n by power (finite truncation then has a top element per family)")
    p.set_defaults(func=cmd_mp_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        text, code = args.func(args)
    except (UsageError, ValueError, KeyError) as exc:
        print(f"mpdetect {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.out is None:
            sys.stdout.write(text)
        else:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    except OSError as exc:
        print(f"mpdetect {args.command}: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
