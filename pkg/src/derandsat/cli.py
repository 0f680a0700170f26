"""``derandsat`` command line: solve, verify, gen, bench, params.

Exit codes for ``solve``: 0 found, 1 not found, 2 promise violated,
3 bad input or configuration.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .cnf import DimacsError, read_dimacs
from .counting import ExhaustiveLimitError
from .params import BudgetError, compute_parameters, cost_model, verify_proposition
from .pipeline import DRIVERS, SolveOptions, exit_status, solve

EXIT_OK, EXIT_NOT_FOUND, EXIT_PROMISE, EXIT_CONFIG = 0, 1, 2, 3


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _unit_fraction(text: str) -> Fraction:
    v = _fraction(text)
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError(f"{text} is not in (0, 1]")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text} must be positive")
    return v


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would collide with "promise violated"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="seed for every random choice")
    p.add_argument("--max-exhaustive", type=_positive_int, default=None,
                   help="largest variable count enumerated exhaustively (env DERAND_MAX_EXHAUSTIVE)")


def _solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eps", type=_unit_fraction, default=None,
                   help="promised bias; omitted means try 1/2, 1/4, ... down to --eps-floor")
    p.add_argument("--eps-floor", type=_unit_fraction, default=Fraction(1, 64))
    p.add_argument("--mode", choices=("paper", "practical"), default="practical")
    p.add_argument("--const-C", dest="C", type=float, default=1.0)
    p.add_argument("--p", type=_unit_fraction, default=Fraction(1, 2), help="star density (practical mode)")
    p.add_argument("--stars", choices=("exhaustive", "kwise-select", "blockwise"), default="exhaustive")
    p.add_argument("--fill", choices=("uniform", "kwise", "smallbias"), default="uniform")
    p.add_argument("--counter", choices=("exact", "adversarial"), default="exact")
    p.add_argument("--delta", type=_fraction, default=None, help="adversarial counter accuracy (default eps/(4n))")
    p.add_argument("--skew", choices=("down", "up", "random", "flatten"), default="random")


def _options(args, driver: str) -> SolveOptions:
    return SolveOptions(driver=driver, mode=args.mode, C=args.C, p=args.p, stars=args.stars, fill=args.fill,
                        counter=args.counter, delta=args.delta, skew=args.skew, seed=args.seed,
                        limit=args.max_exhaustive, eps_floor=args.eps_floor)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="derandsat", description="Deterministic search for satisfying assignments of dense CNFs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="find a satisfying assignment of a DIMACS formula")
    s.add_argument("input")
    s.add_argument("--driver", choices=DRIVERS, default="auto")
    _solver_flags(s)
    s.add_argument("--trace-out", default=None, help="stage trace CSV")
    s.add_argument("--summary-out", default=None, help="summary JSON")
    _common(s)

    v = sub.add_parser("verify", help="run invariant suites")
    v.add_argument("--suite", choices=("core", "counting", "prg", "restrictions", "framework", "params", "all"),
                   default="all")
    v.add_argument("--summary-out", default=None)

    g = sub.add_parser("gen", help="generate a planted instance with an exact bias sidecar")
    g.add_argument("--n", type=_positive_int, required=True)
    g.add_argument("--M", type=_positive_int, required=True)
    g.add_argument("--k", type=_positive_int, default=3)
    g.add_argument("--target-eps", type=_unit_fraction, default=Fraction(1, 4))
    g.add_argument("--max-tries", type=_positive_int, default=1000)
    g.add_argument("--out", required=True, help="output stem; writes <stem>.cnf and <stem>.json")
    _common(g)

    b = sub.add_parser("bench", help="instance x driver matrix as CSV")
    b.add_argument("inputs", nargs="*", help="DIMACS files (a .json sidecar next to each supplies eps)")
    b.add_argument("--planted", type=int, default=0, help="also generate this many planted instances")
    b.add_argument("--planted-n", type=_positive_int, default=10)
    b.add_argument("--planted-M", type=_positive_int, default=20)
    b.add_argument("--planted-k", type=_positive_int, default=3)
    b.add_argument("--drivers", default="stagewise,naive,prg-enum")
    b.add_argument("--jobs", type=_positive_int, default=1)
    b.add_argument("--out", default=None, help="CSV path (default stdout)")
    _solver_flags(b)
    _common(b)

    p = sub.add_parser("params", help="parameter set, proposition check and cost model as JSON")
    p.add_argument("--M", type=_positive_int, required=True)
    p.add_argument("--n", type=_positive_int, default=None)
    p.add_argument("--eps", type=_unit_fraction, default=Fraction(1, 2))
    p.add_argument("--const-C", dest="C", type=float, default=1.0)
    p.add_argument("--mode", choices=("paper", "practical"), default="paper")
    p.add_argument("--p", type=_unit_fraction, default=None)
    return parser


def _config_error(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return EXIT_CONFIG


def cmd_solve(args) -> int:
    try:
        F = read_dimacs(args.input)
    except DimacsError as exc:
        return _config_error(f"{args.input}: {exc}")
    except OSError as exc:
        return _config_error(str(exc))
    try:
        trace = solve(F, args.eps, _options(args, args.driver))
    except (ExhaustiveLimitError, BudgetError, ValueError) as exc:
        return _config_error(str(exc))
    if args.trace_out:
        Path(args.trace_out).write_text(trace.to_csv())
    if args.summary_out:
        Path(args.summary_out).write_text(trace.summary_json() + "\n")
    code = exit_status(trace)
    if code == EXIT_OK:
        print(trace.outcome.bits)
    else:
        print(f"no assignment: {trace.failure} (stage {trace.failure_stage})", file=sys.stderr)
    return code


def cmd_verify(args) -> int:
    from .verify import report_json, run_suite

    results = run_suite(args.suite)
    text = report_json(results)
    print(text)
    if args.summary_out:
        Path(args.summary_out).write_text(text + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_NOT_FOUND


def cmd_gen(args) -> int:
    from .planted import GenerationError, generate_planted

    try:
        inst = generate_planted(args.n, args.M, args.k, args.target_eps, args.seed, args.max_tries)
    except ExhaustiveLimitError as exc:
        return _config_error(str(exc))
    except (GenerationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_FOUND
    cnf_path, json_path = inst.write(args.out)
    print(json.dumps({"cnf": str(cnf_path), "sidecar": str(json_path), "true_bias": str(inst.true_bias)}))
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import load_instance, planted_instances, rows_to_csv, run_bench

    drivers = [d.strip() for d in args.drivers.split(",") if d.strip()]
    bad = [d for d in drivers if d not in DRIVERS]
    if bad:
        return _config_error(f"unknown drivers {bad}")
    try:
        instances = [load_instance(p) for p in args.inputs]
        if args.planted:
            instances += planted_instances(args.planted, args.planted_n, args.planted_M, args.planted_k,
                                           seed=args.seed)
    except (DimacsError, OSError, ValueError) as exc:
        return _config_error(str(exc))
    if not instances:
        return _config_error("no instances (give DIMACS files or --planted N)")
    rows = run_bench(instances, drivers, _options(args, "auto"), args.eps, args.jobs)
    text = rows_to_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_params(args) -> int:
    kw = {} if args.p is None else {"p": args.p}
    try:
        ps = compute_parameters(args.M, args.n, args.eps, args.C, args.mode, **kw)
    except ValueError as exc:
        return _config_error(str(exc))
    rep = verify_proposition(ps)
    cost = cost_model(ps)
    doc = {
        "parameters": json.loads(ps.to_json()),
        "proposition": {"ineq1": rep.ineq1, "ineq2": rep.ineq2, "eta_check": rep.eta_check,
                        "ineq1_lhs_log2": rep.ineq1_lhs_log2, "ineq1_rhs_log2": rep.ineq1_rhs_log2,
                        "ineq2_lhs": str(rep.ineq2_lhs), "ineq2_rhs": str(rep.ineq2_rhs)},
        "cost_log2": {"r_sl": cost.r_sl, "r_prg": cost.r_prg, "t_count": cost.log2_t_count,
                      "stages": cost.log2_stages, "total": cost.log2_total},
    }
    print(json.dumps(doc, indent=2, default=str))
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "verify": cmd_verify, "gen": cmd_gen, "bench": cmd_bench, "params": cmd_params}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:   # usage errors (3) and --help (0), as a return value
        return exc.code
    if getattr(args, "max_exhaustive", None) is not None:
        # subprocess-style override so every layer (including bench workers) sees it
        os.environ["DERAND_MAX_EXHAUSTIVE"] = str(args.max_exhaustive)
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
