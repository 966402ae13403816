"""Command line interface.

Exit codes: 0 ok, 1 violation or infeasible result, 2 usage or input
error, 3 oracle refusal.
"""

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from . import exponents, harness
from .dksh import BASES, approx_dksh, make_config
from .hypercore import (
    Hypergraph,
    InstanceError,
    SukpInstance,
    WeightedHypergraph,
    dumps_instance,
    make_solution,
    read_instance,
)
from .oracles import GenSpec, OracleRefusal, SpecError, exact_dksh, exact_sukp, generate
from .sukp import SukpConfig, approx_sukp

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_REFUSAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj) + "\n")


def _load(path, kinds):
    inst = read_instance(path)
    if not isinstance(inst, kinds):
        raise UsageError(f"{path}: expected {' or '.join(k.__name__ for k in kinds)}, got {type(inst).__name__}")
    return inst


def cmd_solve(args) -> int:
    if args.problem == "dksh":
        g = _load(args.input, (Hypergraph,))
        if args.k is None:
            raise UsageError("solve dksh needs --k")
        m = args.m or g.m_cap
        cfg = make_config(args.epsilon, args.exact_cutoff, args.base, args.seed)
        sol = approx_dksh(g, args.k, m, cfg)
        chk = make_solution(g, sol.vertices)
        ok = len(chk.vertices) <= args.k and chk.value == sol.value
    else:
        inst = _load(args.input, (SukpInstance,))
        cfg = SukpConfig(args.epsilon, args.exact_cutoff, seed=args.seed, trace=args.trace)
        sol = approx_sukp(inst, cfg)
        chk = make_solution(inst, sol.vertices)
        ok = chk.cost <= inst.budget and chk.value == sol.value
        if args.trace:
            for row in sol.info.get("trace", []):
                _emit(row)
    _emit(sol.to_json())
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_exact(args) -> int:
    if args.problem == "dksh":
        g = _load(args.input, (Hypergraph, WeightedHypergraph))
        if args.k is None:
            raise UsageError("exact dksh needs --k")
        sol = exact_dksh(g, args.k, args.budget)
    else:
        sol = exact_sukp(_load(args.input, (SukpInstance,)))
    _emit(sol.to_json())
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        doc = json.loads(Path(args.spec).read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.spec}: line {exc.lineno}: {exc.msg}") from None
    if args.seed is not None and "seed" not in doc:
        doc["seed"] = args.seed
    inst = generate(GenSpec.from_dict(doc))
    text = dumps_instance(inst)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = harness.CHECKS if "all" in args.check else args.check
    bounds = {}
    for item in args.bound or []:
        key, _, val = item.partition("=")
        if not val:
            raise UsageError(f"--bound expects key=value, got {item!r}")
        bounds[key] = int(val)
    reports = [harness.verify(c, args.trials, args.seed or 0, bounds) for c in checks]
    lines = [r.to_json() for r in reports]
    if args.json:
        text = "".join(json.dumps(x) + "\n" for x in lines)
    else:
        text = "".join(
            f"{'PASS' if r.passed else 'FAIL'} {r.check}: trials={r.trials} violations={r.violations} "
            f"worst={r.to_json()['worst_ratio']} ({r.bound})\n"
            for r in reports
        )
    if args.out:
        Path(args.out).write_text("".join(json.dumps(x) + "\n" for x in lines))
    if not args.quiet or args.json:
        sys.stdout.write(text)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VIOLATION


def cmd_bench(args) -> int:
    family = json.loads(Path(args.family).read_text())
    rep = harness.bench(family, timing=args.timing, exact_max_n=args.exact_max_n)
    if args.out:
        Path(args.out + ".jsonl").write_text(rep.to_jsonl())
        Path(args.out + ".txt").write_text(rep.to_table())
    sys.stdout.write(rep.to_jsonl() if args.json else rep.to_table())
    bad = any(
        r["exact"] is not None and Fraction(r["approx"]) > Fraction(r["exact"]) for r in rep.rows
    )
    return EXIT_VIOLATION if bad else EXIT_OK


def cmd_exponents(args) -> int:
    rows = exponents.exponent_table(args.m_max)
    if args.json:
        for r in rows:
            _emit({"m": r.m, "theta": str(r.theta), "alpha": str(r.alpha),
                   "gamma": None if r.gamma is None else str(r.gamma)})
    else:
        sys.stdout.write(f"{'m':>3} {'theta':>10} {'alpha':>10} {'gamma':>10}\n")
        for r in rows:
            sys.stdout.write(f"{r.m:>3} {str(r.theta):>10} {str(r.alpha):>10} {str(r.gamma or '-'):>10}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="hypersukp", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--json", action="store_true", default=False)
    p.add_argument("--quiet", action="store_true", default=False)
    sub = p.add_subparsers(dest="cmd", required=True)

    solve = sub.add_parser("solve", parents=[common], help="run an approximation algorithm")
    solve.add_argument("problem", choices=["dksh", "sukp"])
    solve.add_argument("--input", required=True)
    solve.add_argument("--k", type=int)
    solve.add_argument("--m", type=int)
    solve.add_argument("--epsilon", type=_fraction, default=Fraction(1, 10))
    solve.add_argument("--base", choices=sorted(BASES), default="auto")
    solve.add_argument("--exact-cutoff", type=int, default=0)
    solve.add_argument("--trace", action="store_true")
    solve.set_defaults(func=cmd_solve)

    exact = sub.add_parser("exact", parents=[common], help="brute-force optimum")
    exact.add_argument("problem", choices=["dksh", "sukp"])
    exact.add_argument("--input", required=True)
    exact.add_argument("--k", type=int)
    exact.add_argument("--budget", type=int, default=10**7, help="enumeration budget")
    exact.set_defaults(func=cmd_exact)

    gen = sub.add_parser("gen", parents=[common], help="generate an instance from a JSON spec")
    gen.add_argument("--spec", required=True)
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_gen)

    ver = sub.add_parser("verify", parents=[common], help="check lemma inequalities against oracles")
    ver.add_argument("--check", action="append", choices=list(harness.CHECKS) + ["all"], required=True)
    ver.add_argument("--trials", type=int, default=100)
    ver.add_argument("--bound", action="append", help="size bound, e.g. n_max=10")
    ver.add_argument("--out")
    ver.set_defaults(func=cmd_verify)

    bench = sub.add_parser("bench", parents=[common], help="measure ratios on a generated family")
    bench.add_argument("--family", required=True)
    bench.add_argument("--out", help="write OUT.jsonl and OUT.txt")
    bench.add_argument("--timing", action="store_true", help="add wall-clock column (not reproducible)")
    bench.add_argument("--exact-max-n", type=int, default=14)
    bench.set_defaults(func=cmd_bench)

    ex = sub.add_parser("exponents", parents=[common], help="print the exponent table")
    ex.add_argument("--m-max", type=int, default=6)
    ex.set_defaults(func=cmd_exponents)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except OracleRefusal as exc:
        print(f"oracle refused: {exc}", file=sys.stderr)
        return EXIT_REFUSAL
    except harness.ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_REFUSAL
    except (UsageError, InstanceError, SpecError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
