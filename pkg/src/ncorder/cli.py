"""Command-line frontend.

Exit codes: 0 success, 1 a verification or property failed, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from typing import Optional, Sequence

from . import matrep
from .exprparse import Environment, ParseError, evaluate_expr
from .gotcore import Decomposition, OrderingPair, got_verify
from .ncalg import GradedSeries, NCPoly, exp_truncated, format_poly, gen, log_truncated, poly_to_dict
from .ordering import apply_monomial, apply_monomial_poly, parse_rule
from .properties import run_suite
from .series import (
    BchConfig,
    MagnusConfig,
    X,
    Y,
    bch_classical_w,
    bch_log_oracle,
    bch_recursion,
    dyson_discrete,
    magnus_got,
    magnus_log_oracle,
    magnus_third_order,
    product_exp_series,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def default_seed() -> int:
    raw = os.environ.get("NCORDER_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"NCORDER_SEED must be an integer, got {raw!r}") from None


def _emit(args, text_lines: list, doc: dict) -> None:
    if args.format == "json":
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


# expression commands -------------------------------------------------------

def _environment(args) -> Environment:
    env = Environment()
    for decl in args.declare or []:
        name, sep, rule = decl.partition("=")
        if not sep or not name:
            raise UsageError(f"--declare expects NAME=RULE, got {decl!r}")
        env.declare(name.strip(), rule)
    return env


def cmd_eval(args) -> int:
    p = evaluate_expr(args.expr, _environment(args))
    _emit(args, [format_poly(p)], {"result": poly_to_dict(p), "text": format_poly(p)})
    return EXIT_OK


def cmd_order(args) -> int:
    rule = parse_rule(args.rule)
    p = apply_monomial_poly(rule, evaluate_expr(args.expr, _environment(args)))
    _emit(args, [format_poly(p)], {"rule": rule.name, "result": poly_to_dict(p), "text": format_poly(p)})
    return EXIT_OK


# GOT verification -----------------------------------------------------------

def omega_generator(label: str, prefix: str = "x"):
    label = label.strip()
    if not label:
        raise UsageError("empty index label")
    return gen(label) if label[0].isalpha() else gen(prefix + label)


def load_decomposition(path: str, omega: set) -> Decomposition:
    """Rows are Omega labels, columns Omega' labels, entries rational strings."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
        if not isinstance(doc, dict):
            raise ValueError("top level must be an object of rows")
        rows = {}
        for a, row in doc.items():
            if not isinstance(row, dict):
                raise ValueError(f"row {a!r} must be an object")
            rows[omega_generator(a)] = {omega_generator(k, "v"): Fraction(str(v)) for k, v in row.items()}
        d = Decomposition(rows)
    except (OSError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad decomposition file {path}: {exc}") from None
    clash = set(d.omega_prime) & set(d.omega)
    if clash:
        raise UsageError(f"Omega and Omega' share labels: {sorted(str(g) for g in clash)}")
    missing = omega - set(d.omega)
    if missing:
        raise UsageError(f"decomposition has no row for {sorted(str(g) for g in missing)}")
    return d


def cmd_got_verify(args) -> int:
    word = tuple(omega_generator(x) for x in args.word.split(","))
    pair = OrderingPair(parse_rule(args.o), parse_rule(args.oprime))
    d = load_decomposition(args.L, set(word)) if args.L else None
    t0 = time.perf_counter()
    report = got_verify(pair, d, word)
    elapsed = time.perf_counter() - t0
    ok = report.equal
    doc = report.to_dict()
    doc["seconds"] = elapsed
    lines = [
        f"word: {'*'.join(str(g) for g in word)}",
        f"orderings: O={pair.o.name}  O'={pair.o_prime.name}",
        f"lhs: {format_poly(report.lhs)}",
        f"rhs: {format_poly(report.rhs)}",
        "contractions:",
    ]
    lines += [f"  C[{a},{b}] = {format_poly(p)}" for a, b, p in report.contractions]
    lines.append(f"symbolic: {_verdict(report.equal)}")
    if args.numeric:
        r = matrep.random_representation(
            report.lhs.generators() | report.rhs.generators(), args.dim, args.seed, args.eps
        )
        # left side multiplied out factor by factor, independent of the expansion
        factors = [d.expand(a) if d else NCPoly.word((a,)) for a in apply_monomial(pair.o, word)]
        cmp = matrep.compare(matrep.evaluate_product(factors, r), matrep.evaluate(report.rhs, r), args.tol)
        ok = ok and cmp.passed
        lines.append(f"numeric (d={args.dim}, seed={args.seed}): relative {cmp.relative:.3e} {_verdict(cmp.passed)}")
        doc["numeric"] = {"relative": cmp.relative, "tol": args.tol, "passed": cmp.passed, "dim": args.dim, "seed": args.seed}
    _emit(args, lines, doc)
    return EXIT_OK if ok else EXIT_FAIL


# series commands --------------------------------------------------------------

def _series_doc(s: GradedSeries) -> list:
    return [poly_to_dict(c) for c in s.components]


def _series_lines(label: str, s: GradedSeries) -> list:
    return [f"{label}_{d}: {format_poly(c)}" for d, c in enumerate(s.components) if d > 0]


BCH_METHOD_ALIASES = {"got": "got_recursion", "classical": "classical_w_series", "log": "log_oracle"}


def cmd_bch(args) -> int:
    method = BCH_METHOD_ALIASES[args.method]
    try:
        cfg = BchConfig(args.max_order, method, cap=args.cap)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    n = cfg.max_degree
    checks = []
    lines = []
    doc = {"command": "bch", "method": method, "max_order": n}
    if method == "got_recursion":
        comps = bch_recursion(cfg)
        exponent = log_truncated(comps)
        lines += _series_lines("z", comps)
        doc["components"] = _series_doc(comps)
        if not args.no_check:
            checks.append(("product_exp_series", comps == product_exp_series(n, cfg.cap)))
            checks.append(("bch_log_oracle", exponent == bch_log_oracle(n, cfg.cap)))
    else:
        exponent = bch_classical_w(cfg) if method == "classical_w_series" else bch_log_oracle(n, cfg.cap)
        if not args.no_check:
            checks.append(("product_exp_series", exp_truncated(exponent.total(), n) == product_exp_series(n, cfg.cap)))
            if method != "log_oracle":
                checks.append(("bch_log_oracle", exponent == bch_log_oracle(n, cfg.cap)))
    lines += _series_lines("Z", exponent)
    doc["exponent"] = _series_doc(exponent)
    return _finish(args, lines, doc, checks)


MAGNUS_METHOD_ALIASES = {"got": "got_form", "log": "log_oracle"}


def cmd_magnus(args) -> int:
    method = MAGNUS_METHOD_ALIASES[args.method]
    try:
        cfg = MagnusConfig(args.steps, args.max_order, method, degree_cap=args.cap, step_cap=args.step_cap)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    m, n = cfg.steps, cfg.max_degree
    lines, checks = [], []
    doc = {"command": "magnus", "method": method, "steps": m, "max_order": n}
    dyson = dyson_discrete(m, n, cfg.degree_cap)
    oracle = magnus_log_oracle(m, n, cfg.degree_cap)
    if method == "got_form":
        comps = magnus_got(cfg)
        lines += _series_lines("z", comps)
        doc["components"] = _series_doc(comps)
        if not args.no_check:
            checks.append(("dyson_discrete", comps == dyson))
            checks.append(("magnus_log_oracle", log_truncated(comps) == oracle))
    elif not args.no_check:
        checks.append(("dyson_discrete", exp_truncated(oracle.total(), n) == dyson))
    lines += _series_lines("V", oracle)
    doc["exponent"] = _series_doc(oracle)
    if n >= 3 and not args.no_check:
        third = magnus_third_order(m)
        checks.append(("third_order_cancellation", third["second_line"].is_zero()))
        checks.append(("third_order_first_line", third["first_line"] == dyson[3]))
        checks.append(("third_order_magnus_terms", third["v3"] == oracle[3]))
    return _finish(args, lines, doc, checks)


def _finish(args, lines: list, doc: dict, checks: list) -> int:
    ok = all(passed for _, passed in checks)
    lines = lines + [f"check {name}: {_verdict(passed)}" for name, passed in checks]
    doc["checks"] = [{"name": name, "passed": passed} for name, passed in checks]
    doc["passed"] = ok
    _emit(args, lines, doc)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_numcheck(args) -> int:
    """BCH truncation error at eps and eps/2; the ratio should be about 2^(N+1)."""
    n = args.max_order
    if not 1 <= n <= args.cap:
        raise UsageError(f"max order {n} outside 1..{args.cap}")
    z = bch_log_oracle(n, args.cap).total()
    r = matrep.random_representation([X, Y], args.dim, args.seed, args.eps)
    big = matrep.bch_residual(z, r, X, Y)
    small = matrep.bch_residual(z, r.rescaled(args.eps / 2), X, Y)
    ratio = big / small if small else float("inf")
    nominal = 2 ** (n + 1)
    ok = args.low * nominal <= ratio <= args.high * nominal
    lines = [
        f"residual(eps={args.eps}) = {big:.6e}",
        f"residual(eps={args.eps / 2}) = {small:.6e}",
        f"ratio = {ratio:.3f} (nominal {nominal})",
        f"check scaling: {_verdict(ok)}",
    ]
    doc = {"residuals": [big, small], "ratio": ratio, "nominal": nominal, "passed": ok, "seed": args.seed, "dim": args.dim}
    _emit(args, lines, doc)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_suite(args) -> int:
    t0 = time.perf_counter()
    results = run_suite(args.cases, args.seed, mutant=args.mutant, only=args.only)
    ok = all(r.passed for r in results)
    lines = [
        f"{r.module:10s} {r.name:34s} {r.cases - r.failures:4d}/{r.cases:<4d} {_verdict(r.passed)}" for r in results
    ]
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} properties passed in {time.perf_counter() - t0:.2f}s")
    doc = {
        "seed": args.seed,
        "cases": args.cases,
        "properties": [
            {"module": r.module, "name": r.name, "cases": r.cases, "failures": r.failures, "passed": r.passed}
            for r in results
        ],
        "passed": ok,
    }
    _emit(args, lines, doc)
    return EXIT_OK if ok else EXIT_FAIL


# argument parsing -------------------------------------------------------------

def build_parser(seed: int) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")

    parser = argparse.ArgumentParser(prog="ncorder", description="Operator ordering, BCH and Magnus toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate an expression")
    p.add_argument("--expr", required=True)
    p.add_argument("--declare", action="append", metavar="NAME=RULE", help="declare an ordering name")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("order", parents=[common], help="apply a monomial ordering")
    p.add_argument("--rule", required=True, help="time | antitime | alpha | nxy:X,Y | perm:k1,k2,...")
    p.add_argument("--expr", required=True)
    p.add_argument("--declare", action="append", metavar="NAME=RULE")
    p.set_defaults(func=cmd_order)

    got = sub.add_parser("got", help="ordering theorem tools")
    got_sub = got.add_subparsers(dest="got_command", required=True)
    p = got_sub.add_parser("verify", parents=[common], help="verify O[w] = O'[w'] for a word")
    p.add_argument("--o", required=True)
    p.add_argument("--oprime", required=True)
    p.add_argument("--word", required=True, help="comma-separated index labels, e.g. 1,2,3")
    p.add_argument("--L", help="decomposition JSON file: {row: {column: 'p/q'}}")
    p.add_argument("--numeric", action="store_true", help="also compare in a random matrix representation")
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_got_verify)

    p = sub.add_parser("bch", parents=[common], help="BCH expansion with oracle checks")
    p.add_argument("--max-order", type=int, required=True)
    p.add_argument("--method", choices=sorted(BCH_METHOD_ALIASES), default="got")
    p.add_argument("--cap", type=int, default=8)
    p.add_argument("--no-check", action="store_true")
    p.set_defaults(func=cmd_bch)

    p = sub.add_parser("magnus", parents=[common], help="discrete Magnus expansion with oracle checks")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--max-order", type=int, required=True)
    p.add_argument("--method", choices=sorted(MAGNUS_METHOD_ALIASES), default="got")
    p.add_argument("--cap", type=int, default=5)
    p.add_argument("--step-cap", type=int, default=3)
    p.add_argument("--no-check", action="store_true")
    p.set_defaults(func=cmd_magnus)

    p = sub.add_parser("numcheck", parents=[common], help="numerical BCH truncation scaling")
    p.add_argument("--max-order", type=int, default=6)
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--cap", type=int, default=8)
    p.add_argument("--low", type=float, default=80 / 128, help="lower ratio bound, as a fraction of nominal")
    p.add_argument("--high", type=float, default=200 / 128)
    p.set_defaults(func=cmd_numcheck)

    p = sub.add_parser("suite", parents=[common], help="run every randomized invariant")
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--only", nargs="*", help="restrict to these property or module names")
    p.add_argument("--mutant", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        parser = build_parser(default_seed())
    except UsageError as exc:
        print(f"ncorder: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"ncorder: parse error at {exc.line}:{exc.col}: {exc.message}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ValueError, KeyError) as exc:
        print(f"ncorder: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
