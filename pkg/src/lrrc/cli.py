"""Command-line front end.

Machine-readable output goes to ``--output``, else to ``$LRRC_OUTPUT_DIR``
(one file per subcommand), else to stdout.  A short human summary goes to
stderr.  Exit codes: 0 ok, 1 usage, 2 budget exceeded, 3 invariant violated.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from collections import Counter
from fractions import Fraction
from itertools import combinations
from pathlib import Path

from . import adversary, ca_code, families, indifference
from .errors import BudgetError, InvariantViolation, SearchExhausted
from .params import SystemParams, bhs_coefficients, bhs_mbr_point, tradeoff_curve
from .policies import (
    CA_ARTIFICIAL_PARENTS,
    CliqueAvoidingPolicy,
    MfhsPolicy,
    RandomDynamicPolicy,
    all_shs_tables,
    mfhs_build,
    random_shs_table,
)

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_INVARIANT = 0, 1, 2, 3
ENV_OUTPUT_DIR = "LRRC_OUTPUT_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def q(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def fraction_arg(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {text!r}")
    return value


def range_arg(text: str) -> range:
    """``a:b`` (inclusive) or a single integer."""
    try:
        lo, _, hi = text.partition(":")
        lo = int(lo)
        hi = int(hi) if hi else lo
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a range: {text!r}")
    return range(lo, hi + 1)


def _emit(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text)
    elif os.environ.get(ENV_OUTPUT_DIR):
        out = Path(os.environ[ENV_OUTPUT_DIR])
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.command}.{_ext(args)}").write_text(text)
    else:
        sys.stdout.write(text)


def _ext(args) -> str:
    return getattr(args, "format", None) or "txt"


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _params(args, **point) -> SystemParams:
    return SystemParams(args.n, args.k, args.d, args.r, **point)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


# -- subcommands --------------------------------------------------------------


def cmd_check(args) -> int:
    c = indifference.classify(args.n, args.k, args.d, args.r)
    text = indifference.to_csv([c]) if args.format == "csv" else _json(c.row())
    _emit(args, text)
    _say(f"({args.n},{args.k},{args.d},{args.r}): {c.verdict.value} [{c.rule}]")
    return EXIT_OK


def cmd_scan(args) -> int:
    rows = indifference.scan(args.n_range, args.k_range, args.d_range, args.r_range)
    text = indifference.to_csv(rows) if args.format == "csv" else indifference.to_json(rows)
    _emit(args, text)
    counts = Counter(c.verdict.value for c in rows)
    _say(f"{len(rows)} tuples: " + ", ".join(f"{v}={counts[v]}" for v in sorted(counts)))
    und = sorted(indifference.undecided(rows))
    if und:
        _say("undecided: " + " ".join(map(str, und)))
    return EXIT_OK


def _scheme_coeffs(args) -> list:
    if args.scheme == "bhs":
        return [bhs_coefficients(args.k, args.d)]
    if args.scheme == "ca":
        if (args.n, args.d, args.r) != (5, 2, 1) or args.k not in (3, 4):
            raise UsageError("the clique-avoiding scheme exists for (5,3,2,1) and (5,4,2,1) only")
        return [ca_code.CA_CUT_COEFFS]
    profiles = families.y_profiles(args.n, args.k, args.d, args.r, args.cap)
    return sorted({tuple(max(args.d - y, 0) for y in prof) for prof in profiles})


def cmd_tradeoff(args) -> int:
    _params(args)
    M = args.file_size
    curve = tradeoff_curve(_scheme_coeffs(args), M, args.steps)
    points = [(a, b, a / M, args.d * b / M) for a, b in curve]
    if args.format == "json":
        text = _json([
            {"alpha": q(a), "beta": q(b), "alpha_over_M": q(na), "dbeta_over_M": q(nb)}
            for a, b, na, nb in points
        ])
    else:
        header = [f"{c}_{p}" for c in ("alpha", "beta", "alpha_over_M", "dbeta_over_M")
                  for p in ("num", "den")]
        text = _csv(header, [[v for x in pt for v in (x.numerator, x.denominator)] for pt in points])
    _emit(args, text)
    corners = sorted({(p[2], p[3]) for p in (points[0], points[-1])})
    _say(f"{args.scheme} curve, {len(points)} points; normalized corners "
         + ", ".join(f"({q(a)}, {q(b)})" for a, b in corners))
    return EXIT_OK


def cmd_mbr(args) -> int:
    p = _params(args, file_size=args.file_size)
    alpha, beta = bhs_mbr_point(p) if args.scheme == "bhs" else families.mfhs_mbr_point(p)
    row = {"scheme": args.scheme, "alpha": q(alpha), "beta": q(beta)}
    if args.format == "csv":
        text = _csv(["scheme", "alpha_num", "alpha_den", "beta_num", "beta_den"],
                    [[args.scheme, alpha.numerator, alpha.denominator, beta.numerator, beta.denominator]])
    else:
        text = _json(row)
    _emit(args, text)
    _say(f"{args.scheme} MBR point: alpha={alpha}, beta={beta}")
    return EXIT_OK


def cmd_simulate_ca(args) -> int:
    log = []

    def record(state, failed, U):
        log.append(state.graph.history[-1].line())

    state = ca_code.simulate(args.steps, args.seed, args.adversarial_u, args.k, on_step=record)
    triples = [t for t in _triples() if _decodes(state, t)]
    result = {
        "steps": args.steps,
        "seed": args.seed,
        "adversarial_u": args.adversarial_u,
        "state": state.dump().splitlines(),
        "reconstructing_triples": len(triples),
        "actual_k": ca_code.actual_k_star(ca_code.state_packets(state), ca_code.DIM),
        "log": log if args.log else [],
    }
    _emit(args, _json(result))
    _say(f"{args.steps} repairs audited; {len(triples)}/10 triples reconstruct")
    return EXIT_OK


def _triples():
    return list(combinations(ca_code.NODES, 3))


def _decodes(state, nodes) -> bool:
    try:
        ca_code.ca_reconstruct(state, nodes)
    except InvariantViolation:
        return False
    return True


def cmd_search_shs(args) -> int:
    rng = random.Random(args.seed)
    cases: Counter = Counter()
    cuts: Counter = Counter()
    if args.exhaustive:
        tables = all_shs_tables(5, 2, 1)
        budget = args.limit
    else:
        tables = (random_shs_table(5, 2, 1, rng) for _ in range(args.samples))
        budget = None
    count = 0
    for table in tables:
        if budget is not None and count >= budget:
            raise BudgetError(f"exhaustive enumeration stopped at --limit {budget}")
        w = adversary.shs_break_search(table, args.k, args.alpha, args.beta)
        cases[w.note] += 1
        cuts[q(w.cut)] += 1
        count += 1
    result = {"tables": count, "found": count, "cases": dict(cases), "cuts": dict(cuts),
              "seed": args.seed, "k": args.k}
    _emit(args, _json(result))
    _say(f"{count} tables, witness found for all; cuts {dict(cuts)}")
    return EXIT_OK


def _policy(args, params):
    if args.policy == "ca":
        return CliqueAvoidingPolicy(CA_ARTIFICIAL_PARENTS)
    if args.policy == "mfhs":
        return MfhsPolicy(mfhs_build(params.n, params.d, params.r))
    return RandomDynamicPolicy(args.seed)


def cmd_witness(args) -> int:
    p = _params(args, alpha=args.alpha, beta=args.beta)
    if args.kind == "mset":
        w = adversary.build_m_set_witness(p, _policy(args, p))
    elif args.kind == "tree":
        w = adversary.tree_witness(_policy(args, p), p, args.m or args.k)
    elif args.kind == "newest":
        w = adversary.dhs_newest_node_bound(_policy(args, p), p)
    else:
        pi = tuple(args.pi) if args.pi else families.minimizing_permutation(p, args.cap)
        w = adversary.fhs_upper_witness(p, pi)
    if args.format == "json":
        text = _json({
            "kind": w.kind, "params": list(p.tuple), "alpha": q(w.alpha), "beta": q(w.beta),
            "nodes": list(w.nodes), "collector": list(w.collector), "cut": q(w.cut),
            "note": w.note, "log": [r.line() for r in w.records],
        })
    else:
        text = w.dumps()
    _emit(args, text)
    _say(f"{w.kind} witness on nodes {w.nodes}: cut {w.cut} after {len(w.records)} repairs")
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def _add_params(sp, defaults=(5, 3, 2, 1)):
    n, k, d, r = defaults
    sp.add_argument("-n", type=int, default=n)
    sp.add_argument("-k", type=int, default=k)
    sp.add_argument("-d", type=int, default=d)
    sp.add_argument("-r", type=int, default=r)


def _add_output(sp, formats=("json", "csv"), default="json"):
    sp.add_argument("--output", "-o", help="output file (default: $%s or stdout)" % ENV_OUTPUT_DIR)
    sp.add_argument("--format", choices=formats, default=default)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lrrc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("check", help="classify one (n,k,d,r) tuple")
    for name in ("n", "k", "d", "r"):
        sp.add_argument(name, type=int)
    _add_output(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("scan", help="classify every tuple in a range")
    sp.add_argument("--n", dest="n_range", type=range_arg, default=range(2, 31))
    sp.add_argument("--k", dest="k_range", type=range_arg, default=range(1, 30))
    sp.add_argument("--d", dest="d_range", type=range_arg, default=range(1, 6))
    sp.add_argument("--r", dest="r_range", type=range_arg, default=range(0, 2))
    _add_output(sp, default="csv")
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("tradeoff", help="storage/bandwidth curve between MSR and MBR")
    sp.add_argument("--scheme", choices=("bhs", "mfhs", "ca"), default="bhs")
    _add_params(sp)
    sp.add_argument("-M", "--file-size", type=fraction_arg, default=Fraction(1))
    sp.add_argument("--steps", type=int, default=12)
    sp.add_argument("--cap", type=int, default=families.DEFAULT_CAP)
    _add_output(sp, default="csv")
    sp.set_defaults(func=cmd_tradeoff)

    sp = sub.add_parser("mbr", help="minimum-bandwidth point")
    sp.add_argument("--scheme", choices=("bhs", "mfhs"), default="bhs")
    _add_params(sp)
    sp.add_argument("-M", "--file-size", type=fraction_arg, default=Fraction(1))
    _add_output(sp)
    sp.set_defaults(func=cmd_mbr)

    sp = sub.add_parser("simulate-ca", help="run the explicit binary code under random failures")
    sp.add_argument("--steps", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--adversarial-u", action="store_true")
    sp.add_argument("-k", type=int, choices=(3, 4), default=3)
    sp.add_argument("--log", action="store_true", help="include the repair log")
    _add_output(sp, formats=("json",))
    sp.set_defaults(func=cmd_simulate_ca)

    sp = sub.add_parser("search-shs", help="break stationary tables on (5,k,2,1)")
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-k", type=int, choices=(3, 4), default=3)
    sp.add_argument("--alpha", type=fraction_arg, default=Fraction(2))
    sp.add_argument("--beta", type=fraction_arg, default=Fraction(1))
    sp.add_argument("--exhaustive", action="store_true", help="walk every table in order")
    sp.add_argument("--limit", type=int, default=100_000,
                    help="tables allowed in exhaustive mode before giving up")
    _add_output(sp, formats=("json",))
    sp.set_defaults(func=cmd_search_shs)

    sp = sub.add_parser("witness", help="build a converse witness graph")
    sp.add_argument("--kind", choices=("mset", "tree", "fhs", "newest"), required=True)
    _add_params(sp)
    sp.add_argument("--alpha", type=fraction_arg, default=Fraction(2))
    sp.add_argument("--beta", type=fraction_arg, default=Fraction(1))
    sp.add_argument("--policy", choices=("random", "ca", "mfhs"), default="random")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--m", type=int, choices=(3, 4), help="tree size (default k)")
    sp.add_argument("--pi", type=int, nargs="+", help="family index permutation for --kind fhs")
    sp.add_argument("--cap", type=int, default=families.DEFAULT_CAP)
    _add_output(sp, formats=("json", "text"))
    sp.set_defaults(func=cmd_witness)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetError as exc:
        _say(f"budget exceeded: {exc}")
        return EXIT_BUDGET
    except (InvariantViolation, SearchExhausted) as exc:
        _say(f"invariant violated: {exc}")
        return EXIT_INVARIANT
    except (UsageError, ValueError) as exc:
        _say(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
