"""Command-line front end: ``mvcanal <subcommand> ...``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence

from . import counting, dataset
from .booleanize import VanHamCodec, booleanize_function, is_nc_partial
from .canalization import generate_nc, generate_snc, is_nc, is_snc, is_wnc
from .domain import MultivaluedFunction, ResourceLimitError

EXIT_OK = 0
EXIT_FAIL = 2
EXIT_INPUT = 3

COUNTEREXAMPLE = ((3, 3), 3, (2, 0, 0, 1, 1, 1, 2, 0, 2))


class InputError(Exception):
    pass


def _int_list(text: str) -> tuple[int, ...]:
    try:
        out = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _read_table(path: str) -> MultivaluedFunction:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
        return MultivaluedFunction.from_json(text)
    except (OSError, ValueError, TypeError, IndexError) as e:
        raise InputError(f"{path}: {e}")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _witness(w) -> object:
    if w is None:
        return None
    if isinstance(w, tuple) and w and dataclasses.is_dataclass(w[0]):
        return [dataclasses.asdict(s) for s in w]
    return dataclasses.asdict(w)


def _yn(flag: bool) -> str:
    return "yes" if flag else "no"


# ---------------------------------------------------------------------------
# subcommands


def cmd_analyze(args) -> int:
    paths = list(args.models)
    if args.fixtures:
        paths += dataset.fixture_paths()
    if not paths:
        print("error: no model files given (pass paths or --fixtures)", file=sys.stderr)
        return EXIT_INPUT
    census = dataset.run_census(paths, priority=args.priority, threads=args.threads)
    _emit(dataset.render(census, args.format), args.out)
    for p, why in census.skipped:
        print(f"skipped {p}: {why}", file=sys.stderr)
    for r, e in census.mismatches():
        print(f"mismatch {r.model}/{r.gene}: computed {r.situation}, published {e.situation}", file=sys.stderr)
        print(f"  table {r.function.to_json()} regulators {list(r.regulators)}", file=sys.stderr)
    return census.exit_code()


def cmd_check(args) -> int:
    f = _read_table(args.table)
    props = [p.strip() for p in args.props.split(",") if p.strip()]
    unknown = set(props) - {"nc", "snc", "wnc", "boolnc"}
    if unknown:
        raise InputError(f"unknown properties: {sorted(unknown)}")
    result: dict = {}
    for p in props:
        if p == "nc":
            w = is_nc(f) if all(k >= 2 for k in f.arities) else None
        elif p == "snc":
            w = is_snc(f)
        elif p == "wnc":
            w = is_wnc(f)
        else:
            comps = {a: is_nc_partial(g) for a, g in booleanize_function(f).items()}
            result["boolnc"] = {"value": all(w is not None for w in comps.values()),
                                "components": {str(a): _witness(w) for a, w in comps.items()}}
            continue
        result[p] = {"value": w is not None, "witness": _witness(w)}
    if args.format == "json":
        _emit(json.dumps(result, indent=2) + "\n", args.out)
    else:
        _emit("".join(f"{p}={_yn(r['value'])}\n" for p, r in result.items()), args.out)
    return EXIT_OK


def cmd_booleanize(args) -> int:
    f = _read_table(args.table)
    codec = VanHamCodec(f.domain)
    comps = []
    for a, g in booleanize_function(f).items():
        d = g.to_dict()
        d["threshold"] = a
        comps.append(d)
    labels = [list(codec.bit_label(p)) for p in range(codec.k)]
    _emit(json.dumps({"bits": labels, "components": comps}, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_count(args) -> int:
    if args.generalized is False and args.arities and any(k > 3 for k in args.arities):
        raise InputError("arities above 3 need --generalized")
    if args.arities:
        if args.method == "enumerate":
            cap = sys.maxsize if args.force else args.max_decompositions
            value = counting.up_snc_by_enumeration(args.arities, args.generalized,
                                                   max_count=cap, threads=args.threads)
        else:
            value = counting.up_snc(args.arities, args.generalized)
        total = 3 ** math.prod(args.arities)
        ratio = Fraction(value, total)
        data = {"arities": list(args.arities), "up_snc": str(value), "total": str(total),
                "ratio": f"{ratio.numerator}/{ratio.denominator}"}
        text = (f"upSNC{list(args.arities)} = {value}\n"
                f"ratio = {ratio.numerator}/{ratio.denominator}\n"
                f"      ~ {counting.format_scientific(ratio, 3)}\n")
    else:
        n = args.nbvars
        if n > 6 and not args.force:
            raise ResourceLimitError(f"n={n} builds numbers with over 10^3 digits; pass --force")
        ratio = counting.up_prop_snc_by_nbvars(n)
        shown = counting.presentation(ratio)
        if shown == 1:
            bound = "1"
        elif shown >= Fraction(1, 100):
            bound = counting.format_fixed(shown, 2, upward=True)
        else:
            bound = counting.format_scientific(shown, 2, upward=True)
        data = {"nbvars": n, "ratio": f"{ratio.numerator}/{ratio.denominator}", "presentation": bound}
        text = (f"n = {n}\n"
                f"ratio = {ratio.numerator}/{ratio.denominator}\n"
                f"      ~ {counting.format_scientific(ratio, 3)}\n"
                f"bound = {data['presentation']}\n")
    _emit(json.dumps(data, indent=2) + "\n" if args.format == "json" else text, args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    from .oracle import sweep

    domains = args.arities or [(2, 2), (3, 3), (2, 2, 2)]
    bad = 0
    lines = []
    for ar in domains:
        if math.prod(ar) > args.max_domain:
            lines.append(f"{ar}: skipped (domain larger than {args.max_domain})")
            continue
        props = ("nc", "snc", "wnc") if all(k >= 2 for k in ar) else ("snc", "wnc")
        r = sweep(ar, args.codomain, props, max_domain=args.max_domain, workers=args.threads)
        bad += len(r["disagreements"])
        lines.append(f"{ar}: {r['functions']} functions, {len(r['disagreements'])} disagreements")
        for code, prop, fast, slow in r["disagreements"][:10]:
            lines.append(f"  function #{code} {prop}: fast={fast} oracle={slow}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_FAIL if bad else EXIT_OK


# ---------------------------------------------------------------------------
# selftest


def _counterexample() -> MultivaluedFunction:
    ar, m, vals = COUNTEREXAMPLE
    return MultivaluedFunction(ar, m, vals)


def _golden_checks() -> list[tuple[str, Callable[[], bool]]]:
    def ce():
        f = _counterexample()
        return is_wnc(f) is not None and is_snc(f) is None and is_nc(f) is None

    def ce_bool():
        g = booleanize_function(_counterexample())
        return is_nc_partial(g[1]) is not None and is_nc_partial(g[2]) is None

    def constants():
        return all(is_snc(MultivaluedFunction.constant((3, 3), 3, c)) is not None for c in range(3))

    def minmax():
        fs = [MultivaluedFunction.from_callable((3, 3), 3, op) for op in (min, max)]
        return all(is_snc(f) is not None and is_nc(f) is None for f in fs)

    def theoretical_proportions():
        got = [counting.up_prop_snc_by_nbvars(n) for n in (1, 2, 3, 5)]
        return (counting.presentation(got[0]) == 1
                and abs(float(got[1]) - 0.83) <= 0.005
                and abs(float(got[2]) / 8.5e-7 - 1) <= 0.05
                and abs(got[3] / Fraction(56, 10**105) - 1) <= Fraction(5, 100))

    return [
        ("counterexample is WNC, not SNC, not NC", ce),
        ("counterexample Booleanization: f1 NC, f2 not NC", ce_bool),
        ("constants are SNC", constants),
        ("min and max on (3,3) are SNC, not NC", minmax),
        ("theoretical SNC proportions", theoretical_proportions),
    ]


def cmd_selftest(args) -> int:
    rng = random.Random(args.seed)
    checks = _golden_checks()

    def generated():
        for _ in range(200):
            ar = tuple(rng.choice((2, 3)) for _ in range(rng.randint(1, 3)))
            f, _ = generate_nc(ar, 3, rng)
            if is_snc(f) is None:
                return False
            g, w = generate_snc(ar, 3, rng)
            if any(is_nc_partial(c) is None for c in booleanize_function(g).values()):
                return False
        return True

    census = dataset.run_census(threads=args.threads)
    checks += [
        ("NC samples are SNC; SNC samples Booleanize to NC", generated),
        ("fixture classifications match the published tables", lambda: not census.mismatches()),
        ("situation totals 13/17/12/6", lambda: census.totals == dataset.EXPECTED_TOTALS),
        ("SNC proportions of the data set by n", lambda: census.buckets == dataset.EXPECTED_SNC_BY_N),
        ("no WNC-but-not-SNC fixtures", lambda: not census.anomalies),
    ]
    failed = 0
    width = max(len(name) for name, _ in checks)
    for name, fn in checks:
        ok = bool(fn())
        failed += not ok
        print(f"{name:<{width}}  {'PASS' if ok else 'FAIL'}")
    for r, e in census.mismatches():
        print(f"  {r.model}/{r.gene}: computed {r.situation}, published {e.situation}")
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors are input errors; exit status 2 is reserved for failed checks
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mvcanal", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    threads = max(1, os.cpu_count() or 1)

    a = sub.add_parser("analyze", help="classify every multivalued gene of rule models")
    a.add_argument("models", nargs="*", help=".mvr model files")
    a.add_argument("--fixtures", action="store_true", help="also analyze the bundled fixture models")
    a.add_argument("--priority", choices=("highest", "error"), default="highest",
                   help="what to do when two levels match one state (default: highest wins)")
    a.add_argument("--format", choices=("csv", "md", "json"), default="csv")
    a.add_argument("--out")
    a.add_argument("--threads", type=int, default=threads)
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("check", help="canalization properties of one truth table")
    c.add_argument("table", help="truth-table JSON file, or - for stdin")
    c.add_argument("--props", default="nc,snc,wnc,boolnc")
    c.add_argument("--format", choices=("text", "json"), default="text")
    c.add_argument("--out")
    c.set_defaults(func=cmd_check)

    b = sub.add_parser("booleanize", help="Van Ham Booleanization of one truth table")
    b.add_argument("table", help="truth-table JSON file, or - for stdin")
    b.add_argument("--out")
    b.set_defaults(func=cmd_booleanize)

    n = sub.add_parser("count-snc", help="upper bound on the number of SNC functions")
    g = n.add_mutually_exclusive_group(required=True)
    g.add_argument("--arities", type=_int_list)
    g.add_argument("--nbvars", type=int)
    n.add_argument("--generalized", action="store_true", help="per-entry weight m+1, allows arities > 3")
    n.add_argument("--method", choices=("dp", "enumerate"), default="dp")
    n.add_argument("--max-decompositions", type=int, default=counting.DEFAULT_MAX_DECOMPOSITIONS)
    n.add_argument("--force", action="store_true", help="lift the size guards")
    n.add_argument("--format", choices=("text", "json"), default="text")
    n.add_argument("--threads", type=int, default=threads)
    n.add_argument("--out")
    n.set_defaults(func=cmd_count)

    o = sub.add_parser("oracle", help="compare fast checkers with brute-force oracles")
    o.add_argument("--arities", type=_int_list, action="append")
    o.add_argument("--codomain", type=int, default=3)
    o.add_argument("--max-domain", type=int, default=512)
    o.add_argument("--threads", type=int, default=threads)
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle)

    s = sub.add_parser("selftest", help="run the published examples and print a pass/fail table")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--threads", type=int, default=1)
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "nbvars", None) is not None and args.nbvars < 1:
        print("error: --nbvars must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimitError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
