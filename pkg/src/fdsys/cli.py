"""Command-line front end: ``python -m fdsys <command> ...``.

Exit status: 0 on success, 1 when a verification suite fails, 2 on bad
arguments or unreadable graphs, 3 when a computation exceeds its budget.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from typing import Sequence

from . import constructions as C
from .counting import FORMULAS, loopsonly_limits, p0_upper_bound, property_report, sweep_rows, formula_value
from .digraph import is_near_biclique, read_graph, recognize_out_cycle
from .errors import BudgetExceeded, GraphFormatError
from .search import FUNCTION_BUDGET, extremal, kind_name, monte_carlo_stats
from .verify import DEFAULT_MAX_N, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

CONSTRUCTIONS = ("complete", "loopfull-stability", "loopfull-instability", "degree-family",
                 "outcycle", "monotone-outcycle", "halfn", "monotone-halfn", "kmm", "near-biclique", "bm")


class UsageError(Exception):
    pass


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _emit(records: list[dict], fmt: str, out) -> None:
    records = [_jsonable(r) for r in records]
    if fmt == "json":
        for r in records:
            out.write(json.dumps(r, sort_keys=True, ensure_ascii=False) + "\n")
        return
    cols = list(records[0]) if records else []
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in records:
        w.writerow({k: json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v for k, v in r.items()})
    out.write(buf.getvalue())


def _need(args, *names: str) -> None:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command} needs " + ", ".join("--" + m.replace("_", "-") for m in missing))


# -- commands --------------------------------------------------------------

def cmd_extremal(args) -> list[dict]:
    _need(args, "graph", "kind")
    D = read_graph(args.graph)
    q = 2 if args.kind == "s+" else args.q
    if q is None:
        raise UsageError("extremal needs --q")
    kind = kind_name(args.kind, args.strict)
    rep = extremal(D, q, kind, workers=args.workers, budget=args.budget)
    return [{"kind": rep.kind, "D-hash": D.digest(), "q": q, "strict": args.strict or args.kind == "s+",
             "value": rep.value, "witness": rep.witness_fn.to_dict(),
             "witness_state": list(rep.witness_state.coords), "space_size": rep.space_size,
             "method": rep.method}]


def _construct(args) -> tuple[C.ConstructionCertificate, dict]:
    name = args.construction
    if name == "complete":
        _need(args, "n", "q")
        return C.complete_graph_fn(args.n, args.q), {"n": args.n, "q": args.q}
    if name == "kmm":
        _need(args, "m")
        return C.kmm_stability_fn(args.m), {"m": args.m}
    if name == "bm":
        _need(args, "m")
        D = C.bm_graph(args.m)
        w = is_near_biclique(D)
        cert = C.monotone_halfn_fn(D, args.seed) if w is None else C.near_biclique_fn(D, w)
        return cert, {"m": args.m}
    if name == "degree-family":
        _need(args, "t", "delta", "q")
        return C.degree_family(args.t, args.delta, args.q), {"t": args.t, "delta": args.delta, "q": args.q}
    _need(args, "graph")
    D = read_graph(args.graph)
    params = {"graph": args.graph, "D-hash": D.digest()}
    if name == "loopfull-stability":
        _need(args, "q")
        return C.loopfull_stability_fn(D, args.q), params | {"q": args.q}
    if name == "loopfull-instability":
        _need(args, "q")
        return C.loopfull_instability_fn(D, args.q), params | {"q": args.q}
    if name in ("outcycle", "monotone-outcycle"):
        shape = recognize_out_cycle(D)
        if shape is None:
            raise UsageError("graph is not an out-cycle")
        fn = C.outcycle_boolean_fn if name == "outcycle" else C.monotone_outcycle_fn
        return fn(shape), params
    if name == "halfn":
        return C.halfn_stable_fn(D, args.seed), params
    if name == "monotone-halfn":
        return C.monotone_halfn_fn(D, args.seed), params
    if name == "near-biclique":
        w = is_near_biclique(D)
        if w is None:
            raise UsageError("graph is not a non-empty near-biclique")
        return C.near_biclique_fn(D, w), params
    raise UsageError(f"unknown construction {name!r}")


def cmd_construct(args) -> list[dict]:
    if args.construction is None:
        raise UsageError("construct needs a construction name: " + ", ".join(CONSTRUCTIONS))
    cert, params = _construct(args)
    rec = {"construction": args.construction, "params": params, "seed": args.seed}
    rec.update(cert.to_dict())
    rec["check"] = cert.check()
    return [rec]


def cmd_count(args) -> list[dict]:
    _need(args, "formula")
    f = args.formula
    if f == "p0-bound":
        _need(args, "graph", "q")
        D = read_graph(args.graph)
        v = p0_upper_bound(D, args.q)
        return [{"formula": f, "D-hash": D.digest(), "q": args.q, "value": str(v), "float": float(v)}]
    if f == "loopsonly-limits":
        _need(args, "n")
        return [{"formula": f, "n": args.n, **loopsonly_limits(args.n)._asdict()}]
    if f not in FORMULAS:
        raise UsageError(f"unknown formula {f!r}")
    _need(args, "n", "q")
    v = formula_value(f, args.n, args.q, args.t)
    rec = {"formula": f, "n": args.n, "q": args.q, "value": str(v)}
    if args.t is not None:
        rec["t"] = args.t
    return [rec]


def cmd_sample(args) -> list[dict]:
    _need(args, "graph", "q")
    D = read_graph(args.graph)
    samples = 10_000 if args.samples is None else args.samples
    st = monte_carlo_stats(D, args.q, args.strict, samples, args.seed)
    return [{"D-hash": D.digest(), "q": args.q, "strict": args.strict, "seed": args.seed, **st.to_dict()}]


def cmd_sweep(args) -> list[dict]:
    if args.formula is not None:
        _need(args, "n", "q")
        lo = 1 if args.formula == "positive-count" else 2
        rows = sweep_rows(args.formula, range(lo, args.n + 1), range(2, args.q + 1), args.t)
        return [{"formula": args.formula, **r} for r in rows]
    _need(args, "graph", "q")
    D = read_graph(args.graph)
    samples = 10_000 if args.samples is None else args.samples
    rep = property_report(D, range(2, args.q + 1), args.strict, samples, args.seed, args.budget)
    return [{"D-hash": D.digest(), "strict": args.strict, "acyclic": rep["acyclic"], **r} for r in rep["rows"]]


def cmd_verify(args, out) -> int:
    max_n = DEFAULT_MAX_N if args.max_n is None else args.max_n
    results = run_suite(args.suite, max_n)
    if args.format is not None:
        _emit([{"criterion": r.number, "name": r.name, "passed": r.passed, "detail": r.detail,
                "seconds": round(r.seconds, 3)} for r in results], args.format, out)
    else:
        for r in results:
            out.write(r.line() + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# -- parser ----------------------------------------------------------------

def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", help="graph file ('n <count>' header, then 'u v' arcs)")
    common.add_argument("--q", type=int, help="alphabet size")
    common.add_argument("--strict", action="store_true", help="interaction graph exactly D")
    common.add_argument("--kind", choices=("s", "i", "s+"))
    common.add_argument("--formula", help=f"one of {', '.join(FORMULAS + ('p0-bound', 'loopsonly-limits'))}")
    common.add_argument("--n", type=int)
    common.add_argument("--m", type=int)
    common.add_argument("--t", type=int)
    common.add_argument("--delta", type=int)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=_positive)
    common.add_argument("--workers", type=_positive, default=1)
    common.add_argument("--budget", type=_positive, default=FUNCTION_BUDGET)
    common.add_argument("--format", choices=("json", "csv"),
                        help="output format (default json; verify prints one line per criterion)")
    common.add_argument("--suite", default="all", help="'all' or comma-separated criterion numbers")
    common.add_argument("--max-n", dest="max_n", type=_positive,
                        help=f"largest vertex count for exhaustive sweeps (default {DEFAULT_MAX_N})")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="fdsys", description="Exact (in)stability and fixed-point computations for FDSs.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("extremal", parents=[common], help="maximum s or i over a function space")
    c = sub.add_parser("construct", parents=[common], help="build and check an explicit construction")
    c.add_argument("construction", nargs="?", choices=CONSTRUCTIONS)
    sub.add_parser("count", parents=[common], help="evaluate a closed-form count")
    sub.add_parser("sample", parents=[common], help="Monte Carlo fixed-point statistics")
    sub.add_parser("sweep", parents=[common], help="formula table or per-q property report")
    sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    return p


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "verify":
            return cmd_verify(args, out)
        handler = {"extremal": cmd_extremal, "construct": cmd_construct, "count": cmd_count,
                   "sample": cmd_sample, "sweep": cmd_sweep}[args.command]
        _emit(handler(args), args.format or "json", out)
        return EXIT_OK
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, GraphFormatError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
