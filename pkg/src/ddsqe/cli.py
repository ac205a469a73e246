"""Command line: ``ddsqe qe | verify | bench | gen``.

Exit codes: 0 success, 1 bad input (parse error, malformed G),
2 resource cap hit while solving, 3 oracle cap hit while verifying,
4 verification found a counterexample.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .baselines import CapExceeded, dp_resolution_qe, enum_sa_qe, qe_gbl
from .cnf import EcnfFormula, ParseError, emit_dimacs, parse_dimacs, parse_qdimacs
from .dseq import DSequent
from .engine import EngineConfig, run_qe
from .oracle import DEFAULT_CAP, OracleCapExceeded, check_dsequent, first_difference
from .report import ALGOS, run_bench, write_report

SCHEMA = 1


def _read(path):
    return sys.stdin.read() if path == "-" else Path(path).read_text()


def _ints(text):
    return [int(t) for t in text.split(",") if t.strip()]


def cmd_qe(args) -> int:
    try:
        phi = parse_qdimacs(_read(args.input))
    except (ParseError, OSError) as e:
        print(f"{args.input}: {e}", file=sys.stderr)
        return 1
    stats = {"schema": SCHEMA, "algo": args.algo}
    trace = None
    try:
        if args.algo == "dds":
            cfg = EngineConfig(node_cap=args.node_cap, time_cap=args.time_cap,
                               reuse_dseqs=args.reuse_dseqs,
                               conflict_retention=args.conflict_retention,
                               trace=bool(args.trace))
            r = run_qe(phi, cfg)
            trace = r.trace
            stats.update(nodes=r.stats.nodes, resolvents=r.stats.resolvents_added,
                         dsequents=r.stats.dsequents, joins=r.stats.joins)
            if not r.complete:
                print("resource cap reached; result incomplete", file=sys.stderr)
                _write_stats(args, stats, r.wall_ms)
                return 2
        elif args.algo == "dp":
            r = dp_resolution_qe(phi)
            stats.update(nodes=0, resolvents=r.stats["resolvents"], dsequents=0, joins=0)
        elif args.algo == "enumsa":
            r = enum_sa_qe(phi, time_cap=args.time_cap)
            stats.update(nodes=0, resolvents=0, dsequents=0, joins=0, models=r.stats["models"])
        else:
            r = qe_gbl(phi)
            stats.update(nodes=0, resolvents=r.stats["resolvents"], dsequents=0, joins=0)
    except (CapExceeded, OracleCapExceeded) as e:
        print(f"resource cap reached: {e}", file=sys.stderr)
        return 2
    text = emit_dimacs(r.g, [f"{args.algo} result"])
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    _write_stats(args, stats, r.wall_ms)
    if args.trace and trace is not None:
        Path(args.trace).write_text("".join(json.dumps(e, sort_keys=True) + "\n" for e in trace))
    return 0


def _write_stats(args, stats, wall_ms):
    if args.stats_json:
        stats["wallMs"] = round(wall_ms, 3)
        Path(args.stats_json).write_text(json.dumps(stats, sort_keys=True) + "\n")


def cmd_verify(args) -> int:
    try:
        phi = parse_qdimacs(_read(args.input))
        g = parse_dimacs(_read(args.g))
    except (ParseError, OSError) as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 1
    try:
        diff = first_difference(g, phi, cap=args.cap)
    except OracleCapExceeded as e:
        print(f"oracle cap: {e}", file=sys.stderr)
        return 3
    except ValueError as e:
        print(f"bad G: {e}", file=sys.stderr)
        return 1
    if diff is not None:
        point, gv, ev = diff
        pt = " ".join(f"{v}={int(b)}" for v, b in sorted(point.items()))
        print(f"not equivalent at {pt}: G={int(gv)} exists={int(ev)}")
        return 4
    print("equivalent")
    if args.trace:
        return _verify_trace(phi, args.trace, args.cap)
    return 0


def _verify_trace(phi, path, cap):
    """Check every D-sequent event against F plus the traced resolvents."""
    events = [json.loads(line) for line in Path(path).read_text().splitlines() if line.strip()]
    lists = [list(c.lits) for c in phi.clauses]
    lists += [e["lits"] for e in events if e["event"] == "resolvent"]
    full = EcnfFormula.from_lists(lists, phi.quantified, phi.num_vars)
    bad = n = 0
    try:
        for e in events:
            if e["event"] != "dseq":
                continue
            n += 1
            ds = DSequent(e["condition"], e["scope"], e["vars"], e["origin"])
            if not check_dsequent(ds, full, cap):
                bad += 1
                print(f"D-sequent fails: {ds} scope {sorted(ds.scope)}")
    except OracleCapExceeded as e:
        print(f"oracle cap: {e}", file=sys.stderr)
        return 3
    print(f"{n - bad}/{n} D-sequents hold")
    return 4 if bad else 0


def cmd_bench(args) -> int:
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    bad = set(algos) - set(ALGOS)
    if bad:
        print(f"unknown algorithms: {sorted(bad)}", file=sys.stderr)
        return 1
    rows = run_bench(_ints(args.copies), algos, args.timeout, args.reuse_dseqs)
    for r in rows:
        print(f"{r['algo']:7s} k={r['k']:<4d} vars={r['vars']:<5d} nodes={r['nodes']!s:<6s} "
              f"models={r['models']!s:<6s} ms={r['wallMs']!s:<10s} {r['status']}")
    if args.report:
        paths = write_report(rows, args.report, {"timeout": args.timeout,
                                                 "reuseDseqs": args.reuse_dseqs})
        print("wrote " + ", ".join(str(p) for p in paths.values()))
    return 0


def cmd_gen(args) -> int:
    from .benchgen import BASE_BLOCK, gen_copies, write_sweep
    from .cnf import emit_qdimacs
    if args.copies is not None:
        text = emit_qdimacs(gen_copies(BASE_BLOCK, args.copies), [f"{args.copies} copies"])
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        return 0
    if not args.out:
        print("--out DIR is required for a random sweep", file=sys.stderr)
        return 1
    write_sweep(args.out, args.count, args.seed)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="ddsqe", description="Quantifier elimination for exists-CNF.")
    sub = p.add_subparsers(dest="cmd", required=True)

    q = sub.add_parser("qe", help="eliminate the quantified variables of a QDIMACS file")
    q.add_argument("input")
    q.add_argument("--algo", choices=ALGOS, default="dds")
    q.add_argument("--out", help="DIMACS output (default stdout)")
    q.add_argument("--stats-json")
    q.add_argument("--trace", help="JSON-lines trace file (dds only)")
    q.add_argument("--reuse-dseqs", action="store_true")
    q.add_argument("--conflict-retention", action="store_true")
    q.add_argument("--node-cap", type=int)
    q.add_argument("--time-cap", type=float)
    q.set_defaults(fn=cmd_qe)

    v = sub.add_parser("verify", help="compare G with the brute-force oracle")
    v.add_argument("input")
    v.add_argument("g")
    v.add_argument("--trace", help="also check the D-sequents of a dds trace")
    v.add_argument("--cap", type=int, default=DEFAULT_CAP)
    v.set_defaults(fn=cmd_verify)

    b = sub.add_parser("bench", help="run the k-copy benchmark")
    b.add_argument("--copies", default="5,10,15,500")
    b.add_argument("--algos", default="dds,enumsa")
    b.add_argument("--timeout", type=float, default=10.0)
    b.add_argument("--reuse-dseqs", action=argparse.BooleanOptionalAction, default=True)
    b.add_argument("--report", help="path prefix for .csv/.json/.png")
    b.set_defaults(fn=cmd_bench)

    g = sub.add_parser("gen", help="write benchmark instances")
    g.add_argument("--copies", type=int, help="k copies of the base block")
    g.add_argument("--count", type=int, default=500, help="random instances")
    g.add_argument("--seed", type=int, default=int(os.environ.get("QE_DDS_SEED", "0")))
    g.add_argument("--out")
    g.set_defaults(fn=cmd_gen)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
