"""Command line entry point: ``expander-listdec {gen,decode,sweep,bench,verify}``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import claims
from .codes import CodeError, TableCapExceeded, write_code
from .graphs import GraphError, random_regular_bipartite, write_graph
from .harness import (
    BENCH_FIELDS,
    EXIT_CAP,
    EXIT_OK,
    EXIT_UNSOUND,
    EXIT_USAGE,
    SWEEP_FIELDS,
    RunResult,
    SpecError,
    bench,
    check_soundness,
    corruption_count,
    dump_json,
    load_graph,
    load_instance,
    load_local_code,
    run_decode,
    sweep,
    tanner_instance,
    to_csv,
)
from .listdec import DecodeParams
from .oracle import OracleCapExceeded, compare
from .regularity import EnumerationCapExceeded
from .tanner import EnumerationTooLarge, build_tanner, read_edge_word


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("decoding")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--gamma", type=float, default=None, help="decomposition precision (default: algorithm's)")
    g.add_argument("--epsilon", type=float, default=None, help="list decoding slack (default: half the local distance)")
    g.add_argument("--ell", type=int, default=None, help="CSP domain size (default: local code size)")
    g.add_argument("--oracle", choices=["exact", "heuristic", "auto"], default="auto")
    g.add_argument("--max-p", type=int, default=None, help="cap on decomposition terms")
    g.add_argument("--enum-cap", type=int, default=1 << 24)
    g.add_argument("--json-out", default=None)
    g.add_argument("--dump-decomposition", default=None, help="write the top-level cut decompositions here")
    return p


def _instance_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=["tanner", "ael"], required=True)
    p.add_argument("--graph", help="graph file or random:n=..,d=..,seed=..")
    p.add_argument("--local", help="local/inner code file or spec (gv:, rep:, rows:)")
    p.add_argument("--rs", help="outer Reed-Solomon code q,n,k (AEL)")
    p.add_argument("--config", help="AEL JSON config file")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="expander-listdec", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", parents=[common], help="generate graph and code files")
    p.add_argument("--graph", help="random:n=..,d=..,seed=..")
    p.add_argument("--code", help="gv:q=..,d=..,delta0=..,ell=..,seed=.. (or rep:, rows:)")
    p.add_argument("--out-graph", default="graph.txt")
    p.add_argument("--out-code", default="code.txt")

    p = sub.add_parser("decode", parents=[common], help="encode, corrupt and list decode one word")
    _instance_args(p)
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--corrupt", type=int, default=None, help="number of corrupted edges")
    grp.add_argument("--rate", type=float, default=None, help="fraction of corrupted edges")
    p.add_argument("--received", help="received edge word file (skips encoding and corruption)")
    p.add_argument("--oracle-check", action="store_true", help="compare against exhaustive decoding")

    p = sub.add_parser("sweep", parents=[common], help="decode over a range of corruption counts")
    _instance_args(p)
    p.add_argument("--counts", default="0", help="comma separated corruption counts")
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--csv-out", default=None)

    p = sub.add_parser("bench", parents=[common], help="time Tanner decoding at growing n")
    p.add_argument("--local", default="rows:q=2,g=11000/00111")
    p.add_argument("--degree", type=int, default=5)
    p.add_argument("--ns", default="1024,2048,4096")
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--rate", type=float, default=0.02)
    p.add_argument("--csv-out", default=None)

    p = sub.add_parser("verify", parents=[common], help="run the structural checks at reduced size")
    return parser


def _params(args, delta: float, default_ell: int) -> DecodeParams:
    eps = args.epsilon if args.epsilon is not None else delta / 2
    return DecodeParams(
        eps=eps,
        ell=args.ell or default_ell,
        gamma=args.gamma,
        oracle=args.oracle,
        p_max=args.max_p,
        enum_cap=args.enum_cap,
        seed=args.seed,
    )


def _instance_params(args, inst) -> DecodeParams:
    local = inst.code.local if inst.family == "tanner" else inst.code.inner
    return _params(args, local.rel_distance, local.size)


def _write_decomposition(path: str, report) -> None:
    blocks = [f"alpha {a} {b}\n{dec.dump()}" for (a, b), dec in report.cuts]
    Path(path).write_text("".join(blocks))


def cmd_gen(args) -> int:
    if not args.graph and not args.code:
        raise SpecError("gen needs --graph and/or --code")
    graph = code = None
    if args.graph:
        graph = load_graph(args.graph)
        write_graph(graph, args.out_graph)
        print(f"graph={args.out_graph} n={graph.n} d={graph.d} lambda={graph.lam:.6f} lambda/d={graph.lam / graph.d:.6f}")
    if args.code:
        code = load_local_code(args.code)
        write_code(code, args.out_code)
        print(f"code={args.out_code} q={code.q} d={code.block_len} k={code.dim} "
              f"min_dist={code.min_dist} delta0={code.rel_distance:.6f}")
    if graph is not None and code is not None and code.block_len == graph.d:
        tc = build_tanner(graph, code)
        print(f"tanner_design_distance={tc.design_distance:.6f}")
    return EXIT_OK


def cmd_decode(args) -> int:
    inst = load_instance(args.family, args.graph, args.local, args.rs, args.config)
    params = _instance_params(args, inst)
    if args.received:
        y = read_edge_word(args.received)
        report = inst.decode(y, params)
        oracle = None
        if args.oracle_check:
            words = inst.oracle(y, report.radius)
            oracle = compare(words, report.words) if words is not None else None
        empty = np.zeros(0, dtype=np.int64)
        res = RunResult(empty, y, empty, report, oracle, check_soundness(inst, y, report))
    else:
        count = corruption_count(inst.code.length, args.corrupt, args.rate)
        res = run_decode(inst, params, count, args.seed, oracle_check=args.oracle_check)
    text = dump_json(res.to_dict(), args.json_out)
    if not args.json_out:
        print(text)
    else:
        r = res.report
        print(f"list_size={len(r.words)} contains_transmitted={res.contains_transmitted} "
              f"in_regime={r.in_regime} report={args.json_out}")
    if args.dump_decomposition:
        _write_decomposition(args.dump_decomposition, res.report)
    return res.exit_code()


def cmd_sweep(args) -> int:
    inst = load_instance(args.family, args.graph, args.local, args.rs, args.config)
    params = _instance_params(args, inst)
    counts = [int(c) for c in args.counts.split(",") if c.strip()]
    rows = sweep(inst, params, counts, [args.seed + t for t in range(args.trials)])
    text = to_csv(rows, SWEEP_FIELDS)
    if args.csv_out:
        Path(args.csv_out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_UNSOUND if any(not r["sound"] for r in rows) else EXIT_OK


def cmd_bench(args) -> int:
    local = load_local_code(args.local)
    ns = [int(n) for n in args.ns.split(",") if n.strip()]
    params = DecodeParams(
        eps=args.epsilon if args.epsilon is not None else local.rel_distance / 2,
        ell=args.ell or 2,
        gamma=args.gamma if args.gamma is not None else claims.BENCH_PARAMS["gamma"],
        oracle="heuristic" if args.oracle == "auto" else args.oracle,
        p_max=args.max_p if args.max_p is not None else claims.BENCH_PARAMS["p_max"],
        enum_cap=min(args.enum_cap, claims.BENCH_PARAMS["enum_cap"]),
        restarts=claims.BENCH_PARAMS["restarts"],
        seed=args.seed,
    )
    def make(n):
        return tanner_instance(random_regular_bipartite(n, args.degree, args.seed + n), local)

    rows = bench(make, ns, params, args.rate, runs=args.runs, seed=args.seed)
    text = to_csv(rows, BENCH_FIELDS)
    if args.csv_out:
        Path(args.csv_out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = claims.all_quick(args.seed)
    for r in results:
        print(r.line())
    if args.json_out:
        dump_json([{"name": r.name, "passed": r.passed, "total": r.total, "detail": r.detail} for r in results],
                  args.json_out)
    return EXIT_OK if all(r.ok for r in results) else EXIT_UNSOUND


COMMANDS = {"gen": cmd_gen, "decode": cmd_decode, "sweep": cmd_sweep, "bench": cmd_bench, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.cmd](args)
    except (EnumerationTooLarge, TableCapExceeded, EnumerationCapExceeded, OracleCapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (SpecError, GraphError, CodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
