"""Benchmark harness: solve single instances, sweep operator comparisons,
generate synthetic instance sets, and average trace CSVs.

Exit codes: 0 success, 1 runtime failure, 2 usage/configuration error.
"""

from __future__ import annotations

import argparse
import csv
import os
import statistics
import sys
from concurrent.futures import ThreadPoolExecutor

from . import io as iio
from .hrgcn import load_bundle
from .model import VrpError, solution_cost
from .search import SearchConfig, lns_run

OP_CHOICES = ("rand", "alns", "string", "dpr_random", "dpr_neural")
_OP_MAP = {"alns": "alns_lite"}

SOLUTION_FORMAT_TAG = "dprlns-solution/1"


class UsageError(Exception):
    pass


def _load_instance(path: str):
    if not os.path.exists(path):
        raise UsageError(f"instance file not found: {path}")
    return iio.read_instance_file(path)


def _default_anchors(op: str, n_customers: int) -> int:
    if op == "dpr_neural":
        return 2 if n_customers <= 200 else 3
    return 1


def _make_config(op: str, args, n_customers: int, seed: int, init_seed=None) -> SearchConfig:
    internal = _OP_MAP.get(op, op)
    anchors = args.anchors if args.anchors else _default_anchors(op, n_customers)
    if internal == "dpr_neural" and not args.weights:
        raise UsageError("--op dpr_neural requires --weights")
    return SearchConfig(iterations=args.iters, n_anchors=anchors, operator=internal,
                        seed=seed, init_seed=init_seed, weights_path=args.weights)


def _write_solution(path: str, inst, sol) -> None:
    with open(path, "w") as fh:
        fh.write(SOLUTION_FORMAT_TAG + "\n")
        fh.write(f"cost {solution_cost(inst, sol)!r}\n")
        fh.write(f"vehicles {len(sol.routes)}\n")
        for r in sol.routes:
            fh.write("route " + " ".join(str(c) for c in r) + "\n")


def cmd_solve(args) -> int:
    inst = _load_instance(args.instance)
    cfg = _make_config(args.op, args, inst.n_customers, args.seed, args.init_seed)
    if cfg.operator == "dpr_neural":
        cfg.bundle = load_bundle(args.weights)
    best, trace = lns_run(inst, cfg)
    cost = solution_cost(inst, best)
    print(f"instance: {args.instance}")
    print(f"operator: {args.op}  iterations: {args.iters}  seed: {args.seed}")
    print(f"cost: {cost:.4f}")
    print(f"vehicles: {len(best.routes)}")
    print(f"runtime: {trace.runtime:.3f}s")
    if args.out:
        _write_solution(args.out, inst, best)
    if args.trace:
        with open(args.trace, "w", newline="") as fh:
            trace.write_csv(fh)
    return 0


def _read_manifest(path: str):
    if not os.path.exists(path):
        raise UsageError(f"manifest file not found: {path}")
    groups = []
    base = os.path.dirname(os.path.abspath(path))
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            toks = line.split()
            if len(toks) != 2:
                raise UsageError(f"{path}:{lineno}: expected '<scale> <instance-path>'")
            ipath = toks[1]
            if not os.path.isabs(ipath):
                ipath = os.path.join(base, ipath)
            groups.append((toks[0], ipath))
    if not groups:
        raise UsageError(f"manifest {path} lists no instances")
    return groups


def cmd_bench(args) -> int:
    ops = [o.strip() for o in args.op.split(",")]
    for o in ops:
        if o not in OP_CHOICES:
            raise UsageError(f"unknown operator {o!r}")
    entries = _read_manifest(args.manifest)
    instances = {path: _load_instance(path) for _, path in entries}

    jobs = []
    for idx, (scale, path) in enumerate(entries):
        inst = instances[path]
        for s in range(args.seeds):
            init_seed = 100003 * idx + 17 * s + args.seed
            for oi, op in enumerate(ops):
                search_seed = init_seed * 10 + oi + 1
                cfg = _make_config(op, args, inst.n_customers, search_seed, init_seed)
                jobs.append((scale, op, inst, cfg))

    workers = int(os.environ.get("DPRLNS_THREADS", "0")) or (os.cpu_count() or 1)

    def run(job):
        scale, op, inst, cfg = job
        best, trace = lns_run(inst, cfg)
        return scale, op, solution_cost(inst, best), trace.initial_cost

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(run, jobs))

    by_cell: dict[tuple[str, str], list[float]] = {}
    for scale, op, cost, _ in results:
        by_cell.setdefault((scale, op), []).append(cost)

    scales = list(dict.fromkeys(s for s, _ in entries))
    print(f"{'scale':<12}" + "".join(f"{op:>16}" for op in ops))
    rows = []
    for scale in scales:
        line = f"{scale:<12}"
        for op in ops:
            costs = by_cell[(scale, op)]
            mean = statistics.fmean(costs)
            std = statistics.pstdev(costs) if len(costs) > 1 else 0.0
            line += f"{mean:>16.2f}"
            rows.append((scale, op, mean, std, len(costs)))
        print(line)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["scale", "op", "mean_cost", "std_cost", "runs"])
            for row in rows:
                w.writerow([row[0], row[1], repr(row[2]), repr(row[3]), row[4]])
    return 0


def cmd_generate(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    for i in range(args.count):
        child = args.seed * 1000003 + i
        inst = iio.generate_synthetic(iio.GeneratorParams(args.n, args.p_start, child))
        path = os.path.join(args.out, f"synth_{args.n:04d}_{i:04d}.txt")
        with open(path, "w") as fh:
            fh.write(iio.dump_instance(inst))
        print(path)
    return 0


def cmd_traces(args) -> int:
    columns = []
    for path in args.traces:
        if not os.path.exists(path):
            raise UsageError(f"trace file not found: {path}")
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            rows = [(float(r["cost"]), float(r["best"]), float(r["mean_coeff"])) for r in reader]
        columns.append(rows)
    length = len(columns[0])
    if any(len(c) != length for c in columns):
        raise UsageError("trace files have different lengths")
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(["iter", "mean_cost", "mean_best", "mean_coeff"])
        for k in range(length):
            cost = statistics.fmean(c[k][0] for c in columns)
            bst = statistics.fmean(c[k][1] for c in columns)
            coeff = statistics.fmean(c[k][2] for c in columns)
            w.writerow([k, repr(cost), repr(bst), repr(coeff)])
    finally:
        if args.out:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dprlns", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="solve a single instance")
    ps.add_argument("--instance", required=True)
    ps.add_argument("--op", default="rand", choices=OP_CHOICES)
    ps.add_argument("--iters", type=int, default=150)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--init-seed", type=int, default=None, dest="init_seed",
                    help="separate seed for the initial solution (defaults to --seed)")
    ps.add_argument("--anchors", type=int, default=0)
    ps.add_argument("--weights")
    ps.add_argument("--out", help="write solution document here")
    ps.add_argument("--trace", help="write per-iteration trace CSV here")
    ps.set_defaults(func=cmd_solve)

    pb = sub.add_parser("bench", help="operator sweep over a manifest of instances")
    pb.add_argument("--manifest", required=True)
    pb.add_argument("--op", default="rand", help="comma-separated operator list")
    pb.add_argument("--iters", type=int, default=150)
    pb.add_argument("--seeds", type=int, default=5, help="number of seeds per instance")
    pb.add_argument("--seed", type=int, default=0, help="master seed offset")
    pb.add_argument("--anchors", type=int, default=0)
    pb.add_argument("--weights")
    pb.add_argument("--out", help="write summary CSV here")
    pb.set_defaults(func=cmd_bench)

    pg = sub.add_parser("generate", help="generate synthetic instances")
    pg.add_argument("--n", type=int, required=True, help="customers per instance")
    pg.add_argument("--count", type=int, default=1)
    pg.add_argument("--seed", type=int, default=0, help="master seed")
    pg.add_argument("--p-start", type=float, default=0.3, dest="p_start")
    pg.add_argument("--out", required=True, help="output directory")
    pg.set_defaults(func=cmd_generate)

    pt = sub.add_parser("traces", help="column-wise means over trace CSVs")
    pt.add_argument("traces", nargs="+")
    pt.add_argument("--out")
    pt.set_defaults(func=cmd_traces)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (VrpError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
