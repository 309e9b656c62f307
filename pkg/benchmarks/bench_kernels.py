"""Compare the compiled insertion-scan kernel against the pure-Python fallback.

Times full LNS runs (where the scan dominates) and raw scan_route calls, for
each backend.  Usage::

    python3 benchmarks/bench_kernels.py [--n 50 100] [--iters 150] [--repeats 3]
"""

import argparse
import time

import numpy as np

import dprlns._kernels as kernels
from dprlns.io import GeneratorParams, generate_synthetic
from dprlns.search import SearchConfig, initial_solution, lns_run


def time_lns(inst, iters, repeats):
    best = float("inf")
    for r in range(repeats):
        t0 = time.perf_counter()
        lns_run(inst, SearchConfig(iterations=iters, operator="dpr_random", seed=r))
        best = min(best, time.perf_counter() - t0)
    return best


def time_raw_scans(inst, repeats):
    sol = initial_solution(inst, np.random.default_rng(0))
    routes = [np.asarray(r, dtype=np.int64) for r in sol.routes]
    c = inst.customer_ids[0]
    # drop the probe customer from its own route so the scan is meaningful
    routes = [r[r != c] for r in routes]
    args = (inst.dist_matrix, inst.demand, inst.tw_start, inst.tw_end,
            inst.service, inst.capacity, inst.t_max)
    best = float("inf")
    loops = 2000
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(loops):
            for r in routes:
                kernels.scan_route(*args, r, c)
        best = min(best, time.perf_counter() - t0)
    return best / (loops * len(routes))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[25, 50, 100])
    ap.add_argument("--iters", type=int, default=150)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    if not kernels.HAVE_FAST:
        print("compiled kernel not available; nothing to compare")
        return

    print(f"{'N':>6} {'backend':>10} {'lns_run [s]':>12} {'scan [us]':>11} {'speedup':>8}")
    for n in args.n:
        inst = generate_synthetic(GeneratorParams(n, seed=0))
        rows = {}
        for pure in (False, True):
            kernels.use_pure(pure)
            try:
                rows[pure] = (time_lns(inst, args.iters, args.repeats),
                              time_raw_scans(inst, args.repeats))
            finally:
                kernels.use_pure(False)
        for pure in (False, True):
            lns_t, scan_t = rows[pure]
            label = "pure" if pure else "compiled"
            speed = rows[True][0] / rows[False][0] if not pure else 1.0
            speed_s = f"{speed:8.1f}x" if not pure else f"{'-':>8}"
            print(f"{n:>6} {label:>10} {lns_t:>12.3f} {scan_t * 1e6:>11.2f} {speed_s}")


if __name__ == "__main__":
    main()
