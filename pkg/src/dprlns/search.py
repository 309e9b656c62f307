"""LNS controller: initialization, destroy/repair loop, simulated-annealing
acceptance with a geometric cooling schedule, and per-iteration tracing.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import destroy as destroy_ops
from . import hrgcn
from .model import Instance, Solution, solution_cost
from .policy import random_policy, sample_anchors, sample_coefficients
from .repair import least_cost_repair

OPERATORS = ("rand", "alns_lite", "string", "dpr_random", "dpr_neural")

TRACE_HEADER = ["iter", "cost", "best", "accepted", "temperature", "mean_coeff", "anchors"]


@dataclass
class SearchConfig:
    iterations: int = 150
    t_initial: float = 100.0
    t_final: float = 1.0
    n_anchors: int = 1
    operator: str = "rand"
    seed: int = 0
    init_seed: int | None = None  # split off so operators can share initializations
    weights_path: str | None = None
    bundle: "hrgcn.WeightBundle | None" = None

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not self.t_initial >= self.t_final > 0:
            raise ValueError("need t_initial >= t_final > 0")
        if self.operator not in OPERATORS:
            raise ValueError(f"unknown operator {self.operator!r}")
        if not 1 <= self.n_anchors <= 3:
            raise ValueError("n_anchors must be in 1..3")


@dataclass
class TraceRecord:
    iteration: int
    cost: float
    best: float
    accepted: bool
    temperature: float
    mean_coeff: float
    anchors: list[int]


@dataclass
class SearchTrace:
    records: list[TraceRecord] = field(default_factory=list)
    initial_cost: float = 0.0
    runtime: float = 0.0

    def write_csv(self, fh) -> None:
        w = csv.writer(fh)
        w.writerow(TRACE_HEADER)
        for r in self.records:
            w.writerow([r.iteration, repr(r.cost), repr(r.best), int(r.accepted),
                        repr(r.temperature), repr(r.mean_coeff),
                        ";".join(str(a) for a in r.anchors)])


def initial_solution(inst: Instance, rng: np.random.Generator) -> Solution:
    """Everything into the pool, then least-cost insertion in shuffled order."""
    empty = Solution([], set(inst.customer_ids))
    return least_cost_repair(inst, empty, rng)


def degree_of_destruction(n_customers: int, multi_anchor: bool) -> int:
    if n_customers < 1:
        raise ValueError("n_customers must be >= 1")
    base = math.sqrt(n_customers)
    if multi_anchor:
        base *= 1.2
    return max(1, math.floor(base + 0.5))


def sa_accept(c_new: float, c_cur: float, temperature: float, rng: np.random.Generator) -> bool:
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    if c_new <= c_cur:
        return True
    return rng.random() < math.exp(-(c_new - c_cur) / temperature)


def temperature_at(k: int, iterations: int, t_initial: float, t_final: float) -> float:
    """Geometric schedule from t_initial (k=0) to t_final (k=iterations-1)."""
    if iterations == 1:
        return t_initial
    return t_initial * (t_final / t_initial) ** (k / (iterations - 1))


def lns_run(inst: Instance, cfg: SearchConfig) -> tuple[Solution, SearchTrace]:
    t0 = time.perf_counter()
    init_seed = cfg.seed if cfg.init_seed is None else cfg.init_seed
    init_rng = np.random.default_rng(init_seed)
    rng = np.random.default_rng(cfg.seed)

    current = initial_solution(inst, init_rng)
    cost_cur = solution_cost(inst, current)
    best = current.copy()
    cost_best = cost_cur

    n_destroy = min(degree_of_destruction(inst.n_customers, cfg.n_anchors > 1),
                    inst.n_customers)

    neural = None
    if cfg.operator == "dpr_neural":
        bundle = cfg.bundle
        if bundle is None:
            if cfg.weights_path is None:
                raise ValueError("dpr_neural needs a weight bundle")
            bundle = hrgcn.load_bundle(cfg.weights_path)
        neural = hrgcn.NeuralPolicy(bundle)

    alns_weights = [1.0, 1.0, 1.0]  # rand, string, dpr_random

    trace = SearchTrace(initial_cost=cost_cur)
    for k in range(cfg.iterations):
        temp = temperature_at(k, cfg.iterations, cfg.t_initial, cfg.t_final)
        anchors: list[int] = []
        mean_coeff = math.nan
        op = cfg.operator
        op_idx = None
        if op == "alns_lite":
            op_idx = destroy_ops.adaptive_select(alns_weights, rng)
            op = ("rand", "string", "dpr_random")[op_idx]

        if op == "rand":
            partial, _ = destroy_ops.random_destroy(current, n_destroy, rng)
        elif op == "string":
            partial, _ = destroy_ops.string_destroy(inst, current, n_destroy, rng)
        else:
            out = neural(inst, current) if neural else random_policy(inst, current)
            anchors = sample_anchors(out, min(cfg.n_anchors, inst.n_customers), rng)
            coeffs = sample_coefficients(out, inst, rng)
            mean_coeff = float(np.mean(list(coeffs.values())))
            req = destroy_ops.DprRequest(anchors, coeffs, n_destroy)
            partial, _ = destroy_ops.dpr_destroy(inst, current, req)
            if neural:
                neural.observe(out, anchors)

        candidate = least_cost_repair(inst, partial, rng)
        cost_cand = solution_cost(inst, candidate)
        accepted = sa_accept(cost_cand, cost_cur, temp, rng)

        if op_idx is not None:
            if cost_cand < cost_best - 1e-9:
                score = destroy_ops.SIGMA[0]
            elif accepted and cost_cand < cost_cur:
                score = destroy_ops.SIGMA[1]
            elif accepted:
                score = destroy_ops.SIGMA[2]
            else:
                score = 0.0
            alns_weights = destroy_ops.update_weights(alns_weights, op_idx, score)

        if accepted:
            current = candidate
            cost_cur = cost_cand
        if cost_cand < cost_best - 1e-9:
            best = candidate.copy()
            cost_best = cost_cand

        trace.records.append(TraceRecord(k, cost_cur, cost_best, accepted, temp,
                                         mean_coeff, anchors))

    trace.runtime = time.perf_counter() - t0
    return best, trace
