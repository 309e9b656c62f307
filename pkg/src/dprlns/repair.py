"""Least-cost (cheapest insertion) repair operator.

Pool customers are reinserted one by one at the feasible position with the
smallest detour.  Ties break deterministically: lowest route index, then
lowest position, with opening a new route considered last.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import Instance, Solution, UnknownCustomerError, VrpError
from ._kernels._slow import _snap


class InfeasibleCustomerError(VrpError):
    """Customer cannot be served even on a route of its own."""


@dataclass(frozen=True)
class Placement:
    route_index: int | None  # None means: open a new route
    position: int
    delta: float


def _new_route_delta(inst: Instance, c: int) -> float:
    """Detour of the singleton route depot -> c -> depot, inf if infeasible."""
    d = inst.dist_matrix[0, c]
    if inst.demand[c] > inst.capacity:
        return math.inf
    if d > inst.tw_end[c]:
        return math.inf
    if max(d, inst.tw_start[c]) + inst.service[c] + d > inst.t_max:
        return math.inf
    return float(2.0 * d)


def best_insertion(inst: Instance, sol: Solution, c: int) -> Placement:
    if c not in sol.pool:
        raise UnknownCustomerError(f"customer {c} is not in the pool")
    best: Placement | None = None
    best_snapped = math.inf
    for ri, route in enumerate(sol.routes):
        pos, delta = _kernels.scan_route(
            inst.dist_matrix, inst.demand, inst.tw_start, inst.tw_end,
            inst.service, inst.capacity, inst.t_max,
            np.asarray(route, dtype=np.int64), c,
        )
        if pos < 0:
            continue
        snapped = _snap(delta)
        if snapped < best_snapped:
            best_snapped = snapped
            best = Placement(ri, pos, float(delta))
    delta_new = _new_route_delta(inst, c)
    if math.isfinite(delta_new) and _snap(delta_new) < best_snapped:
        best = Placement(None, 0, delta_new)
    if best is None:
        raise InfeasibleCustomerError(f"customer {c} fits no route, not even alone")
    return best


def apply_placement(sol: Solution, c: int, placement: Placement) -> None:
    """Insert pool customer c in place according to the placement."""
    if placement.route_index is None:
        sol.routes.append([c])
    else:
        sol.routes[placement.route_index].insert(placement.position, c)
    sol.pool.discard(c)


def least_cost_repair(inst: Instance, sol: Solution, rng: np.random.Generator) -> Solution:
    """Reinsert every pool customer in uniformly shuffled order.

    Complete solutions pass through unchanged (modulo copying).
    """
    out = sol.copy()
    order = [int(c) for c in rng.permutation(sorted(out.pool))]
    for c in order:
        placement = best_insertion(inst, out, c)
        apply_placement(out, c, placement)
    return out
