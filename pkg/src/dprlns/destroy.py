"""Destroy operators: dynamic partial removal plus the baseline operators.

Dynamic partial removal radiates out from each anchor in ascending Euclidean
distance.  When the wave reaches a still-visited node, a contiguous segment
of its route is removed; the segment size is the node's route coefficient
times the route's current occupancy (round-half-up, at least 1), truncated so
the total never exceeds the removal budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Instance, Solution, UnknownCustomerError, remove_customers

# ALNS-lite constants (reaction factor and new-best / improving / accepted scores)
RHO = 0.1
SIGMA = (33.0, 9.0, 13.0)


@dataclass
class DprRequest:
    anchors: list[int]
    coefficients: dict[int, float]
    n_destroy: int

    def __post_init__(self):
        if not self.anchors:
            raise ValueError("at least one anchor is required")
        if self.n_destroy < 1:
            raise ValueError("n_destroy must be >= 1")
        for c, v in self.coefficients.items():
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"coefficient of node {c} outside [0, 1]")


def _segment_bounds(idx: int, quota: int, length: int) -> tuple[int, int]:
    """Window [lo, hi] of ``quota`` positions containing idx.

    Grows alternately successor side first, then predecessor side, spilling
    to the remaining side when one end of the route is reached.
    """
    lo = hi = idx
    succ_turn = True
    for _ in range(quota - 1):
        if succ_turn:
            if hi + 1 < length:
                hi += 1
            else:
                lo -= 1
        else:
            if lo > 0:
                lo -= 1
            else:
                hi += 1
        succ_turn = not succ_turn
    return lo, hi


def dpr_destroy(inst: Instance, sol: Solution, req: DprRequest):
    """Apply dynamic partial removal; returns (solution, removed ids in order).

    Per-step details (node triggering each segment and the segment size) are
    available through dpr_destroy_detailed.
    """
    out, removed, _ = dpr_destroy_detailed(inst, sol, req)
    return out, removed


def dpr_destroy_detailed(inst: Instance, sol: Solution, req: DprRequest):
    if sol.pool:
        raise UnknownCustomerError("dpr_destroy needs a complete solution")
    routes = [list(r) for r in sol.routes]
    where = {}
    for ri, r in enumerate(routes):
        for c in r:
            where[c] = ri
    for a in req.anchors:
        if a not in where:
            raise UnknownCustomerError(f"anchor {a} is not a visited customer")

    budget = min(req.n_destroy, inst.n_customers)
    removed: list[int] = []
    removed_set: set[int] = set()
    steps: list[tuple[int, int]] = []
    customers = np.arange(1, len(inst.nodes))

    for anchor in req.anchors:
        if len(removed) >= budget:
            break
        dists = inst.dist_matrix[anchor, 1:]
        # ascending distance from the anchor, node id breaking ties
        order = customers[np.lexsort((customers, dists))]
        for i in order:
            i = int(i)
            if len(removed) >= budget:
                break
            if i in removed_set:
                continue
            route = routes[where[i]]
            remaining = len(route)
            quota = max(1, math.floor(req.coefficients[i] * remaining + 0.5))
            quota = min(quota, remaining, budget - len(removed))
            lo, hi = _segment_bounds(route.index(i), quota, remaining)
            segment = route[lo:hi + 1]
            del route[lo:hi + 1]
            removed.extend(segment)
            removed_set.update(segment)
            steps.append((i, len(segment)))

    out = remove_customers(sol, removed)
    return out, removed, steps


def random_destroy(sol: Solution, n: int, rng: np.random.Generator):
    """Remove n customers sampled uniformly without replacement."""
    visited = sorted(sol.visited())
    if n > len(visited):
        raise ValueError(f"cannot remove {n} of {len(visited)} customers")
    if n == 0:
        return sol.copy(), []
    picked = [int(c) for c in rng.choice(visited, size=n, replace=False)]
    return remove_customers(sol, picked), picked


def string_destroy(inst: Instance, sol: Solution, n: int, rng: np.random.Generator):
    """Remove contiguous strings starting from a random seed customer.

    After the seed's route, strings continue on the route of the nearest
    still-visited customer to the seed, until n customers are removed.
    """
    visited = sorted(sol.visited())
    if n > len(visited):
        raise ValueError(f"cannot remove {n} of {len(visited)} customers")
    if n == 0:
        return sol.copy(), []
    routes = [list(r) for r in sol.routes]
    seed = int(rng.choice(visited))
    removed: list[int] = []
    removed_set: set[int] = set()
    focal = seed
    while len(removed) < n:
        ri = next(k for k, r in enumerate(routes) if focal in r)
        route = routes[ri]
        length = int(rng.integers(1, len(route) + 1))
        length = min(length, n - len(removed))
        lo, hi = _segment_bounds(route.index(focal), length, len(route))
        segment = route[lo:hi + 1]
        del route[lo:hi + 1]
        removed.extend(segment)
        removed_set.update(segment)
        if len(removed) >= n:
            break
        rest = [c for c in visited if c not in removed_set]
        focal = min(rest, key=lambda c: (inst.dist_matrix[seed, c], c))
    return remove_customers(sol, removed), removed


def adaptive_select(weights, rng: np.random.Generator) -> int:
    """Roulette-wheel selection proportional to the (nonnegative) weights."""
    w = np.asarray(weights, dtype=np.float64)
    if w.size == 0:
        raise ValueError("empty operator set")
    total = w.sum()
    if total <= 0:
        return int(rng.integers(0, w.size))
    return int(rng.choice(w.size, p=w / total))


def update_weights(weights, index: int, score: float, rho: float = RHO):
    """Exponential smoothing of one operator weight toward its latest score."""
    w = list(weights)
    w[index] = (1.0 - rho) * w[index] + rho * score
    return w
