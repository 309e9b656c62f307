"""Pure-Python insertion-scan kernel; fallback twin of the Cython module.

Both implementations must stay numerically identical: same traversal order,
same snapping, same tie-break (lowest position wins among snapped-equal
deltas).
"""

from __future__ import annotations

import math


def _snap(x: float) -> float:
    # round-half-up on a 1e-12 grid so ties break identically across builds
    return math.floor(x * 1e12 + 0.5) / 1e12


def scan_route(dist, demand, tw_start, tw_end, service, capacity, t_max, route, c):
    """Best feasible insertion of customer ``c`` into ``route``.

    Assumes the unmodified route is feasible. Returns ``(pos, delta)`` with
    ``pos`` in 0..len(route), or ``(-1, inf)`` when no position is feasible.
    """
    L = len(route)
    load = demand[c]
    for j in range(L):
        load += demand[route[j]]
    if load > capacity:
        return -1, math.inf

    # departure times of the unmodified route (shared prefix for every pos)
    dep = [0.0] * L
    t = 0.0
    prev = 0
    for j in range(L):
        node = route[j]
        arr = t + dist[prev, node]
        t = max(arr, tw_start[node]) + service[node]
        dep[j] = t
        prev = node

    best_pos = -1
    best_delta = math.inf
    best_snapped = math.inf
    for p in range(L + 1):
        prev_node = route[p - 1] if p > 0 else 0
        next_node = route[p] if p < L else 0
        t_prev = dep[p - 1] if p > 0 else 0.0
        arr_c = t_prev + dist[prev_node, c]
        if arr_c > tw_end[c]:
            continue
        tt = max(arr_c, tw_start[c]) + service[c]
        ok = True
        pv = c
        for j in range(p, L):
            node = route[j]
            arr = tt + dist[pv, node]
            if arr > tw_end[node]:
                ok = False
                break
            tt = max(arr, tw_start[node]) + service[node]
            pv = node
        if not ok:
            continue
        if tt + dist[pv, 0] > t_max:
            continue
        delta = dist[prev_node, c] + dist[c, next_node] - dist[prev_node, next_node]
        snapped = _snap(delta)
        if snapped < best_snapped:
            best_snapped = snapped
            best_delta = delta
            best_pos = p
    return best_pos, best_delta
