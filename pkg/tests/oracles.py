"""Independent brute-force oracles the fast implementations are checked against.

These deliberately recompute everything from scratch (full copies, explicit
enumeration) and share no code with the solver's hot paths.
"""

import math

from dprlns.model import Instance, Node, Solution, ViolationKind


def oracle_check_route(inst: Instance, route):
    """Step-by-step schedule enumeration; returns ("feasible", return_time) or
    (ViolationKind, node id).  Capacity precedes the time window at a node,
    mirroring the documented first-offender order."""
    loads = []
    total = 0.0
    for c in route:
        total += inst.nodes[c].demand
        loads.append(total)
    arrivals = []
    clock = 0.0
    here = inst.nodes[0]
    for c in route:
        nxt = inst.nodes[c]
        clock += math.hypot(here.x - nxt.x, here.y - nxt.y)
        arrivals.append(clock)
        if clock < nxt.tw_start:
            clock = nxt.tw_start
        clock += nxt.service
        here = nxt
    for idx, c in enumerate(route):
        if loads[idx] > inst.capacity:
            return ViolationKind.CAPACITY_EXCEEDED, c
        if arrivals[idx] > inst.nodes[c].tw_end:
            return ViolationKind.TIME_WINDOW_MISSED, c
    back = clock + math.hypot(here.x - inst.nodes[0].x, here.y - inst.nodes[0].y)
    if back > inst.nodes[0].tw_end:
        return ViolationKind.DEPOT_RETURN_LATE, 0
    return "feasible", back


def oracle_route_cost(inst: Instance, route):
    pts = [inst.nodes[0]] + [inst.nodes[c] for c in route] + [inst.nodes[0]]
    return sum(math.hypot(a.x - b.x, a.y - b.y) for a, b in zip(pts, pts[1:]))


def oracle_solution_cost(inst: Instance, sol: Solution):
    return sum(oracle_route_cost(inst, r) for r in sol.routes)


def _snap(x):
    return math.floor(x * 1e12 + 0.5) / 1e12


def oracle_best_insertion(inst: Instance, sol: Solution, c: int):
    """Exhaustive enumeration over every (route, position) plus the new route.

    Returns (route_index_or_None, position, delta) with the solver's declared
    tie-break: lowest route, then lowest position, new route last.
    """
    base = oracle_solution_cost(inst, sol)
    best = None
    best_snap = math.inf
    for ri, route in enumerate(sol.routes):
        for pos in range(len(route) + 1):
            trial = route[:pos] + [c] + route[pos:]
            verdict, _ = oracle_check_route(inst, trial)
            if verdict != "feasible":
                continue
            delta = oracle_route_cost(inst, trial) - oracle_route_cost(inst, route)
            if _snap(delta) < best_snap:
                best_snap = _snap(delta)
                best = (ri, pos, delta)
    verdict, _ = oracle_check_route(inst, [c])
    if verdict == "feasible":
        delta = oracle_route_cost(inst, [c])
        if _snap(delta) < best_snap:
            best = (None, 0, delta)
    return best, base


def make_instance(capacity, depot, customers, t_max):
    """Compact instance builder for hand-written fixtures.

    depot = (x, y); customers = list of (x, y, demand, tw_start, tw_end, service).
    """
    nodes = [Node(0, depot[0], depot[1], 0.0, 0.0, t_max, 0.0)]
    for i, (x, y, q, s, e, svc) in enumerate(customers, start=1):
        nodes.append(Node(i, x, y, q, s, e, svc))
    return Instance(nodes, capacity)


def random_test_instance(rng, n, tight=False):
    """Random instance for oracle tests; windows may be arbitrarily tight, so
    feasibility of any given route is not guaranteed."""
    t_max = float(rng.uniform(200.0, 1000.0))
    customers = []
    for _ in range(n):
        x, y = rng.uniform(0, 100, size=2)
        q = float(rng.uniform(1, 40))
        if tight and rng.random() < 0.7:
            start = float(rng.uniform(0, t_max * 0.9))
            end = min(t_max, start + float(rng.uniform(5, t_max * 0.3)))
        else:
            start, end = 0.0, t_max
        svc = float(rng.uniform(0, 20))
        customers.append((float(x), float(y), q, start, end, svc))
    return make_instance(float(rng.uniform(60, 200)), (50.0, 50.0), customers, t_max)


def random_partial_solution(rng, inst, n_pool=1):
    """Random feasible partial solution leaving n_pool customers in the pool."""
    from dprlns.model import check_route

    ids = list(inst.customer_ids)
    rng.shuffle(ids)
    pool = set(ids[:n_pool])
    routes = []
    for c in ids[n_pool:]:
        placed = False
        order = list(range(len(routes)))
        rng.shuffle(order)
        for ri in order:
            trial = routes[ri] + [c]
            if check_route(inst, trial).feasible:
                routes[ri] = trial
                placed = True
                break
        if not placed:
            if check_route(inst, [c]).feasible:
                routes.append([c])
            else:
                pool.add(c)  # unservable alone under these random windows
    return Solution(routes, pool)
