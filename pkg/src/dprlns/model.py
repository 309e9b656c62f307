"""CVRPTW instance and solution model.

An instance is a depot (node 0) plus customers with planar coordinates,
demands, service time windows and service durations.  A solution is a set of
routes (ordered customer lists, depot implicit at both ends) plus a pool of
currently-removed customers.  Travel time equals Euclidean distance (unit
speed) and vehicles may wait at a customer until its window opens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class VrpError(Exception):
    """Base class for model-level errors."""


class IncompleteSolutionError(VrpError):
    """Operation requires a complete solution but the pool is nonempty."""


class UnknownCustomerError(VrpError):
    """A customer id does not exist or is not where the operation expects it."""


class ViolationKind(Enum):
    CAPACITY_EXCEEDED = "capacity_exceeded"
    TIME_WINDOW_MISSED = "time_window_missed"
    DEPOT_RETURN_LATE = "depot_return_late"


@dataclass(frozen=True)
class Node:
    id: int
    x: float
    y: float
    demand: float
    tw_start: float
    tw_end: float
    service: float

    def __post_init__(self):
        if self.tw_start > self.tw_end:
            raise ValueError(f"node {self.id}: tw_start {self.tw_start} > tw_end {self.tw_end}")
        if self.demand < 0:
            raise ValueError(f"node {self.id}: negative demand")
        if self.id == 0 and (self.demand != 0 or self.service != 0):
            raise ValueError("depot must have zero demand and zero service time")


class Instance:
    """Immutable CVRPTW instance; node 0 is the depot.

    Coordinate/demand/window columns are mirrored into numpy arrays and a
    dense Euclidean distance matrix is precomputed, since the insertion scans
    hit them in tight loops.
    """

    def __init__(self, nodes: list[Node], capacity: float):
        if not nodes or nodes[0].id != 0:
            raise ValueError("instance needs node 0 (the depot) first")
        if len(nodes) < 2:
            raise ValueError("instance needs at least one customer")
        if [n.id for n in nodes] != list(range(len(nodes))):
            raise ValueError("node ids must be 0..N in order")
        if capacity <= 0:
            raise ValueError("capacity must be positive")
        self.nodes = list(nodes)
        self.capacity = float(capacity)
        self.t_max = float(nodes[0].tw_end)
        if nodes[0].tw_start != 0:
            raise ValueError("depot window must start at 0")
        for n in nodes[1:]:
            if n.tw_start < 0 or n.tw_end > self.t_max:
                raise ValueError(f"node {n.id}: window outside [0, t_max]")

        self.xs = np.array([n.x for n in nodes], dtype=np.float64)
        self.ys = np.array([n.y for n in nodes], dtype=np.float64)
        self.demand = np.array([n.demand for n in nodes], dtype=np.float64)
        self.tw_start = np.array([n.tw_start for n in nodes], dtype=np.float64)
        self.tw_end = np.array([n.tw_end for n in nodes], dtype=np.float64)
        self.service = np.array([n.service for n in nodes], dtype=np.float64)
        dx = self.xs[:, None] - self.xs[None, :]
        dy = self.ys[:, None] - self.ys[None, :]
        self.dist_matrix = np.sqrt(dx * dx + dy * dy)

    @property
    def n_customers(self) -> int:
        return len(self.nodes) - 1

    @property
    def customer_ids(self) -> range:
        return range(1, len(self.nodes))

    def dist(self, i: int, j: int) -> float:
        return float(self.dist_matrix[i, j])


@dataclass
class Solution:
    """Routes partitioning the customers, plus the pool of removed ones."""

    routes: list[list[int]] = field(default_factory=list)
    pool: set[int] = field(default_factory=set)

    def copy(self) -> "Solution":
        return Solution([list(r) for r in self.routes], set(self.pool))

    def visited(self) -> set[int]:
        out: set[int] = set()
        for r in self.routes:
            out.update(r)
        return out

    def normalize(self) -> None:
        """Drop empty routes in place."""
        self.routes = [r for r in self.routes if r]

    def is_complete(self) -> bool:
        return not self.pool

    def route_of(self, customer: int) -> int:
        for ri, r in enumerate(self.routes):
            if customer in r:
                return ri
        raise UnknownCustomerError(f"customer {customer} is not on any route")


@dataclass
class Schedule:
    """Forward-recursion timing of one route (parallel to its customer list)."""

    arrival: list[float]
    wait: list[float]
    departure: list[float]
    return_time: float


@dataclass
class Feasible:
    schedule: Schedule
    feasible: bool = True


@dataclass
class Violation:
    kind: ViolationKind
    node: int
    feasible: bool = False


def route_cost(inst: Instance, route: list[int]) -> float:
    if not route:
        return 0.0
    d = inst.dist_matrix
    c = d[0, route[0]]
    for u, v in zip(route, route[1:]):
        c += d[u, v]
    c += d[route[-1], 0]
    return float(c)


def solution_cost(inst: Instance, sol: Solution) -> float:
    """Total Euclidean length of all routes, depot legs included."""
    if sol.pool:
        raise IncompleteSolutionError(f"{len(sol.pool)} customers still in the pool")
    return sum(route_cost(inst, r) for r in sol.routes)


def check_route(inst: Instance, route: list[int]):
    """Check one route by forward recursion from the depot at time 0.

    Returns Feasible(schedule) or Violation(kind, node) for the first
    offending node; at each node capacity is checked before the time window.
    """
    if not route:
        raise ValueError("route is empty")
    n = len(inst.nodes)
    load = 0.0
    t = 0.0
    prev = 0
    arrival, wait, departure = [], [], []
    for c in route:
        if not 1 <= c < n:
            raise UnknownCustomerError(f"unknown customer id {c}")
        load += inst.demand[c]
        arr = t + inst.dist_matrix[prev, c]
        if load > inst.capacity:
            return Violation(ViolationKind.CAPACITY_EXCEEDED, c)
        if arr > inst.tw_end[c]:
            return Violation(ViolationKind.TIME_WINDOW_MISSED, c)
        w = max(0.0, inst.tw_start[c] - arr)
        dep = arr + w + inst.service[c]
        arrival.append(float(arr))
        wait.append(float(w))
        departure.append(float(dep))
        t = dep
        prev = c
    ret = t + inst.dist_matrix[prev, 0]
    if ret > inst.t_max:
        return Violation(ViolationKind.DEPOT_RETURN_LATE, 0)
    return Feasible(Schedule(arrival, wait, departure, float(ret)))


def solution_feasible(inst: Instance, sol: Solution) -> bool:
    return all(check_route(inst, r).feasible for r in sol.routes if r)


def remove_customers(sol: Solution, ids) -> Solution:
    """Move the given visited customers into the pool; emptied routes are dropped."""
    ids = set(ids)
    if 0 in ids:
        raise UnknownCustomerError("the depot cannot be removed")
    clash = ids & sol.pool
    if clash:
        raise UnknownCustomerError(f"already in pool: {sorted(clash)}")
    out = sol.copy()
    found = set()
    for r in out.routes:
        kept = [c for c in r if c not in ids]
        found.update(c for c in r if c in ids)
        r[:] = kept
    missing = ids - found
    if missing:
        raise UnknownCustomerError(f"not visited: {sorted(missing)}")
    out.pool |= ids
    out.normalize()
    return out


def check_partition(inst: Instance, sol: Solution) -> None:
    """Raise if routes + pool do not partition the customer set exactly."""
    seen: list[int] = []
    for r in sol.routes:
        seen.extend(r)
    if len(seen) != len(set(seen)):
        raise VrpError("duplicate customer across routes")
    if set(seen) & sol.pool:
        raise VrpError("customer both visited and pooled")
    allc = set(seen) | sol.pool
    if allc != set(inst.customer_ids):
        raise VrpError("routes + pool do not cover the customer set")
