"""Instance parsing, generation and serialization.

Supports the published Solomon / Gehring & Homberger text layout, a native
self-describing format tagged ``dprlns-instance/1``, and a seeded synthetic
generator (uniform or clustered positions, truncated-normal demands, shared
per-instance service time, random time windows).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Instance, Node, VrpError

INSTANCE_FORMAT_TAG = "dprlns-instance/1"

SYNTHETIC_CAPACITY = 200.0
MAP_SIZE = 100.0
CLUSTER_SIGMA = 5.0


class ParseError(VrpError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _numeric_tokens(line: str):
    toks = line.split()
    try:
        return [float(t) for t in toks]
    except ValueError:
        return None


def parse_solomon(text: str) -> Instance:
    """Parse the Solomon / G&H benchmark layout.

    The VEHICLE NUMBER field is ignored (the solver runs an unbounded fleet);
    capacity comes from the VEHICLE section and t_max from the depot due date.
    """
    lines = text.splitlines()

    def find_section(name: str) -> int:
        for k, ln in enumerate(lines):
            if ln.strip().upper().startswith(name):
                return k
        raise ParseError(f"missing {name} section", len(lines))

    veh = find_section("VEHICLE")
    capacity = None
    for k in range(veh + 1, len(lines)):
        vals = _numeric_tokens(lines[k])
        if vals and len(vals) >= 2:
            capacity = vals[1]
            break
    if capacity is None:
        raise ParseError("no NUMBER/CAPACITY row after VEHICLE", veh + 1)

    cust = find_section("CUSTOMER")
    rows = []
    for k in range(cust + 1, len(lines)):
        if not lines[k].strip():
            continue
        vals = _numeric_tokens(lines[k])
        if vals is None:
            if rows:
                raise ParseError("non-numeric field in customer table", k + 1)
            continue  # still in the column header
        if len(vals) < 7:
            raise ParseError("customer row needs 7 columns", k + 1)
        rows.append((k + 1, vals))
    if not rows:
        raise ParseError("empty customer table", cust + 1)

    nodes = []
    for lineno, (cid, x, y, demand, ready, due, service) in ((ln, v[:7]) for ln, v in rows):
        if int(cid) != len(nodes):
            raise ParseError(f"expected customer id {len(nodes)}, got {cid:g}", lineno)
        if len(nodes) == 0 and demand != 0:
            raise ParseError("depot has nonzero demand", lineno)
        try:
            nodes.append(Node(int(cid), x, y, demand, ready, due, service))
        except ValueError as e:
            raise ParseError(str(e), lineno) from None
    try:
        return Instance(nodes, capacity)
    except ValueError as e:
        raise ParseError(str(e), rows[0][0]) from None


def take_prefix(inst: Instance, n: int) -> Instance:
    """Keep the depot plus customers 1..n; capacity and t_max unchanged."""
    if not 1 <= n <= inst.n_customers:
        raise ValueError(f"n must be in [1, {inst.n_customers}], got {n}")
    return Instance(inst.nodes[: n + 1], inst.capacity)


def dump_instance(inst: Instance) -> str:
    out = [INSTANCE_FORMAT_TAG, f"capacity {inst.capacity!r}", f"nodes {len(inst.nodes)}"]
    for nd in inst.nodes:
        out.append(f"{nd.id} {nd.x!r} {nd.y!r} {nd.demand!r} {nd.tw_start!r} {nd.tw_end!r} {nd.service!r}")
    return "\n".join(out) + "\n"


def load_instance(text: str) -> Instance:
    lines = text.splitlines()
    if not lines or lines[0].strip() != INSTANCE_FORMAT_TAG:
        raise ParseError(f"expected format tag {INSTANCE_FORMAT_TAG}", 1)
    try:
        capacity = float(lines[1].split()[1])
        count = int(lines[2].split()[1])
    except (IndexError, ValueError):
        raise ParseError("bad header", 2) from None
    nodes = []
    for k in range(count):
        lineno = 4 + k
        try:
            toks = lines[3 + k].split()
            nodes.append(Node(int(toks[0]), *[float(t) for t in toks[1:7]]))
        except (IndexError, ValueError) as e:
            raise ParseError(f"bad node row ({e})", lineno) from None
    return Instance(nodes, capacity)


def read_instance_file(path: str) -> Instance:
    """Load an instance from disk, dispatching on the native format tag."""
    with open(path) as fh:
        text = fh.read()
    first = text.splitlines()[0].strip() if text.strip() else ""
    if first == INSTANCE_FORMAT_TAG:
        return load_instance(text)
    return parse_solomon(text)


@dataclass
class GeneratorParams:
    n_customers: int
    p_start: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.n_customers < 1:
            raise ValueError("n_customers must be >= 1")
        if not 0.0 <= self.p_start <= 1.0:
            raise ValueError("p_start must be in [0, 1]")


def sample_demands(rng: np.random.Generator, n: int) -> np.ndarray:
    """Normal(20, sd 11) demands, resampled from U[5, 36] outside [1, 45]."""
    d = rng.normal(20.0, 11.0, size=n)
    bad = (d < 1.0) | (d > 45.0)
    d[bad] = rng.uniform(5.0, 36.0, size=int(bad.sum()))
    return d


def generate_synthetic(params: GeneratorParams) -> Instance:
    """Seeded synthetic CVRPTW instance.

    Positions are uniform on a 100x100 map or clustered (fair coin); demands
    are Normal(20, sd 11) resampled from U[5, 36] outside [1, 45]; one service
    time per instance, integer in [10, 100]; windows are unconstrained with
    probability p_start, otherwise a random [start, start+gap] inside
    [0, t_max].
    """
    rng = np.random.default_rng(params.seed)
    n = params.n_customers

    t_max = float(rng.uniform(600.0, 10000.0))
    service = float(rng.integers(10, 101))

    if rng.random() < 0.5:
        pos = rng.uniform(0.0, MAP_SIZE, size=(n + 1, 2))
    else:
        hi = max(6, math.ceil(n / 5))
        n_clusters = int(rng.integers(5, hi))
        depot = rng.uniform(0.0, MAP_SIZE, size=(1, 2))
        centers = rng.uniform(0.0, MAP_SIZE, size=(n_clusters, 2))
        members = centers[rng.integers(0, n_clusters, size=n)]
        pos = np.vstack([depot, np.clip(members + rng.normal(0.0, CLUSTER_SIGMA, size=(n, 2)), 0.0, MAP_SIZE)])

    demands = sample_demands(rng, n)
    nodes = [Node(0, float(pos[0, 0]), float(pos[0, 1]), 0.0, 0.0, t_max, 0.0)]
    for i in range(1, n + 1):
        d = float(demands[i - 1])
        if rng.random() < params.p_start:
            start, end = 0.0, t_max
        else:
            # the gap draw is capped at t_max so the window always fits the
            # horizon, and the start is clamped so the customer stays
            # serviceable on a route of its own
            gap = float(rng.uniform(10.0, min(1000.0, t_max)))
            start = float(rng.uniform(0.0, t_max - gap))
            reach = float(np.hypot(pos[i, 0] - pos[0, 0], pos[i, 1] - pos[0, 1]))
            # 1e-6 margins absorb float rounding in start + gap sums
            lo = max(0.0, reach - gap + 1e-6)
            hi = min(t_max - gap, t_max - service - reach - 1e-6)
            start = min(max(start, lo), hi)
            end = start + gap
        nodes.append(Node(i, float(pos[i, 0]), float(pos[i, 1]), d, start, end, service))
    return Instance(nodes, SYNTHETIC_CAPACITY)
