"""Per-iteration removal policies: node embeddings, anchor and coefficient
sampling, and the uniform random baseline.

A policy looks at the complete current solution and yields, for every node,
the probability of being picked as an anchor plus Beta(alpha, beta)
parameters from which the node's route coefficient is sampled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Instance, IncompleteSolutionError, Solution

EMBEDDING_DIM = 10


@dataclass
class PolicyOutput:
    anchor_probs: np.ndarray          # per node, depot mass 0, sums to 1
    alpha: np.ndarray                 # per node, > 0 for customers
    beta: np.ndarray
    hidden: object = None             # opaque recurrent state, if any
    value_hint: float | None = None
    node_features: np.ndarray | None = None  # final per-node features (neural policy)


def build_embeddings(inst: Instance, sol: Solution) -> np.ndarray:
    """Per-node feature rows, ordered by node id.

    Columns: x, y, demand, tw_start, tw_end, service, demand accumulated
    along the route up to the node, distance accumulated up to the node
    (return leg excluded), total route demand, total route distance (return
    leg included).  Demand columns are scaled by vehicle capacity, everything
    else by the depot horizon t_max.
    """
    if sol.pool:
        raise IncompleteSolutionError("embeddings need a complete solution")
    n = len(inst.nodes)
    q = inst.capacity
    tm = inst.t_max
    emb = np.zeros((n, EMBEDDING_DIM), dtype=np.float64)
    emb[:, 0] = inst.xs / tm
    emb[:, 1] = inst.ys / tm
    emb[:, 2] = inst.demand / q
    emb[:, 3] = inst.tw_start / tm
    emb[:, 4] = inst.tw_end / tm
    emb[:, 5] = inst.service / tm
    d = inst.dist_matrix
    for route in sol.routes:
        cum_q = 0.0
        cum_d = 0.0
        prev = 0
        for c in route:
            cum_q += inst.demand[c]
            cum_d += d[prev, c]
            emb[c, 6] = cum_q / q
            emb[c, 7] = cum_d / tm
            prev = c
        total_d = cum_d + d[prev, 0]
        for c in route:
            emb[c, 8] = cum_q / q
            emb[c, 9] = total_d / tm
    return emb


def sample_anchors(out: PolicyOutput, k: int, rng: np.random.Generator) -> list[int]:
    """Draw k distinct anchors sequentially, proportional to anchor_probs."""
    probs = np.array(out.anchor_probs, dtype=np.float64)
    positive = int(np.count_nonzero(probs > 0))
    if k < 1 or k > positive:
        raise ValueError(f"k must be in [1, {positive}]")
    anchors = []
    for _ in range(k):
        total = probs.sum()
        if total <= 0:
            raise ValueError("degenerate anchor distribution")
        pick = int(rng.choice(probs.size, p=probs / total))
        anchors.append(pick)
        probs[pick] = 0.0
    return anchors


def sample_coefficient(alpha: float, beta: float, rng: np.random.Generator) -> float:
    if alpha <= 0 or beta <= 0:
        raise ValueError("Beta parameters must be positive")
    return float(rng.beta(alpha, beta))


def sample_coefficients(out: PolicyOutput, inst: Instance, rng: np.random.Generator) -> dict[int, float]:
    """One coefficient draw per customer from its Beta(alpha_i, beta_i)."""
    return {
        c: sample_coefficient(float(out.alpha[c]), float(out.beta[c]), rng)
        for c in inst.customer_ids
    }


def random_policy(inst: Instance, sol: Solution) -> PolicyOutput:
    """Uniform anchors over customers, Beta(1, 1) coefficients everywhere."""
    n = len(inst.nodes)
    probs = np.full(n, 1.0 / (n - 1), dtype=np.float64)
    probs[0] = 0.0
    return PolicyOutput(probs, np.ones(n), np.ones(n))
