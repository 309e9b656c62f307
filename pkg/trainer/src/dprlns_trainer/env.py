"""Training rollouts over the solver's own destroy/repair dynamics.

Each episode is one simulated-annealing LNS run on a synthetic instance; the
actor picks anchors and route coefficients per iteration, the solver applies
the wave-based destroy and least-cost repair, and the reward is the decrease
in the current solution cost (c_{t-1} - c_t).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from dprlns.destroy import DprRequest, dpr_destroy_detailed
from dprlns.hrgcn import GraphArcs, build_arcs
from dprlns.model import Instance, solution_cost
from dprlns.policy import PolicyOutput, build_embeddings, sample_anchors
from dprlns.repair import least_cost_repair
from dprlns.search import (
    degree_of_destruction, initial_solution, sa_accept, temperature_at,
)

from .model import Actor, Critic, reference_forward
from .ppo import Transition, joint_log_prob


@dataclass
class EpisodeStats:
    initial_cost: float
    final_cost: float
    best_cost: float
    mean_cost: float


def rollout(inst: Instance, actor: Actor, critic: Critic, rng: np.random.Generator,
            episode_len: int, n_anchors: int, t_initial: float = 100.0,
            t_final: float = 1.0) -> tuple[list[Transition], EpisodeStats]:
    current = initial_solution(inst, rng)
    cost_cur = solution_cost(inst, current)
    initial_cost = best_cost = cost_cur
    n_destroy = min(degree_of_destruction(inst.n_customers, n_anchors > 1),
                    inst.n_customers)

    hidden = torch.zeros(actor.n_h, dtype=torch.float64)
    prev_anchor = torch.zeros(actor.n_a, dtype=torch.float64)

    transitions: list[Transition] = []
    costs = []
    for k in range(episode_len):
        emb = build_embeddings(inst, current)
        arcs = build_arcs(inst, current, actor.k)
        with torch.no_grad():
            out = reference_forward(torch.as_tensor(emb), arcs, hidden,
                                    prev_anchor, actor)
            probs = out["anchor_probs"].numpy()
            alpha = out["alpha"].numpy()
            beta = out["beta"].numpy()

        pol = PolicyOutput(probs.copy(), alpha, beta)
        anchors = sample_anchors(pol, min(n_anchors, inst.n_customers), rng)
        coeffs = {c: float(rng.beta(alpha[c], beta[c])) for c in inst.customer_ids}

        req = DprRequest(anchors, coeffs, n_destroy)
        partial, _, steps = dpr_destroy_detailed(inst, current, req)
        used = [node for node, _ in steps]

        with torch.no_grad():
            logp = float(joint_log_prob(out["anchor_probs"], out["alpha"],
                                        out["beta"], anchors, coeffs, used))
            value = float(critic(out["hidden"]))

        candidate = least_cost_repair(inst, partial, rng)
        cost_cand = solution_cost(inst, candidate)
        temp = temperature_at(k, episode_len, t_initial, t_final)
        if sa_accept(cost_cand, cost_cur, temp, rng):
            current = candidate
            new_cost = cost_cand
        else:
            new_cost = cost_cur

        transitions.append(Transition(
            emb=emb, arcs=arcs,
            hidden_in=hidden.numpy().copy(), prev_anchor_in=prev_anchor.numpy().copy(),
            anchors=list(anchors), coeffs=dict(coeffs), used=used,
            logp=logp, reward=cost_cur - new_cost, value=value,
            done=(k == episode_len - 1)))

        cost_cur = new_cost
        best_cost = min(best_cost, cost_cand)
        costs.append(cost_cur)
        hidden = out["hidden"]
        prev_anchor = out["node_features"][anchors].mean(dim=0)

    stats = EpisodeStats(initial_cost, cost_cur, best_cost, float(np.mean(costs)))
    return transitions, stats
