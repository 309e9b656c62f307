"""Clipped-ratio policy optimization over destroy-step transitions.

The total objective is -L_A + 0.5 * L_C - 0.01 * L_E, where L_A is the
clipped surrogate with a one-step TD advantage, L_C is the critic's MSE
against the discounted return, and L_E mixes the categorical anchor entropy
with the Beta differential entropy of the coefficients the wave consulted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import torch

from dprlns.hrgcn import GraphArcs

from .model import Actor, Critic, reference_forward

_COEFF_EPS = 1e-9  # keep Beta log-densities finite at the support edges


@dataclass
class Transition:
    emb: np.ndarray
    arcs: GraphArcs
    hidden_in: np.ndarray
    prev_anchor_in: np.ndarray
    anchors: list[int]
    coeffs: dict[int, float]
    used: list[int]            # nodes whose coefficient the wave consulted
    logp: float                # joint log-probability at sampling time
    reward: float              # c_{t-1} - c_t
    value: float               # critic estimate at sampling time
    done: bool = False


def joint_log_prob(probs: torch.Tensor, alpha: torch.Tensor, beta: torch.Tensor,
                   anchors: list[int], coeffs: dict[int, float],
                   used: list[int]) -> torch.Tensor:
    """Sequential without-replacement categorical log-probability of the
    anchors plus Beta log-densities of the consulted coefficients."""
    lp = torch.zeros((), dtype=probs.dtype)
    remaining = torch.ones((), dtype=probs.dtype)
    for a in anchors:
        lp = lp + torch.log(probs[a]) - torch.log(remaining)
        remaining = remaining - probs[a]
    for c in used:
        x = min(max(coeffs[c], _COEFF_EPS), 1.0 - _COEFF_EPS)
        dist = torch.distributions.Beta(alpha[c], beta[c])
        lp = lp + dist.log_prob(torch.tensor(x, dtype=probs.dtype))
    return lp


def action_entropy(probs: torch.Tensor, alpha: torch.Tensor, beta: torch.Tensor,
                   used: list[int]) -> torch.Tensor:
    ent = torch.special.entr(probs).sum()
    for c in used:
        ent = ent + torch.distributions.Beta(alpha[c], beta[c]).entropy()
    return ent


def td_advantages(batch: list[Transition], gamma: float) -> np.ndarray:
    """One-step TD errors: delta_t = r_t + gamma * v_{t+1} - v_t."""
    deltas = np.zeros(len(batch))
    for i, tr in enumerate(batch):
        nxt = 0.0 if tr.done or i + 1 == len(batch) else batch[i + 1].value
        deltas[i] = tr.reward + gamma * nxt - tr.value
    return deltas


def discounted_returns(batch: list[Transition], gamma: float) -> np.ndarray:
    rets = np.zeros(len(batch))
    acc = 0.0
    for i in range(len(batch) - 1, -1, -1):
        if batch[i].done:
            acc = 0.0
        acc = batch[i].reward + gamma * acc
        rets[i] = acc
    return rets


def ppo_losses(batch: list[Transition], actor: Actor, critic: Critic,
               gamma: float, eps_clip: float):
    """Loss components for the current parameters over one batch."""
    if not batch:
        raise ValueError("empty transition batch")
    deltas = torch.as_tensor(td_advantages(batch, gamma))
    returns = torch.as_tensor(discounted_returns(batch, gamma))

    surr, values, entropies = [], [], []
    for tr in batch:
        out = reference_forward(torch.as_tensor(tr.emb), tr.arcs,
                                torch.as_tensor(tr.hidden_in),
                                torch.as_tensor(tr.prev_anchor_in), actor)
        lp = joint_log_prob(out["anchor_probs"], out["alpha"], out["beta"],
                            tr.anchors, tr.coeffs, tr.used)
        ratio = torch.exp(lp - tr.logp)
        delta = deltas[len(surr)]
        surr.append(torch.minimum(ratio * delta,
                                  torch.clamp(ratio, 1 - eps_clip, 1 + eps_clip) * delta))
        values.append(critic(out["hidden"]))
        entropies.append(action_entropy(out["anchor_probs"], out["alpha"],
                                        out["beta"], tr.used))

    l_a = torch.stack(surr).mean()
    l_c = ((torch.stack(values) - returns) ** 2).mean()
    l_e = torch.stack(entropies).mean()
    total = -l_a + 0.5 * l_c - 0.01 * l_e
    if torch.isnan(total):
        raise FloatingPointError(
            f"NaN loss: L_A={float(l_a)}, L_C={float(l_c)}, L_E={float(l_e)}")
    return l_a, l_c, l_e, total


def ppo_update(batch: list[Transition], actor: Actor, critic: Critic,
               optimizer: torch.optim.Optimizer, gamma: float, eps_clip: float,
               k_epoch: int) -> tuple[float, float, float, float]:
    """K_epoch passes over the batch; returns the last epoch's components."""
    last = None
    for _ in range(k_epoch):
        l_a, l_c, l_e, total = ppo_losses(batch, actor, critic, gamma, eps_clip)
        optimizer.zero_grad()
        total.backward()
        optimizer.step()
        last = (l_a.item(), l_c.item(), l_e.item(), total.item())
    return last
