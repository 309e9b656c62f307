"""Differentiable twin of the solver's policy network, plus the critic.

``reference_forward`` reproduces ``dprlns.hrgcn.hrgcn_forward`` in torch
(float64) so gradients can flow through the same computation the solver runs
natively; the two implementations are held to 1e-4 relative agreement by the
test suite.  ``export_weights`` writes ``dprlns-weights/1`` files byte-
compatible with the solver's own serializer.
"""

from __future__ import annotations

import torch
import torch.nn as nn

from dprlns.hrgcn import (
    BETA_EPS, GraphArcs, WEIGHTS_FORMAT_TAG, WeightBundle, expected_shapes,
    init_bundle,
)


def _pkey(name: str) -> str:
    # ParameterDict keys cannot contain dots; keep a reversible mapping
    return name.replace(".", "__")


class Actor(nn.Module):
    """Holds the policy weights under the bundle's tensor names."""

    def __init__(self, bundle: WeightBundle):
        super().__init__()
        bundle.validate()
        self.n_a, self.n_h, self.k = bundle.n_a, bundle.n_h, bundle.k
        self.params = nn.ParameterDict({
            _pkey(name): nn.Parameter(torch.as_tensor(t, dtype=torch.float64).clone())
            for name, t in bundle.tensors.items()
        })

    @classmethod
    def fresh(cls, rng, n_a: int, n_h: int | None = None, k: int = 10) -> "Actor":
        return cls(init_bundle(rng, n_a=n_a, n_h=n_h, k=k))

    def tensor(self, name: str) -> torch.Tensor:
        return self.params[_pkey(name)]

    def to_bundle(self) -> WeightBundle:
        tensors = {name: self.tensor(name).detach().numpy().copy()
                   for name in expected_shapes(self.n_a, self.n_h)}
        bundle = WeightBundle(tensors, n_a=self.n_a, n_h=self.n_h, k=self.k)
        bundle.validate()
        return bundle


class Critic(nn.Module):
    """Value head on the recurrent hidden state: n_h -> N_C -> N_C -> 1, ReLU."""

    def __init__(self, n_h: int, n_c: int):
        super().__init__()
        self.net = nn.Sequential(
            nn.Linear(n_h, n_c), nn.ReLU(),
            nn.Linear(n_c, n_c), nn.ReLU(),
            nn.Linear(n_c, 1),
        ).double()

    def forward(self, hidden: torch.Tensor) -> torch.Tensor:
        if hidden.shape[-1] != self.net[0].in_features:
            raise ValueError(f"hidden size {hidden.shape[-1]}, "
                             f"expected {self.net[0].in_features}")
        return self.net(hidden).squeeze(-1)


def _gcn(f: torch.Tensor, arcs: torch.Tensor, w_self: torch.Tensor,
         w_nbr: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    if f.shape[1] != w_self.shape[1]:
        raise ValueError(f"feature dim {f.shape[1]} vs weight {tuple(w_self.shape)}")
    agg = torch.zeros_like(f)
    if arcs.numel():
        agg = agg.index_add(0, arcs[:, 1], f[arcs[:, 0]])
        indeg = torch.zeros(f.shape[0], dtype=f.dtype).index_add(
            0, arcs[:, 1], torch.ones(arcs.shape[0], dtype=f.dtype))
        agg = agg / indeg.clamp(min=1.0).unsqueeze(1)
    return torch.relu(f @ w_self.T + agg @ w_nbr.T + b)


def _gru(x: torch.Tensor, h: torch.Tensor, w_ih: torch.Tensor, w_hh: torch.Tensor,
         b_ih: torch.Tensor, b_hh: torch.Tensor) -> torch.Tensor:
    gi = x @ w_ih.T + b_ih
    gh = h @ w_hh.T + b_hh
    i_r, i_z, i_n = gi.chunk(3)
    h_r, h_z, h_n = gh.chunk(3)
    r = torch.sigmoid(i_r + h_r)
    z = torch.sigmoid(i_z + h_z)
    n = torch.tanh(i_n + r * h_n)
    return (1.0 - z) * n + z * h


def reference_forward(emb: torch.Tensor, arcs: GraphArcs, hidden: torch.Tensor,
                      prev_anchor: torch.Tensor, actor: Actor) -> dict:
    """Same contract as the solver's forward pass: anchor probabilities with
    the depot masked out, per-node Beta(alpha, beta) parameters, updated GRU
    hidden state and the gated node features."""
    t = actor.tensor
    a_knn = torch.as_tensor(arcs.knn, dtype=torch.int64)
    a_fwd = torch.as_tensor(arcs.route_fwd, dtype=torch.int64)
    a_inv = torch.as_tensor(arcs.route_inv, dtype=torch.int64)

    h0 = _gcn(emb, a_knn, t("gcn0.w_self"), t("gcn0.w_nbr"), t("gcn0.b"))
    h1 = _gcn(h0, a_fwd, t("route1.w_self"), t("route1.w_nbr"), t("route1.b"))
    h2 = _gcn(h1, a_fwd, t("route2.w_self"), t("route2.w_nbr"), t("route2.b")) + h0
    h3 = _gcn(h2, a_knn, t("near.w_self"), t("near.w_nbr"), t("near.b"))
    h4 = _gcn(h3, a_inv, t("route_inv1.w_self"), t("route_inv1.w_nbr"), t("route_inv1.b"))
    h5 = _gcn(h4, a_inv, t("route_inv2.w_self"), t("route_inv2.w_nbr"), t("route_inv2.b")) + h3

    new_hidden = _gru(prev_anchor, hidden, t("gru.weight_ih"), t("gru.weight_hh"),
                      t("gru.bias_ih"), t("gru.bias_hh"))
    gate = torch.sigmoid(new_hidden @ t("gate.weight").T + t("gate.bias"))
    h6 = h5 * gate

    logits = (h6 @ t("anchor_head.weight").T + t("anchor_head.bias")).ravel()
    # softmax over customers only; an explicit zero for the depot keeps
    # gradients finite (masking with -inf produces 0*inf terms in backward)
    probs = torch.cat([torch.zeros(1, dtype=logits.dtype),
                       torch.softmax(logits[1:], dim=0)])

    alpha = torch.nn.functional.elu(
        (h6 @ t("alpha_head.weight").T + t("alpha_head.bias")).ravel()) + 1.0 + BETA_EPS
    beta = torch.nn.functional.elu(
        (h6 @ t("beta_head.weight").T + t("beta_head.bias")).ravel()) + 1.0 + BETA_EPS

    for name, arr in (("probs", probs), ("alpha", alpha), ("beta", beta),
                      ("hidden", new_hidden)):
        if torch.isnan(arr).any():
            raise FloatingPointError(f"NaN in reference forward ({name})")

    return {"anchor_probs": probs, "alpha": alpha, "beta": beta,
            "hidden": new_hidden, "node_features": h6}


def export_weights(bundle: WeightBundle, path: str) -> None:
    """Write a ``dprlns-weights/1`` file byte-compatible with the solver's
    serializer (same ordering and repr-based float formatting)."""
    bundle.validate()
    lines = [WEIGHTS_FORMAT_TAG,
             f"meta n_a {bundle.n_a}", f"meta n_h {bundle.n_h}", f"meta k {bundle.k}"]
    for name in sorted(bundle.tensors):
        t = bundle.tensors[name]
        lines.append(f"tensor {name} " + " ".join(str(d) for d in t.shape))
        rows = t.reshape(-1, t.shape[-1]) if t.ndim > 1 else [t]
        for row in rows:
            lines.append(" ".join(repr(float(v)) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
