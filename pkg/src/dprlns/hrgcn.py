"""Native forward pass of the recurrent graph-convolutional anchor policy.

The network stacks graph convolutions over a k-nearest-neighbor graph and
over the current routes (forward and reversed), with residual connections,
then gates the node features with a GRU state carried across iterations.
Heads produce anchor probabilities (softmax, depot masked) and per-node
Beta(alpha, beta) parameters for the route coefficients.

Weights travel in a portable text bundle tagged ``dprlns-weights/1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Instance, Solution, VrpError
from .policy import EMBEDDING_DIM, PolicyOutput, build_embeddings

WEIGHTS_FORMAT_TAG = "dprlns-weights/1"
DEFAULT_N_A = 128
DEFAULT_KNN = 10
BETA_EPS = 1e-6


class BundleError(VrpError):
    """Weight bundle is malformed or its shapes do not match the schema."""


@dataclass
class GraphArcs:
    knn: np.ndarray        # (E, 2) arcs i -> j, j among the k nearest of i
    route_fwd: np.ndarray  # (E, 2) consecutive customers in visit order
    route_inv: np.ndarray  # route_fwd reversed


def build_arcs(inst: Instance, sol: Solution, k: int) -> GraphArcs:
    n = len(inst.nodes)
    kk = min(k, n - 1)
    ids = np.arange(n)
    knn = []
    for i in range(n):
        order = np.lexsort((ids, inst.dist_matrix[i]))
        order = order[order != i][:kk]
        knn.extend((i, int(j)) for j in order)
    fwd = []
    for route in sol.routes:
        fwd.extend(zip(route, route[1:]))
    knn_a = np.array(knn, dtype=np.int64).reshape(-1, 2)
    fwd_a = np.array(fwd, dtype=np.int64).reshape(-1, 2)
    return GraphArcs(knn_a, fwd_a, fwd_a[:, ::-1].copy())


def _gcn_shapes(name: str, d_in: int, d_out: int) -> dict:
    return {
        f"{name}.w_self": (d_out, d_in),
        f"{name}.w_nbr": (d_out, d_in),
        f"{name}.b": (d_out,),
    }


def expected_shapes(n_a: int, n_h: int) -> dict:
    shapes = {}
    shapes.update(_gcn_shapes("gcn0", EMBEDDING_DIM, n_a))
    for name in ("route1", "route2", "near", "route_inv1", "route_inv2"):
        shapes.update(_gcn_shapes(name, n_a, n_a))
    shapes.update({
        "gru.weight_ih": (3 * n_h, n_a),
        "gru.weight_hh": (3 * n_h, n_h),
        "gru.bias_ih": (3 * n_h,),
        "gru.bias_hh": (3 * n_h,),
        "gate.weight": (n_a, n_h),
        "gate.bias": (n_a,),
        "anchor_head.weight": (1, n_a),
        "anchor_head.bias": (1,),
        "alpha_head.weight": (1, n_a),
        "alpha_head.bias": (1,),
        "beta_head.weight": (1, n_a),
        "beta_head.bias": (1,),
    })
    return shapes


@dataclass
class WeightBundle:
    tensors: dict[str, np.ndarray]
    n_a: int = DEFAULT_N_A
    n_h: int = DEFAULT_N_A
    k: int = DEFAULT_KNN

    def validate(self) -> None:
        want = expected_shapes(self.n_a, self.n_h)
        missing = sorted(set(want) - set(self.tensors))
        extra = sorted(set(self.tensors) - set(want))
        if missing or extra:
            raise BundleError(f"missing tensors {missing}, unexpected {extra}")
        for name, shape in want.items():
            got = self.tensors[name].shape
            if got != shape:
                raise BundleError(f"{name}: shape {got}, expected {shape}")


def init_bundle(rng: np.random.Generator, n_a: int = DEFAULT_N_A,
                n_h: int | None = None, k: int = DEFAULT_KNN) -> WeightBundle:
    """Random bundle with small weights (untrained neural policy, tests)."""
    n_h = n_a if n_h is None else n_h
    tensors = {}
    for name, shape in expected_shapes(n_a, n_h).items():
        fan_in = shape[-1] if len(shape) > 1 else shape[0]
        tensors[name] = rng.normal(0.0, 1.0 / np.sqrt(fan_in), size=shape)
    bundle = WeightBundle(tensors, n_a=n_a, n_h=n_h, k=k)
    bundle.validate()
    return bundle


def save_bundle(bundle: WeightBundle, path: str) -> None:
    bundle.validate()
    with open(path, "w") as fh:
        fh.write(WEIGHTS_FORMAT_TAG + "\n")
        fh.write(f"meta n_a {bundle.n_a}\n")
        fh.write(f"meta n_h {bundle.n_h}\n")
        fh.write(f"meta k {bundle.k}\n")
        for name in sorted(bundle.tensors):
            t = bundle.tensors[name]
            dims = " ".join(str(d) for d in t.shape)
            fh.write(f"tensor {name} {dims}\n")
            for row in t.reshape(-1, t.shape[-1]) if t.ndim > 1 else [t]:
                fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def load_bundle(path: str) -> WeightBundle:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != WEIGHTS_FORMAT_TAG:
        raise BundleError(f"expected format tag {WEIGHTS_FORMAT_TAG}")
    meta = {"n_a": DEFAULT_N_A, "n_h": DEFAULT_N_A, "k": DEFAULT_KNN}
    tensors: dict[str, np.ndarray] = {}
    i = 1
    while i < len(lines):
        toks = lines[i].split()
        if not toks:
            i += 1
            continue
        if toks[0] == "meta":
            meta[toks[1]] = int(toks[2])
            i += 1
        elif toks[0] == "tensor":
            name = toks[1]
            shape = tuple(int(d) for d in toks[2:])
            n_rows = int(np.prod(shape[:-1])) if len(shape) > 1 else 1
            rows = []
            for r in range(n_rows):
                rows.append([float(v) for v in lines[i + 1 + r].split()])
            tensors[name] = np.array(rows, dtype=np.float64).reshape(shape)
            i += 1 + n_rows
        else:
            raise BundleError(f"unexpected line {i + 1}: {lines[i][:40]!r}")
    bundle = WeightBundle(tensors, n_a=meta["n_a"], n_h=meta["n_h"], k=meta["k"])
    bundle.validate()
    return bundle


@dataclass
class RecurrentState:
    hidden: np.ndarray       # (n_h,)
    prev_anchor: np.ndarray  # (n_a,) final embedding of the last anchors


def zero_state(bundle: WeightBundle) -> RecurrentState:
    return RecurrentState(np.zeros(bundle.n_h), np.zeros(bundle.n_a))


def _relu(x):
    return np.maximum(x, 0.0)


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def _elu(x):
    return np.where(x > 0, x, np.expm1(np.minimum(x, 0.0)))


def gcn_layer(features: np.ndarray, arcs: np.ndarray, w_self: np.ndarray,
              w_nbr: np.ndarray, b: np.ndarray) -> np.ndarray:
    """ReLU(W_self f_i + W_nbr mean_{j -> i} f_j + b); no in-arcs => zero mean."""
    if features.shape[1] != w_self.shape[1]:
        raise ValueError(f"feature dim {features.shape[1]} vs weight {w_self.shape}")
    agg = np.zeros_like(features)
    if arcs.size:
        np.add.at(agg, arcs[:, 1], features[arcs[:, 0]])
        indeg = np.zeros(features.shape[0])
        np.add.at(indeg, arcs[:, 1], 1.0)
        agg = agg / np.maximum(indeg, 1.0)[:, None]
    return _relu(features @ w_self.T + agg @ w_nbr.T + b)


def gru_cell(x: np.ndarray, h: np.ndarray, w_ih: np.ndarray, w_hh: np.ndarray,
             b_ih: np.ndarray, b_hh: np.ndarray) -> np.ndarray:
    """Standard GRU cell, gate order (reset, update, new)."""
    gi = x @ w_ih.T + b_ih
    gh = h @ w_hh.T + b_hh
    i_r, i_z, i_n = np.split(gi, 3)
    h_r, h_z, h_n = np.split(gh, 3)
    r = _sigmoid(i_r + h_r)
    z = _sigmoid(i_z + h_z)
    n = np.tanh(i_n + r * h_n)
    return (1.0 - z) * n + z * h


def spatial_hierarchy(emb: np.ndarray, arcs: GraphArcs, bundle: WeightBundle):
    """The six-stage GCN stack; returns (h0 .. h5) with both residual sums."""
    t = bundle.tensors

    def gcn(name, feats, arc_set):
        return gcn_layer(feats, arc_set, t[f"{name}.w_self"], t[f"{name}.w_nbr"], t[f"{name}.b"])

    h0 = gcn("gcn0", emb, arcs.knn)
    h1 = gcn("route1", h0, arcs.route_fwd)
    h2 = gcn("route2", h1, arcs.route_fwd) + h0
    h3 = gcn("near", h2, arcs.knn)
    h4 = gcn("route_inv1", h3, arcs.route_inv)
    h5 = gcn("route_inv2", h4, arcs.route_inv) + h3
    return h0, h1, h2, h3, h4, h5


def hrgcn_forward(emb: np.ndarray, arcs: GraphArcs, state: RecurrentState,
                  bundle: WeightBundle) -> tuple[PolicyOutput, RecurrentState]:
    t = bundle.tensors
    h5 = spatial_hierarchy(emb, arcs, bundle)[-1]

    hidden = gru_cell(state.prev_anchor, state.hidden,
                      t["gru.weight_ih"], t["gru.weight_hh"],
                      t["gru.bias_ih"], t["gru.bias_hh"])
    gate = _sigmoid(hidden @ t["gate.weight"].T + t["gate.bias"])
    h6 = h5 * gate

    logits = (h6 @ t["anchor_head.weight"].T + t["anchor_head.bias"]).ravel()
    logits[0] = -np.inf
    shifted = logits - logits[1:].max()
    expd = np.exp(shifted)
    expd[0] = 0.0
    probs = expd / expd.sum()

    alpha = _elu((h6 @ t["alpha_head.weight"].T + t["alpha_head.bias"]).ravel()) + 1.0 + BETA_EPS
    beta = _elu((h6 @ t["beta_head.weight"].T + t["beta_head.bias"]).ravel()) + 1.0 + BETA_EPS

    for arr in (h6, probs, alpha, beta, hidden):
        if np.isnan(arr).any():
            raise FloatingPointError("NaN in forward pass")

    out = PolicyOutput(probs, alpha, beta, hidden=hidden, node_features=h6)
    return out, RecurrentState(hidden, state.prev_anchor.copy())


def advance_state(state: RecurrentState, out: PolicyOutput, anchors: list[int]) -> RecurrentState:
    """Write the sampled anchors' mean final embedding back into the state."""
    prev = out.node_features[anchors].mean(axis=0)
    return RecurrentState(state.hidden, prev)


class NeuralPolicy:
    """Stateful policy wrapping a weight bundle for use inside one search run."""

    def __init__(self, bundle: WeightBundle):
        bundle.validate()
        self.bundle = bundle
        self.state = zero_state(bundle)

    def reset(self) -> None:
        self.state = zero_state(self.bundle)

    def __call__(self, inst: Instance, sol: Solution) -> PolicyOutput:
        emb = build_embeddings(inst, sol)
        arcs = build_arcs(inst, sol, self.bundle.k)
        out, self.state = hrgcn_forward(emb, arcs, self.state, self.bundle)
        return out

    def observe(self, out: PolicyOutput, anchors: list[int]) -> None:
        self.state = advance_state(self.state, out, anchors)
