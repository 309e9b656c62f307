"""Training driver: rollout + PPO update loop, learning-curve CSV, export.

Config files are flat ``key = value`` text; every TrainConfig field is a key.
Usage::

    dprlns-train --config cfg.txt --out weights.txt --curve curve.csv
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, fields

import numpy as np
import torch

from dprlns.io import GeneratorParams, generate_synthetic

from .env import rollout
from .model import Actor, Critic, export_weights
from .ppo import ppo_update

CURVE_HEADER = ["update", "L_A", "L_C", "L_E", "mean_cost"]


@dataclass
class TrainConfig:
    lr: float = 1e-5
    gamma: float = 0.99
    k_epoch: int = 2
    eps_clip: float = 0.2
    n_c: int = 256
    n_a: int = 128
    knn: int = 10
    n_anchors: int = 2
    episode_len: int = 50
    n_updates: int = 200
    n_min: int = 25
    n_max: int = 200
    p_start: float = 0.3
    seed: int = 0

    def __post_init__(self):
        numeric = {f.name: getattr(self, f.name) for f in fields(self)
                   if f.name not in ("seed", "p_start")}
        for name, val in numeric.items():
            if val <= 0:
                raise ValueError(f"{name} must be positive, got {val}")
        if self.eps_clip >= 1.0:
            raise ValueError("eps_clip must be < 1")
        if self.n_min > self.n_max:
            raise ValueError("n_min must be <= n_max")


def load_config(path: str) -> TrainConfig:
    kinds = {f.name: f.type for f in fields(TrainConfig)}
    kwargs = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in kinds:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            cast = float if kinds[key] in ("float", float) else int
            kwargs[key] = cast(val)
    return TrainConfig(**kwargs)


def train(cfg: TrainConfig, initial_actor: Actor | None = None,
          log=None) -> tuple[Actor, Critic, list[tuple]]:
    """Run cfg.n_updates rollout+update steps; returns the trained actor,
    critic and learning-curve rows (update, L_A, L_C, L_E, mean_cost)."""
    torch.manual_seed(cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    actor = initial_actor or Actor.fresh(np.random.default_rng(cfg.seed),
                                         n_a=cfg.n_a, k=cfg.knn)
    critic = Critic(actor.n_h, cfg.n_c)
    optimizer = torch.optim.Adam(
        list(actor.parameters()) + list(critic.parameters()), lr=cfg.lr)

    curve = []
    for update in range(cfg.n_updates):
        n = int(rng.integers(cfg.n_min, cfg.n_max + 1))
        inst = generate_synthetic(GeneratorParams(
            n, p_start=cfg.p_start, seed=cfg.seed * 1000003 + update))
        batch, stats = rollout(inst, actor, critic, rng,
                               cfg.episode_len, cfg.n_anchors)
        l_a, l_c, l_e, _ = ppo_update(batch, actor, critic, optimizer,
                                      cfg.gamma, cfg.eps_clip, cfg.k_epoch)
        curve.append((update, l_a, l_c, l_e, stats.mean_cost))
        if log:
            log(f"update {update}: L_A={l_a:.4f} L_C={l_c:.4f} "
                f"L_E={l_e:.4f} mean_cost={stats.mean_cost:.2f}")
    return actor, critic, curve


def write_curve(curve: list[tuple], path: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CURVE_HEADER)
        for update, l_a, l_c, l_e, mean_cost in curve:
            w.writerow([update, repr(l_a), repr(l_c), repr(l_e), repr(mean_cost)])


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="dprlns-train", description=__doc__)
    ap.add_argument("--config", help="flat key=value config file")
    ap.add_argument("--out", required=True, help="weight bundle output path")
    ap.add_argument("--curve", help="learning-curve CSV output path")
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else TrainConfig()
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    actor, _, curve = train(cfg, log=print)
    export_weights(actor.to_bundle(), args.out)
    if args.curve:
        write_curve(curve, args.curve)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
