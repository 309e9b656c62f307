"""PPO trainer for the dprlns neural destroy policy.

Trains the recurrent graph-convolutional actor (plus an MLP critic) with
proximal policy optimization on synthetic CVRPTW instances, rolling out the
solver's own destroy/repair dynamics, and exports ``dprlns-weights/1``
bundles that the solver loads directly.
"""

from .model import Actor, Critic, export_weights, reference_forward
from .ppo import Transition, ppo_losses, ppo_update
from .train import TrainConfig, load_config, train

__all__ = [
    "Actor", "Critic", "export_weights", "reference_forward",
    "Transition", "ppo_losses", "ppo_update",
    "TrainConfig", "load_config", "train",
]

__version__ = "0.1.0"
