import numpy as np
import pytest
import torch

from dprlns_trainer.model import Critic


def test_zero_weights_give_zero():
    c = Critic(8, 16)
    with torch.no_grad():
        for p in c.parameters():
            p.zero_()
        v = c(torch.ones(8, dtype=torch.float64))
    assert float(v) == 0.0


def test_finite_scalar_for_random_input():
    c = Critic(12, 32)
    rng = np.random.default_rng(0)
    for _ in range(10):
        v = c(torch.as_tensor(rng.normal(size=12)))
        assert v.shape == ()
        assert torch.isfinite(v)


def test_hand_computed_two_layer_toy():
    # hidden size 2, N_C = 2: set every Linear to known values and compare
    # against a by-hand forward pass
    c = Critic(2, 2)
    with torch.no_grad():
        layers = [m for m in c.net if isinstance(m, torch.nn.Linear)]
        layers[0].weight.copy_(torch.tensor([[1.0, 0.0], [0.0, -1.0]]).double())
        layers[0].bias.copy_(torch.tensor([0.5, 0.0]).double())
        layers[1].weight.copy_(torch.tensor([[2.0, 1.0], [0.0, 1.0]]).double())
        layers[1].bias.copy_(torch.tensor([0.0, -1.0]).double())
        layers[2].weight.copy_(torch.tensor([[1.0, 3.0]]).double())
        layers[2].bias.copy_(torch.tensor([0.25]).double())
        v = float(c(torch.tensor([1.0, 2.0]).double()))
    # layer 1: relu([1*1 + 0.5, -2]) = [1.5, 0]
    # layer 2: relu([2*1.5 + 0, 0 - 1]) = [3, 0]
    # head:    1*3 + 3*0 + 0.25 = 3.25
    assert v == pytest.approx(3.25, abs=1e-12)


def test_shape_mismatch():
    c = Critic(8, 16)
    with pytest.raises(ValueError):
        c(torch.zeros(5, dtype=torch.float64))
