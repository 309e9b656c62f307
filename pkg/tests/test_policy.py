import numpy as np
import pytest

from dprlns.io import GeneratorParams, generate_synthetic
from dprlns.model import IncompleteSolutionError, Solution, route_cost
from dprlns.policy import (
    build_embeddings, random_policy, sample_anchors, sample_coefficient,
    sample_coefficients,
)
from dprlns.search import initial_solution
from oracles import make_instance


def embedding_fixture():
    # depot at (0,0), one customer at (3,4), Q=10, q=5, t_max=100
    inst = make_instance(10.0, (0.0, 0.0), [(3.0, 4.0, 5.0, 0.0, 100.0, 0.0)], 100.0)
    sol = Solution([[1]], set())
    return inst, sol


def test_depot_embedding_row():
    inst, sol = embedding_fixture()
    emb = build_embeddings(inst, sol)
    np.testing.assert_allclose(emb[0], [0, 0, 0, 0, 1.0, 0, 0, 0, 0, 0], atol=1e-12)


def test_single_customer_embedding_components():
    inst, sol = embedding_fixture()
    emb = build_embeddings(inst, sol)
    row = emb[1]
    assert row[2] == pytest.approx(0.5)    # demand / Q
    assert row[6] == pytest.approx(0.5)    # accumulated demand / Q
    assert row[7] == pytest.approx(0.05)   # distance to node / t_max
    assert row[8] == pytest.approx(0.5)    # route demand / Q
    assert row[9] == pytest.approx(0.10)   # round trip / t_max


def test_embeddings_need_complete_solution():
    inst, _ = embedding_fixture()
    with pytest.raises(IncompleteSolutionError):
        build_embeddings(inst, Solution([], {1}))


def test_accumulated_distance_excludes_return_leg():
    rng = np.random.default_rng(12)
    for seed in range(10):
        inst = generate_synthetic(GeneratorParams(12, seed=seed))
        sol = initial_solution(inst, rng)
        emb = build_embeddings(inst, sol)
        for route in sol.routes:
            last = route[-1]
            full = route_cost(inst, route)
            # oracle: decompose the route cost into in-route part + return leg
            expected_upto = full - inst.dist(last, 0)
            assert emb[last, 7] * inst.t_max == pytest.approx(expected_upto, abs=1e-9)
            assert emb[last, 9] * inst.t_max == pytest.approx(full, abs=1e-9)


def test_embeddings_invariant_to_route_list_order():
    rng = np.random.default_rng(2)
    inst = generate_synthetic(GeneratorParams(15, seed=3))
    sol = initial_solution(inst, rng)
    emb = build_embeddings(inst, sol)
    shuffled = Solution([list(r) for r in reversed(sol.routes)], set())
    np.testing.assert_array_equal(emb, build_embeddings(inst, shuffled))


def test_embeddings_pure_function():
    rng = np.random.default_rng(4)
    inst = generate_synthetic(GeneratorParams(10, seed=1))
    sol = initial_solution(inst, rng)
    a = build_embeddings(inst, sol)
    b = build_embeddings(inst, sol)
    np.testing.assert_array_equal(a, b)


def test_random_policy_uniform_and_independent_of_solution():
    rng = np.random.default_rng(0)
    inst = generate_synthetic(GeneratorParams(10, seed=0))
    s1 = initial_solution(inst, np.random.default_rng(1))
    s2 = initial_solution(inst, np.random.default_rng(2))
    o1 = random_policy(inst, s1)
    o2 = random_policy(inst, s2)
    np.testing.assert_array_equal(o1.anchor_probs, o2.anchor_probs)
    assert o1.anchor_probs[0] == 0.0
    assert o1.anchor_probs[1:] == pytest.approx(0.1)
    assert np.all(o1.alpha[1:] == 1.0) and np.all(o1.beta[1:] == 1.0)
    assert o1.anchor_probs.sum() == pytest.approx(1.0, abs=1e-6)


def test_sample_anchors_one_hot():
    rng = np.random.default_rng(0)
    inst = generate_synthetic(GeneratorParams(5, seed=0))
    out = random_policy(inst, Solution([[1, 2, 3, 4, 5]], set()))
    probs = np.zeros(6)
    probs[3] = 1.0
    out.anchor_probs = probs
    assert sample_anchors(out, 1, rng) == [3]


def test_sample_anchors_full_draw_is_permutation():
    rng = np.random.default_rng(1)
    inst = generate_synthetic(GeneratorParams(6, seed=0))
    out = random_policy(inst, Solution([[1, 2, 3, 4, 5, 6]], set()))
    anchors = sample_anchors(out, 6, rng)
    assert sorted(anchors) == [1, 2, 3, 4, 5, 6]


def test_sample_anchors_frequencies():
    rng = np.random.default_rng(2)
    n = 10
    inst = generate_synthetic(GeneratorParams(n, seed=0))
    out = random_policy(inst, Solution([list(range(1, n + 1))], set()))
    draws = 100_000
    counts = np.zeros(n + 1)
    for _ in range(draws):
        counts[sample_anchors(out, 1, rng)[0]] += 1
    p = 1.0 / n
    sigma = np.sqrt(p * (1 - p) / draws)
    assert np.all(np.abs(counts[1:] / draws - p) < 3 * sigma + 1e-9)


def test_sample_anchors_validation():
    rng = np.random.default_rng(0)
    inst = generate_synthetic(GeneratorParams(5, seed=0))
    out = random_policy(inst, Solution([[1, 2, 3, 4, 5]], set()))
    with pytest.raises(ValueError):
        sample_anchors(out, 0, rng)
    with pytest.raises(ValueError):
        sample_anchors(out, 6, rng)
    out.anchor_probs = np.zeros(6)
    with pytest.raises(ValueError):
        sample_anchors(out, 1, rng)


def test_beta_uniform_mean():
    rng = np.random.default_rng(3)
    xs = np.array([sample_coefficient(1.0, 1.0, rng) for _ in range(100_000)])
    assert abs(xs.mean() - 0.5) < 0.01
    assert xs.min() >= 0.0 and xs.max() <= 1.0


def test_beta_2_5_mean():
    rng = np.random.default_rng(4)
    xs = np.array([sample_coefficient(2.0, 5.0, rng) for _ in range(100_000)])
    assert abs(xs.mean() - 2.0 / 7.0) < 0.01


def test_beta_rejects_nonpositive():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        sample_coefficient(0.0, 1.0, rng)
    with pytest.raises(ValueError):
        sample_coefficient(1.0, -2.0, rng)


def test_sample_coefficients_covers_all_customers():
    rng = np.random.default_rng(5)
    inst = generate_synthetic(GeneratorParams(8, seed=0))
    sol = initial_solution(inst, rng)
    out = random_policy(inst, sol)
    coeffs = sample_coefficients(out, inst, rng)
    assert set(coeffs) == set(inst.customer_ids)
    assert all(0.0 <= v <= 1.0 for v in coeffs.values())
