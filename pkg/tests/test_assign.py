import itertools

import numpy as np
import pytest

from compactseg.assign import (
    ClassAdjacencyGraph,
    assignment_cost,
    build_adjacency,
    optimize_assignment,
)
from compactseg.codebook import Codebook, Scheme, build_random_codebook

from assign_fixtures import SMALL_FIXTURES, brute_cost, exhaustive_optimum, random_graph


def _brute_force_edges(vol):
    # enumerate every voxel and its +1 neighbour along each axis
    vol = np.asarray(vol)
    counts = {}
    for idx in itertools.product(*(range(s) for s in vol.shape)):
        for axis in range(vol.ndim):
            nb = list(idx)
            nb[axis] += 1
            if nb[axis] >= vol.shape[axis]:
                continue
            a, b = int(vol[idx]), int(vol[tuple(nb)])
            if a != b:
                key = (min(a, b), max(a, b))
                counts[key] = counts.get(key, 0) + 1
    return counts


def test_single_class_has_no_edges():
    g = build_adjacency([np.full((3, 3, 3), 2)], n_classes=4)
    assert g.edges == {}


def test_two_voxel_edge():
    g = build_adjacency([np.array([3, 5]).reshape(2, 1, 1)], n_classes=6)
    assert g.edges == {(3, 5): 1}


def test_checkerboard_count():
    board = (np.indices((4, 4)).sum(axis=0) % 2).reshape(4, 4, 1)
    expected = _brute_force_edges(board)
    assert expected == {(0, 1): 24}
    assert build_adjacency([board]).edges == expected


def test_adjacency_matches_brute_force_and_merges():
    rng = np.random.default_rng(0)
    vols = [rng.integers(0, 6, size=(4, 3, 5)) for _ in range(3)]
    merged = {}
    for v in vols:
        for k, c in _brute_force_edges(v).items():
            merged[k] = merged.get(k, 0) + c
    g = build_adjacency(vols, n_classes=6)
    assert g.edges == merged
    assert all(a < b for a, b in g.edges)


def test_adjacency_errors():
    with pytest.raises(ValueError):
        build_adjacency([])
    with pytest.raises(ValueError):
        build_adjacency([np.array([0, 7])], n_classes=4)
    with pytest.raises(ValueError):
        ClassAdjacencyGraph(3, {(1, 1): 2})


def test_graph_file_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    g = build_adjacency([rng.integers(0, 9, size=(5, 5, 5))])
    g.save(tmp_path / "g.json")
    assert ClassAdjacencyGraph.load(tmp_path / "g.json") == g


def test_cost_simple_cases():
    g = ClassAdjacencyGraph(4, {(1, 2): 7})
    cb = Codebook(4, 2, Scheme.VANILLA, (0, 1, 3, 2))  # 1 -> 01, 2 -> 11
    assert assignment_cost(g, cb) == 7
    assert assignment_cost(ClassAdjacencyGraph(4), cb) == 0
    with pytest.raises(ValueError):
        assignment_cost(ClassAdjacencyGraph(9, {(0, 8): 1}), cb)


def test_cost_matches_independent_sum():
    rng = np.random.default_rng(2)
    for seed in range(10):
        edges = {}
        for a, b in itertools.combinations(range(8), 2):
            if rng.random() < 0.5:
                edges[(a, b)] = int(rng.integers(1, 20))
        g = ClassAdjacencyGraph(8, edges)
        cb = build_random_codebook(8, Scheme.VANILLA, seed, n_data_bits=4)
        assert assignment_cost(g, cb) == brute_cost(edges, cb.assignment)
        assert assignment_cost(g, cb, binary=True) == brute_cost({k: 1 for k in edges}, cb.assignment)


def test_cost_invariant_under_word_xor_relabel():
    # xor-ing every word by a constant preserves all pairwise distances
    rng = np.random.default_rng(3)
    g = build_adjacency([rng.integers(0, 10, size=(6, 6, 2))], n_classes=10)
    cb = build_random_codebook(10, Scheme.VANILLA, 3)
    shifted = cb.with_assignment([w ^ 0b1011 for w in cb.assignment])
    assert assignment_cost(g, cb) == assignment_cost(g, shifted)


def test_path_graph_reaches_gray_code_optimum():
    g = ClassAdjacencyGraph(4, {(0, 1): 3, (1, 2): 5, (2, 3): 2})
    assert exhaustive_optimum(g, 2) == 10
    for seed in range(5):
        res = optimize_assignment(g, Scheme.VANILLA, seed=seed)
        assert res.cost == 10


def test_empty_graph():
    res = optimize_assignment(ClassAdjacencyGraph(5), seed=0)
    assert res.cost == 0
    assert len(set(res.codebook.assignment)) == 5


def test_budget_must_be_positive():
    with pytest.raises(ValueError):
        optimize_assignment(ClassAdjacencyGraph(3), max_iterations=0)


@pytest.mark.parametrize("n, n_bits, seed, factor", SMALL_FIXTURES)
def test_local_search_nearexhaustive_optimum(n, n_bits, seed, factor):
    g = random_graph(n, seed)
    best = exhaustive_optimum(g, n_bits)
    res = optimize_assignment(g, seed=seed, n_data_bits=n_bits)
    assert res.cost <= factor * best


def test_result_invariants():
    rng = np.random.default_rng(4)
    g = build_adjacency([rng.integers(0, 30, size=(8, 8, 4)) for _ in range(2)], n_classes=30)
    for seed in range(5):
        res = optimize_assignment(g, Scheme.HAMMING74, seed=seed)
        assert res.cost <= res.initial_cost
        assert res.cost == assignment_cost(g, res.codebook)
        assert res.codebook.scheme is Scheme.HAMMING74
        assert len(set(res.codebook.assignment)) == 30
        again = optimize_assignment(g, Scheme.HAMMING74, seed=seed)
        assert again.codebook == res.codebook


def test_swap_with_unused_word_is_used():
    # a 3-class path fits on distance-1 words when spare words are usable
    g = ClassAdjacencyGraph(3, {(0, 1): 5, (1, 2): 5})
    res = optimize_assignment(g, n_data_bits=3, seed=0)
    assert res.cost == 10


def test_iteration_budget_respected():
    g = random_graph(8, 9)
    res = optimize_assignment(g, seed=0, max_iterations=1)
    assert res.iterations <= 1


def test_binary_weighting_flag():
    g = ClassAdjacencyGraph(4, {(0, 1): 100, (2, 3): 1, (0, 2): 1})
    res = optimize_assignment(g, seed=0, binary=True)
    assert res.cost == assignment_cost(g, res.codebook, binary=True)
    assert res.cost == 3
