"""Diffusion, sketch estimation and exact oracle tests."""

from fractions import Fraction

import numpy as np
import pytest

from fairspread.cascade import (
    DirectedSketchSet,
    UndirectedSketchSet,
    UtilityVector,
    estimate_utilities,
    exact_utilities,
    sample_sketches,
    simulate_once,
)
from fairspread.errors import EnumerationLimitError, GraphFormatError
from fairspread.graph import CommunityPartition, Graph, SbmSpec, SeedSet, generate_sbm


def _one_comm(n):
    return CommunityPartition(labels=(0,) * n)


def test_utility_vector_validation():
    with pytest.raises(GraphFormatError):
        UtilityVector(values=(1.2,), sizes=(3,))
    with pytest.raises(GraphFormatError):
        UtilityVector(values=(0.5, 0.5), sizes=(3,))


def test_simulate_once_extremes():
    g = Graph(n=4, edges=((0, 1), (1, 2), (2, 3)), p=1.0)
    rng = np.random.default_rng(0)
    assert simulate_once(g, SeedSet(frozenset({0}), 1), rng) == {0, 1, 2, 3}
    g0 = Graph(n=4, edges=g.edges, p=0.0)
    assert simulate_once(g0, SeedSet(frozenset({0}), 1), rng) == {0}


def test_sketches_deterministic_in_master_seed():
    g, part = generate_sbm(SbmSpec((20, 20), (0.2, 0.2), 0.05), rng_seed=4)
    s1 = sample_sketches(g, 50, 9)
    s2 = sample_sketches(g, 50, 9)
    s3 = sample_sketches(g, 50, 10)
    assert np.array_equal(s1.edge_masks, s2.edge_masks)
    assert not np.array_equal(s1.edge_masks, s3.edge_masks)


def test_sketch_prefix_stability():
    # sketch i depends only on (master_seed, i), so a larger R extends
    # the same sequence
    g, _ = generate_sbm(SbmSpec((15, 15), (0.2, 0.2), 0.05), rng_seed=4)
    small = sample_sketches(g, 20, 3)
    big = sample_sketches(g, 60, 3)
    assert np.array_equal(big.edge_masks[:20], small.edge_masks)


def test_dispatch_by_directedness():
    gu = Graph(n=3, edges=((0, 1),), directed=False, p=0.5)
    gd = Graph(n=3, edges=((0, 1),), directed=True, p=0.5)
    assert isinstance(sample_sketches(gu, 5, 0), UndirectedSketchSet)
    assert isinstance(sample_sketches(gd, 5, 0), DirectedSketchSet)


def test_estimate_matches_by_hand_component_counts():
    # single edge kept with p=0.5; seeding vertex 0 covers vertex 1 in
    # exactly the sketches that keep the edge
    g = Graph(n=2, edges=((0, 1),), p=0.5)
    sk = sample_sketches(g, 400, 0)
    kept = int(sk.edge_masks.sum())
    u = estimate_utilities(sk, SeedSet(frozenset({0}), 1), _one_comm(2))
    assert u.values[0] == (400 + kept) / 800


def test_coverage_state_agrees_with_batch_counts():
    g, part = generate_sbm(SbmSpec((25, 25), (0.15, 0.15), 0.03), rng_seed=2)
    sk = sample_sketches(g, 100, 7)
    state = sk.coverage_state(part)
    for v in (3, 30, 11):
        state.add(v)
    u_inc = state.counts
    u_batch = sk.evaluator(part).coverage_counts({3, 30, 11})
    assert np.array_equal(u_inc, u_batch)


def test_gain_counts_match_add_delta():
    g, part = generate_sbm(SbmSpec((20, 20), (0.2, 0.2), 0.05), rng_seed=8)
    for sk in (sample_sketches(g, 60, 1),):
        state = sk.coverage_state(part)
        rng = np.random.default_rng(0)
        for v in rng.permutation(g.n)[:10]:
            predicted = state.gain_counts(int(v))
            delta = state.add(int(v))
            assert np.array_equal(predicted, delta)


def test_directed_state_matches_bruteforce_reachability():
    g = Graph(
        n=5, edges=((0, 1), (1, 2), (3, 2), (2, 4)), directed=True, p=0.6
    )
    part = CommunityPartition(labels=(0, 0, 1, 1, 1))
    sk = sample_sketches(g, 200, 5)
    u = estimate_utilities(sk, SeedSet(frozenset({0, 3}), 2), part)
    # brute force on the same sketches
    totals = np.zeros(2)
    for i in range(200):
        adj = [[] for _ in range(5)]
        for a, (x, y) in enumerate(g.edges):
            if sk.edge_masks[i, a]:
                adj[x].append(y)
        active = {0, 3}
        stack = [0, 3]
        while stack:
            w = stack.pop()
            for nb in adj[w]:
                if nb not in active:
                    active.add(nb)
                    stack.append(nb)
        for v in active:
            totals[part.labels[v]] += 1
    assert u.values[0] == totals[0] / (200 * 2)
    assert u.values[1] == totals[1] / (200 * 3)


def test_exact_path_graph():
    g = Graph(n=3, edges=((0, 1), (1, 2)), p=0.5)
    u = exact_utilities(g, SeedSet(frozenset({0}), 1), _one_comm(3))
    assert u.values[0] == Fraction(7, 12)


def test_exact_decimal_probability_is_rational():
    g = Graph(n=2, edges=((0, 1),), p=0.3)
    u = exact_utilities(g, SeedSet(frozenset({0}), 1), _one_comm(2))
    assert u.values[0] == Fraction(13, 20)  # (1 + 3/10) / 2


def test_exact_directed_vs_undirected_differ():
    gu = Graph(n=2, edges=((1, 0),), directed=False, p=0.5)
    gd = Graph(n=2, edges=((1, 0),), directed=True, p=0.5)
    part = _one_comm(2)
    seeds = SeedSet(frozenset({0}), 1)
    assert exact_utilities(gu, seeds, part).values[0] == Fraction(3, 4)
    assert exact_utilities(gd, seeds, part).values[0] == Fraction(1, 2)


def test_exact_p_one_any_size():
    # p=1 bypasses enumeration, so large edge counts are fine
    edges = tuple((0, v) for v in range(1, 40))
    g = Graph(n=40, edges=edges, p=1.0)
    u = exact_utilities(g, SeedSet(frozenset({0}), 1), _one_comm(40))
    assert u.values[0] == 1


def test_exact_limit_enforced():
    edges = tuple((0, v) for v in range(1, 23))
    g = Graph(n=23, edges=edges, p=0.5)
    with pytest.raises(EnumerationLimitError):
        exact_utilities(g, SeedSet(frozenset({0}), 1), _one_comm(23))


def test_exact_vs_monte_carlo_random_graphs():
    rng = np.random.default_rng(123)
    for _ in range(4):
        n = int(rng.integers(4, 8))
        possible = [(u, v) for u in range(n) for v in range(u + 1, n)]
        idx = rng.permutation(len(possible))[: min(8, len(possible))]
        edges = tuple(possible[i] for i in idx)
        g = Graph(n=n, edges=edges, p=0.25)
        part = CommunityPartition(
            labels=tuple(int(x) for x in rng.integers(0, 2, n - 2)) + (0, 1)
        )
        seeds = SeedSet(frozenset({0}), 1)
        exact = exact_utilities(g, seeds, part)
        sk = sample_sketches(g, 20000, int(rng.integers(0, 1000)))
        mc = estimate_utilities(sk, seeds, part)
        for a, b in zip(exact.values, mc.values):
            assert abs(float(a) - float(b)) < 0.02
