"""Ring profiles, the pruned triple decomposition, distances, and Reed-Frost."""

import math

import numpy as np
import pytest

from digraphdist import (ParameterError, derive_stream, digraph_from_arcs,
                         directed_rings, graph_from_edges, hat_ring_decomposition,
                         joint_distance, reed_frost_batch, reed_frost_trajectory,
                         restricted_rings, sample_digraph, undirected_rings)
from helpers import assert_within


def path_graph(k):
    return graph_from_edges(k, np.arange(k - 1), np.arange(1, k))


def test_undirected_rings_path():
    prof = undirected_rings(path_graph(3), 0, 2)
    assert prof.ring_sizes == (1, 1, 1)
    assert prof.cumulative == (1, 2, 3)


def test_undirected_rings_isolated_vertex():
    g = graph_from_edges(2, np.array([], dtype=int), np.array([], dtype=int))
    prof = undirected_rings(g, 0, 5)
    assert prof.ring_sizes == (1, 0)


def test_undirected_rings_star_center():
    g = graph_from_edges(5, np.zeros(4, dtype=int), np.arange(1, 5))
    assert undirected_rings(g, 0, 1).ring_sizes == (1, 4)
    # beyond absorption the first empty ring is included, then exploration stops
    assert undirected_rings(g, 0, 4).ring_sizes == (1, 4, 0)


def test_undirected_rings_partition_reachable_set():
    s = derive_stream(40, 0)
    from digraphdist import sample_graph
    g = sample_graph(300, 0.01, s)
    prof = undirected_rings(g, 0, 300, keep_sets=True)
    union = set()
    for ring in prof.ring_sets:
        assert not (union & ring)
        union |= ring
    assert len(union) == prof.cumulative[-1]


def test_directed_rings_cycle():
    dg = digraph_from_arcs(3, np.array([0, 1, 2]), np.array([1, 2, 0]))
    prof = directed_rings(dg, 0, 2)
    assert prof.ring_sizes == ((1, 1), (1, 1), (1, 1))


def test_directed_rings_single_arc():
    dg = digraph_from_arcs(2, np.array([0]), np.array([1]))
    prof = directed_rings(dg, 0, 1)
    assert prof.ring_sizes == ((1, 1), (1, 0))


def test_directed_rings_all_bidirectional_match_undirected():
    s = derive_stream(41, 0)
    dg = sample_digraph(150, 0.02, 1.0, s)
    dprof = directed_rings(dg, 3, 8)
    from digraphdist import undirected_projection
    uprof = undirected_rings(undirected_projection(dg), 3, 8)
    outs = tuple(a for a, _ in dprof.ring_sizes)
    ins = tuple(b for _, b in dprof.ring_sizes)
    assert outs == uprof.ring_sizes
    assert ins == uprof.ring_sizes


def test_hat_triple_one_of_each():
    # centre 0: strict out-arc to 1, strict in-arc from 2, bidirectional with 3
    dg = digraph_from_arcs(4, np.array([0, 2, 0, 3]), np.array([1, 0, 3, 0]))
    prof = hat_ring_decomposition(dg, 0, 1)
    assert prof.ring_sizes == ((0, 0, 1), (1, 1, 1))


def test_hat_triple_single_bidirectional_edge():
    dg = digraph_from_arcs(2, np.array([0, 1]), np.array([1, 0]))
    prof = hat_ring_decomposition(dg, 0, 1)
    assert prof.ring_sizes == ((0, 0, 1), (0, 0, 1))


def test_hat_excludes_doubly_reached_vertex():
    # 0 -> 1, 0 -> 2, then both 1 -> 3 and 2 -> 3: vertex 3 is doubly reached
    dg = digraph_from_arcs(4, np.array([0, 0, 1, 2]), np.array([1, 2, 3, 3]))
    prof = hat_ring_decomposition(dg, 0, 2)
    assert prof.ring_sizes[1] == (2, 0, 0)
    assert prof.ring_sizes[2] == (0, 0, 0)
    assert prof.tilde_sizes[2] == (1, 0)
    assert prof.plain_sizes[2] == (1, 0)


def test_hat_consistency_invariants_on_samples():
    s = derive_stream(42, 0)
    for _ in range(150):
        dg = sample_digraph(200, 2.0 / 200, 0.5, s)
        prof = hat_ring_decomposition(dg, 0, 6, keep_sets=True)
        for r in range(prof.radius + 1):
            hat_o, hat_i, bi = prof.ring_sizes[r]
            t_o, t_i = prof.tilde_sizes[r]
            p_o, p_i = prof.plain_sizes[r]
            assert hat_o <= t_o and hat_i <= t_i
            assert p_o == t_o + bi and p_i == t_i + bi
            so, si, sb = prof.ring_sets[r]
            assert not (so & si) and not (so & sb) and not (si & sb)


def test_restricted_empty_exclusion_matches_unrestricted():
    s = derive_stream(43, 0)
    dg = sample_digraph(100, 0.03, 0.5, s)
    a = restricted_rings(dg, 5, set(), 4, variant="directed")
    b = directed_rings(dg, 5, 4)
    assert a.ring_sizes == b.ring_sizes
    ah = restricted_rings(dg, 5, set(), 4, variant="hat")
    bh = hat_ring_decomposition(dg, 5, 4)
    assert ah.ring_sizes == bh.ring_sizes


def test_restricted_all_neighbours_excluded():
    dg = digraph_from_arcs(4, np.array([0, 0, 0]), np.array([1, 2, 3]))
    prof = restricted_rings(dg, 0, {1, 2, 3}, 3, variant="directed")
    assert prof.ring_sizes == ((1, 1), (0, 0))


def test_restricted_cycle_case():
    dg = digraph_from_arcs(3, np.array([0, 1, 2]), np.array([1, 2, 0]))
    prof = restricted_rings(dg, 1, {0}, 3, variant="directed")
    outs = tuple(a for a, _ in prof.ring_sizes)
    assert outs == (1, 1, 0)


def test_restricted_rejects_excluded_start():
    dg = digraph_from_arcs(3, np.array([0]), np.array([1]))
    with pytest.raises(ParameterError):
        restricted_rings(dg, 1, {1}, 2, variant="directed")


def test_joint_distance_cycle():
    dg = digraph_from_arcs(3, np.array([0, 1, 2]), np.array([1, 2, 0]))
    assert joint_distance(dg, 0, 2) == (2.0, 1.0)


def test_joint_distance_same_vertex_and_unreachable():
    dg = digraph_from_arcs(2, np.array([], dtype=int), np.array([], dtype=int))
    assert joint_distance(dg, 0, 0) == (0.0, 0.0)
    assert joint_distance(dg, 0, 1) == (math.inf, math.inf)


def test_joint_distance_symmetric_when_all_bidirectional():
    s = derive_stream(44, 0)
    dg = sample_digraph(150, 0.02, 1.0, s)
    for _ in range(50):
        v, v2 = s.gen.integers(150, size=2)
        d_o, d_i = joint_distance(dg, int(v), int(v2))
        assert d_o == d_i


def test_reed_frost_conditional_law():
    # n=13: after a first ring of size 2 the state is (S, I) = (10, 2) and the
    # next ring is Binomial(10, 1 - 0.9^2) with mean 1.9
    s = derive_stream(45, 0)
    rings = reed_frost_batch(13, 0.1, 2, 10**6, s)
    hit = rings[:, 1] == 2
    count = int(hit.sum())
    cond_mean = rings[hit, 2].mean()
    sigma = math.sqrt(10 * 0.19 * 0.81 / count)
    assert_within(cond_mean, 1.9, sigma, k=3, label="conditional ring mean")


def test_reed_frost_absorption():
    s = derive_stream(46, 0)
    for _ in range(200):
        traj = reed_frost_trajectory(30, 0.05, 30, s)
        if 0 in traj:
            first = traj.index(0)
            assert all(x == 0 for x in traj[first:])
            assert first == len(traj) - 1  # trajectory stops at absorption


def test_reed_frost_p_one():
    s = derive_stream(47, 0)
    traj = reed_frost_trajectory(6, 1.0, 5, s)
    assert traj == [1, 5, 0]


def test_bfs_determinism():
    s = derive_stream(48, 0)
    dg = sample_digraph(100, 0.04, 0.5, s)
    a = hat_ring_decomposition(dg, 7, 5, keep_sets=True)
    b = hat_ring_decomposition(dg, 7, 5, keep_sets=True)
    assert a.ring_sets == b.ring_sets


def test_vertex_range_checks():
    dg = digraph_from_arcs(3, np.array([0]), np.array([1]))
    with pytest.raises(ParameterError):
        directed_rings(dg, 5, 2)
    with pytest.raises(ParameterError):
        joint_distance(dg, 0, 9)
