"""Graph/digraph sampling laws, structural invariants, and edge-list round trips."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from digraphdist import (IngestionError, ParameterError, count_pair_states,
                         derive_stream, edge_probability_out, export_edge_list,
                         load_edge_list, sample_digraph, sample_graph,
                         undirected_projection)
from digraphdist.graph_model import _pairs_from_indices, _sample_pair_indices
from helpers import assert_within, freq_sigma, triangle_count, two_sample_pvalue


def test_edge_probability_out_values():
    assert edge_probability_out(0.01, 0.5) == pytest.approx(0.0075)
    assert edge_probability_out(0.37, 1.0) == pytest.approx(0.37)
    assert edge_probability_out(0.37, 0.0) == pytest.approx(0.185)


def test_sample_graph_degenerate():
    s = derive_stream(20, 0)
    g = sample_graph(25, 0.0, s)
    assert g.edge_count == 0
    g = sample_graph(4, 1.0, s)
    assert g.edge_count == 6
    assert sorted(g.neighbours(2).tolist()) == [0, 1, 3]


def test_sample_graph_edge_count_mean():
    s = derive_stream(21, 0)
    counts = np.array([sample_graph(1000, 0.01, s).edge_count for _ in range(200)])
    pairs = 1000 * 999 // 2
    sigma = math.sqrt(pairs * 0.01 * 0.99 / 200)
    assert_within(counts.mean(), 0.01 * pairs, sigma, k=3, label="edge count")


def test_sample_graph_rejects_bad_params():
    s = derive_stream(22, 0)
    with pytest.raises(ParameterError):
        sample_graph(0, 0.5, s)
    with pytest.raises(ParameterError):
        sample_graph(5, 1.5, s)


def test_digraph_theta_one_is_symmetric():
    s = derive_stream(23, 0)
    dg = sample_digraph(120, 0.05, 1.0, s)
    assert dg.single_arc_count == 0
    assert np.array_equal(dg.out_indices, dg.in_indices)
    assert np.array_equal(dg.out_indices, dg.bi_indices)


def test_digraph_p_zero_empty():
    s = derive_stream(24, 0)
    dg = sample_digraph(50, 0.0, 0.3, s)
    assert dg.arc_count == 0


def test_directed_edge_fraction_matches_p0():
    s = derive_stream(25, 0)
    n, p, theta = 1000, 0.01, 0.5
    fractions = []
    for _ in range(100):
        dg = sample_digraph(n, p, theta, s)
        fractions.append(dg.arc_count / (n * (n - 1)))
    pairs = n * (n - 1) // 2
    # per unordered pair the directed-arc count is 0/1/2 with mean 2 p0
    var_pair = p * (1 + 3 * theta) - (p * (1 + theta)) ** 2
    sigma = math.sqrt(var_pair / (4 * pairs) / 100)
    assert_within(np.mean(fractions), 0.0075, sigma, k=3, label="p0 fraction")


def test_pair_state_frequencies():
    s = derive_stream(26, 0)
    n, p, theta = 1500, 0.01, 0.5
    none = fwd = rev = bi = total = 0
    while total < 10**6:
        dg = sample_digraph(n, p, theta, s)
        a, b, c, d = count_pair_states(dg)
        none, fwd, rev, bi = none + a, fwd + b, rev + c, bi + d
        total += n * (n - 1) // 2
    for observed, q, label in ((none, 1 - p, "none"), (fwd, p * (1 - theta) / 2, "fwd"),
                               (rev, p * (1 - theta) / 2, "rev"), (bi, p * theta, "bi")):
        assert_within(observed / total, q, freq_sigma(q, total), k=4, label=label)


def test_pair_state_lookup_consistency():
    s = derive_stream(27, 0)
    dg = sample_digraph(60, 0.2, 0.4, s)
    counted = {"none": 0, "out": 0, "in": 0, "bi": 0}
    for i in range(dg.n):
        for j in range(i + 1, dg.n):
            counted[dg.pair_state(i, j)] += 1
    none, fwd, rev, bi = count_pair_states(dg)
    assert (counted["none"], counted["out"], counted["in"], counted["bi"]) == (none, fwd, rev, bi)


def test_marginal_projection_matches_bernoulli_graph():
    # fixed seed for determinism; the 0.01 threshold has a 1% false-alarm rate
    s = derive_stream(280, 0)
    n, p = 300, 0.02
    proj_edges, direct_edges = [], []
    proj_tri, direct_tri = [], []
    for _ in range(400):
        dg = sample_digraph(n, p, 0.6, s)
        g1 = undirected_projection(dg)
        g2 = sample_graph(n, p, s)
        proj_edges.append(g1.edge_count)
        direct_edges.append(g2.edge_count)
        proj_tri.append(triangle_count(g1))
        direct_tri.append(triangle_count(g2))
    assert two_sample_pvalue(proj_edges, direct_edges) > 0.01
    assert two_sample_pvalue(proj_tri, direct_tri) > 0.01


def test_structural_invariants_after_sampling():
    s = derive_stream(29, 0)
    sample_graph(200, 0.03, s).validate()
    sample_digraph(200, 0.03, 0.4, s).validate()


@settings(max_examples=25, deadline=None)
@given(n=st.integers(2, 40), p=st.floats(0.0, 1.0), theta=st.floats(0.0, 1.0),
       seed=st.integers(0, 2**32))
def test_digraph_invariants_property(n, p, theta, seed):
    dg = sample_digraph(n, p, theta, derive_stream(seed, 0))
    dg.validate()


def test_pair_index_mapping_matches_enumeration():
    for n in (2, 3, 5, 11):
        expected = [(i, j) for i in range(n) for j in range(i + 1, n)]
        ks = np.arange(n * (n - 1) // 2, dtype=np.int64)
        i, j = _pairs_from_indices(ks, n)
        assert list(zip(i.tolist(), j.tolist())) == expected


def test_pair_sampling_covers_all_on_p_one():
    s = derive_stream(30, 0)
    ks = _sample_pair_indices(45, 1.0, s.gen)
    assert ks.tolist() == list(range(45))
    assert len(_sample_pair_indices(45, 0.0, s.gen)) == 0


# ---------------------------------------------------------------------------
# Edge-list ingestion and export
# ---------------------------------------------------------------------------

def test_load_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("src,dst\n")
    dg = load_edge_list(path)
    assert dg.n == 0 and dg.arc_count == 0


def test_load_directed_cycle(tmp_path):
    path = tmp_path / "cycle.csv"
    path.write_text("src,dst\na,b\nb,c\nc,a\n")
    dg = load_edge_list(path, directed=True)
    assert dg.n == 3
    assert dg.arc_count == 3
    assert dg.bi_edge_count == 0
    assert dg.pair_state(0, 1) == "out"


def test_load_collapses_duplicates(tmp_path):
    path = tmp_path / "dup.csv"
    path.write_text("src,dst\na,b\na,b\n")
    dg, report = load_edge_list(path, return_report=True)
    assert dg.n == 2 and dg.arc_count == 1
    assert report.duplicates_collapsed == 1


def test_load_drops_self_loops_with_warning(tmp_path):
    path = tmp_path / "loops.csv"
    path.write_text("src,dst\na,a\na,b\n")
    with pytest.warns(UserWarning, match="1 self-loop"):
        dg, report = load_edge_list(path, return_report=True)
    assert dg.n == 2 and dg.arc_count == 1
    assert report.self_loops_dropped == 1


def test_load_undirected_makes_bidirectional(tmp_path):
    path = tmp_path / "undir.csv"
    path.write_text("src,dst\na,b\n")
    dg = load_edge_list(path, directed=False)
    assert dg.bi_edge_count == 1 and dg.arc_count == 2


def test_ingested_digraph_passes_structural_validation(tmp_path):
    path = tmp_path / "net.csv"
    path.write_text("src,dst\na,b\nb,a\nb,c\nc,d\nd,b\n")
    load_edge_list(path, directed=True).validate()


def test_load_malformed_row_names_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("src,dst\na,b\nx,y,z\n")
    with pytest.raises(IngestionError, match="line 3"):
        load_edge_list(path)


def test_load_missing_file():
    with pytest.raises(IngestionError):
        load_edge_list("/nonexistent/edges.csv")


def test_export_round_trip(tmp_path):
    # loading re-indexes tokens by first appearance, so one load reaches the
    # canonical labelling; export/load is then an exact fixed point
    s = derive_stream(31, 0)
    dg = sample_digraph(40, 0.1, 0.5, s)
    raw = tmp_path / "raw.csv"
    export_edge_list(dg, raw)
    canonical = load_edge_list(raw)
    assert canonical.arc_count == dg.arc_count
    assert canonical.bi_edge_count == dg.bi_edge_count
    once = tmp_path / "once.csv"
    export_edge_list(canonical, once)
    twice_graph = load_edge_list(once)
    again = tmp_path / "twice.csv"
    export_edge_list(twice_graph, again)
    assert once.read_bytes() == again.read_bytes()
    assert np.array_equal(twice_graph.out_indices, canonical.out_indices)
    assert np.array_equal(twice_graph.out_indptr, canonical.out_indptr)
    assert np.array_equal(twice_graph.bi_indices, canonical.bi_indices)


def test_export_keep_kinds_round_trip(tmp_path):
    s = derive_stream(32, 0)
    dg = load_edge_list(_exported(tmp_path, s))  # canonical labelling
    path = tmp_path / "kinds.csv"
    export_edge_list(dg, path, keep_kinds=True)
    text = path.read_text().splitlines()
    assert text[0] == "src,dst,kind"
    assert all(line.rsplit(",", 1)[1] in ("out", "bi") for line in text[1:])
    again = load_edge_list(path)
    assert np.array_equal(again.out_indices, dg.out_indices)
    assert np.array_equal(again.bi_indices, dg.bi_indices)


def _exported(tmp_path, stream):
    dg = sample_digraph(40, 0.1, 0.5, stream)
    path = tmp_path / "base.csv"
    export_edge_list(dg, path)
    return path
