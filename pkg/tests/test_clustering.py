import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.metrics import normalized_mutual_info_score

from hyperricci.clustering import (
    Criterion,
    ThresholdCriterion,
    cluster,
    dense_labels,
    graph_modularity,
    hypergraph_modularity,
    nmi,
    select_threshold,
    trim_and_components,
)
from hyperricci.flow import FlowConfig, Method
from hyperricci.hypergraph import Hypergraph, WeightingScheme, clique_expansion
from hyperricci.synthgen import gen_toy

from conftest import hypergraphs

TWO_TRIANGLES = Hypergraph(6, [(0, 1, 2), (3, 4, 5)])
K4 = Hypergraph(4, list(itertools.combinations(range(4), 2)))


def newman_oracle(adj, labels):
    two_m = adj.sum()
    k = adj.sum(axis=1)
    same = labels[:, None] == labels[None, :]
    return float(np.sum((adj - np.outer(k, k) / two_m) * same) / two_m)


def strict_oracle(h, labels):
    # brute force over communities and edge sizes
    m = h.n_edges
    deg = np.zeros(h.n_nodes)
    for e in h.edges:
        deg[list(e)] += 1
    total = deg.sum()
    q = 0.0
    for e in h.edges:
        if len({labels[v] for v in e}) == 1:
            q += 1 / m
        q -= sum((deg[labels == c].sum() / total) ** len(e) for c in np.unique(labels)) / m
    return q


def test_k4_split_modularity():
    g = clique_expansion(K4)
    assert graph_modularity(g, np.array([0, 0, 1, 1])) == pytest.approx(-1 / 6, abs=1e-12)


def test_two_triangles():
    g = clique_expansion(TWO_TRIANGLES)
    labels = np.array([0, 0, 0, 1, 1, 1])
    assert graph_modularity(g, labels) == pytest.approx(0.5, abs=1e-12)
    assert hypergraph_modularity(TWO_TRIANGLES, labels) == pytest.approx(0.75, abs=1e-12)
    # everything in one community
    assert hypergraph_modularity(TWO_TRIANGLES, np.zeros(6, int)) == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(hypergraphs(), st.data())
def test_modularities_match_oracles(h, data):
    labels = np.array(data.draw(st.lists(st.integers(0, 2), min_size=h.n_nodes, max_size=h.n_nodes)))
    g = clique_expansion(h, WeightingScheme.UNIFORM)
    adj = np.zeros((h.n_nodes, h.n_nodes))
    adj[g.edge_u, g.edge_v] = adj[g.edge_v, g.edge_u] = 1
    assert graph_modularity(g, labels) == pytest.approx(newman_oracle(adj, labels), abs=1e-12)
    assert hypergraph_modularity(h, labels) == pytest.approx(strict_oracle(h, labels), abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 30).flatmap(
    lambda n: st.tuples(st.lists(st.integers(0, 4), min_size=n, max_size=n),
                        st.lists(st.integers(0, 4), min_size=n, max_size=n))))
def test_nmi_matches_sklearn(pair):
    a, b = pair
    want = normalized_mutual_info_score(a, b, average_method="arithmetic")
    assert nmi(a, b) == pytest.approx(want, abs=1e-10)


def test_nmi_edge_cases():
    assert nmi([0, 0, 1, 1], [5, 5, 2, 2]) == pytest.approx(1.0)
    assert nmi([0, 0, 0], [1, 1, 1]) == 1.0
    assert nmi([0, 1, 0, 1], [0, 0, 1, 1]) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        nmi([0, 1], [0, 1, 2])


def test_dense_labels_first_appearance():
    assert dense_labels([7, 7, 3, 9, 3]).tolist() == [0, 0, 1, 2, 1]


def test_trim_keeps_light_edges():
    h = Hypergraph(6, [(0, 1, 2), (3, 4, 5), (2, 3)])
    assert trim_and_components(h, [1.0, 1.0, 5.0], 1.0).num_communities == 2
    assert trim_and_components(h, [1.0, 1.0, 5.0], 5.0).num_communities == 1
    # nothing kept: every node alone
    assert trim_and_components(h, [1.0, 1.0, 5.0], 0.5).num_communities == 6


@settings(max_examples=60, deadline=None)
@given(hypergraphs(weighted=True), st.floats(0.1, 5.0), st.floats(0.1, 5.0))
def test_trim_is_monotone(h, t1, t2):
    lo, hi = sorted((t1, t2))
    fine = trim_and_components(h, h.weights, lo).labels
    coarse = trim_and_components(h, h.weights, hi).labels
    # raising the threshold only merges communities
    for c in np.unique(fine):
        assert np.unique(coarse[fine == c]).size == 1


def test_select_threshold_ties_go_low():
    h = Hypergraph(7, [(0, 1, 2), (3, 4, 5), (5, 6), (2, 3)])
    # tau = 1 leaves node 6 alone, tau = 2 attaches it; the bridge is heaviest
    sel = select_threshold(h, [1.0, 1.0, 2.0, 9.0], ThresholdCriterion(Criterion.HYPERGRAPH_MODULARITY))
    assert [row["tau"] for row in sel.curve] == [1.0, 2.0, 9.0]
    assert sel.tau == 2.0
    assert sel.clustering.num_communities == 2
    # same partition at two thresholds: pick the smaller
    sel = select_threshold(Hypergraph(3, [(0, 1), (0, 1), (1, 2)]), [1.0, 2.0, 9.0],
                           ThresholdCriterion(Criterion.NMI), truth=[0, 0, 1])
    assert sel.tau == 1.0


def test_select_threshold_fixed_and_errors():
    sel = select_threshold(TWO_TRIANGLES, [1.0, 3.0], ThresholdCriterion(Criterion.FIXED, 2.0))
    assert sel.tau == 2.0 and sel.clustering.num_communities == 4
    with pytest.raises(ValueError):
        select_threshold(TWO_TRIANGLES, [1.0, np.nan], ThresholdCriterion())
    with pytest.raises(ValueError):
        select_threshold(TWO_TRIANGLES, [1.0, 1.0], ThresholdCriterion(Criterion.NMI))
    with pytest.raises(ValueError):
        ThresholdCriterion(Criterion.FIXED)


def test_criterion_parse():
    assert ThresholdCriterion.parse("auto-c").kind is Criterion.GRAPH_MODULARITY
    assert ThresholdCriterion.parse("1.5") == ThresholdCriterion(Criterion.FIXED, 1.5)
    with pytest.raises(ValueError):
        ThresholdCriterion.parse("best")


@pytest.mark.parametrize("method", list(Method))
def test_cluster_recovers_toy(method):
    h, labels, _ = gen_toy(5, 3)
    res = cluster(h, FlowConfig(method, 10), ThresholdCriterion(Criterion.NMI), truth=labels)
    assert res.nmi == pytest.approx(1.0)
    assert res.clustering.method == method.value
    assert res.clustering.num_communities == 3
