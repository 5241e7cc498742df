import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from scipy.sparse.csgraph import floyd_warshall

from hyperricci.curvature import Aggregation, CurvatureConfig, MeasureVariant
from hyperricci.flow import MIN_WEIGHT, FlowConfig, Method, edge_ricci_flow, node_ricci_flow, run_flow
from hyperricci.hypergraph import Hypergraph, WeightingScheme
from hyperricci.synthgen import EdgeClass, gen_toy

from conftest import hypergraphs
from test_transport import lp_oracle

TOY_EDGE = FlowConfig(Method.EDGE, 10, CurvatureConfig(measure_variant=MeasureVariant.REDUCED),
                      WeightingScheme.UNIFORM, keep_history=True)


def dense_pairs(h):
    pairs = sorted({(e[i], e[j]) for e in h.edges for i in range(len(e)) for j in range(i + 1, len(e))})
    return pairs


def reference_node_flow(h, iterations, alpha, p, agg, uniform=False):
    """Dense re-implementation: clique matrix, Floyd-Warshall, LP transport."""
    n = h.n_nodes
    stars = [set(j for j, e in enumerate(h.edges) if v in e) for v in range(n)]
    pairs = dense_pairs(h)
    w = {(x, y): 1.0 if uniform else len(stars[x] | stars[y]) / len(stars[x] & stars[y]) for x, y in pairs}
    for _ in range(iterations):
        mat = np.zeros((n, n))
        for (x, y), val in w.items():
            mat[x, y] = mat[y, x] = val
        # dense input would drop weights below ~1e-8, so go through a sparse matrix
        d = floyd_warshall(sp.csr_matrix(mat), directed=False)

        def measure(v):
            nbrs = np.flatnonzero(mat[v])
            raw = np.exp(-mat[v, nbrs] ** p)
            mass = (1 - alpha) * raw / raw.sum()
            return np.concatenate([[v], nbrs]), np.concatenate([[alpha], mass])

        new = {}
        for (x, y), val in w.items():
            sx, a = measure(x)
            sy, b = measure(y)
            # (1 - kappa) * val is just the transport cost
            new[(x, y)] = max(lp_oracle(a, b, d[np.ix_(sx, sy)]), MIN_WEIGHT)
        w = new
    out = []
    for e in h.edges:
        vals = [w[(e[i], e[j])] for i in range(len(e)) for j in range(i + 1, len(e))]
        out.append(max(vals) if agg == "max" else np.mean(vals))
    return np.array(out)


def reference_edge_flow(h, iterations, agg):
    m = h.n_edges
    sets = [set(e) for e in h.edges]
    mat = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            inter = len(sets[i] & sets[j])
            if inter:
                mat[i, j] = mat[j, i] = len(sets[i] | sets[j]) / inter
    d = floyd_warshall(sp.csr_matrix(mat), directed=False)
    stars = [[j for j in range(m) if v in sets[j]] for v in range(h.n_nodes)]
    w = np.ones(m)
    for _ in range(iterations):
        ratio = {}
        for x, y in dense_pairs(h):
            a, b = w[stars[x]] / w[stars[x]].sum(), w[stars[y]] / w[stars[y]].sum()
            shared = set(stars[x]) & set(stars[y])
            ratio[(x, y)] = lp_oracle(a, b, d[np.ix_(stars[x], stars[y])]) / max(w[list(shared)])
        new = np.empty(m)
        for j, e in enumerate(h.edges):
            factors = [ratio[(e[i], e[k])] for i in range(len(e)) for k in range(i + 1, len(e))]
            factor = max(factors) if agg == "max" else np.mean(factors)
            new[j] = max(factor * w[j], MIN_WEIGHT)
        w = new
    return w


@settings(max_examples=25, deadline=None)
@given(hypergraphs(max_nodes=7, max_edges=5, max_size=4))
def test_node_flow_matches_reference(h):
    for agg in (Aggregation.MAX, Aggregation.AVERAGE):
        cfg = FlowConfig(Method.NODE, 3, CurvatureConfig(aggregation=agg))
        got = node_ricci_flow(h, cfg).edge_weights
        want = reference_node_flow(h, 3, 0.5, 1.0, agg.value)
        assert np.allclose(got, want, rtol=1e-8, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(hypergraphs(max_nodes=7, max_edges=5, max_size=4))
def test_edge_flow_matches_reference(h):
    for agg in (Aggregation.MAX, Aggregation.AVERAGE):
        cfg = FlowConfig(Method.EDGE, 3, CurvatureConfig(aggregation=agg))
        got = edge_ricci_flow(h, cfg).edge_weights
        want = reference_edge_flow(h, 3, agg.value)
        assert np.allclose(got, want, rtol=1e-8, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(hypergraphs())
def test_weights_stay_positive(h):
    for method in Method:
        state = run_flow(h, FlowConfig(method, 4, keep_history=True))
        assert len(state.edge_history) == 5
        for w in state.edge_history:
            assert np.all(np.isfinite(w)) and np.all(w >= MIN_WEIGHT)


def test_flat_cycle_keeps_weights():
    h = Hypergraph(6, [[i, (i + 1) % 6] for i in range(6)])
    cfg = FlowConfig(Method.NODE, 3, CurvatureConfig(alpha=0.0, p=0.0), WeightingScheme.UNIFORM)
    assert np.allclose(node_ricci_flow(h, cfg).pair_weights, 1.0, atol=1e-12)


def test_single_edge_node_flow_is_fixed():
    cfg = FlowConfig(Method.NODE, 5, CurvatureConfig(alpha=0.0, p=0.0), WeightingScheme.UNIFORM)
    assert node_ricci_flow(Hypergraph(2, [[0, 1]]), cfg).edge_weights.tolist() == [1.0]


def test_single_edge_edge_flow_collapses():
    state = edge_ricci_flow(Hypergraph(2, [[0, 1]]), FlowConfig(iterations=1))
    assert state.edge_weights.tolist() == [MIN_WEIGHT]


def test_iterations_must_be_positive():
    with pytest.raises(ValueError):
        FlowConfig(iterations=0)


def toy_classes(tags):
    tags = np.array([t.value for t in tags])
    return (tags == EdgeClass.GATEWAY_EDGE.value, tags == EdgeClass.GATEWAY_BINARY.value,
            tags == EdgeClass.INTERNAL.value)


@pytest.mark.parametrize("a,b", [(3, 3), (6, 4), (4, 8)])
def test_toy_edge_flow_three_values(a, b):
    h, _, tags = gen_toy(a, b)
    gate, binary, internal = toy_classes(tags)
    hist = edge_ricci_flow(h, TOY_EDGE).edge_history
    for prev, w in zip(hist[:-1], hist[1:]):
        d1, d2 = prev[gate][0], prev[binary][0]
        assert np.allclose(w[gate], 2.0, atol=1e-9)
        assert np.allclose(w[internal], 1.0, atol=1e-9)
        assert np.allclose(w[binary], (2 * d1 + (a - 2) * d2) / (d1 + (a - 2) * d2), atol=1e-9)
        assert np.all((w[binary] >= 1.0) & (w[binary] <= 2.0))
        assert np.unique(np.round(w, 9)).size == 3


def test_toy_first_step_from_unit_weights():
    # all weights start at 1, so the first step sees d1 = 1
    h, _, tags = gen_toy(6, 4)
    _, binary, _ = toy_classes(tags)
    w1 = edge_ricci_flow(h, TOY_EDGE).edge_history[1]
    assert np.allclose(w1[binary], 6 / 5, atol=1e-12)


@pytest.mark.parametrize("a", [6, 10])
def test_toy_node_flow_internal_weights(a):
    h, _, tags = gen_toy(a, 3)
    _, _, internal = toy_classes(tags)
    cfg = FlowConfig(Method.NODE, 5, CurvatureConfig(alpha=0.0, p=0.0), WeightingScheme.UNIFORM, keep_history=True)
    hist = node_ricci_flow(h, cfg).edge_history
    want = reference_node_flow(h, 1, 0.0, 0.0, "max", uniform=True)
    assert np.allclose(hist[1], want, rtol=1e-9)
    for l, w in enumerate(hist):
        assert np.allclose(w[internal], (1 / (a - 1)) ** l, rtol=1e-9)


def test_flow_is_deterministic():
    h, _, _ = gen_toy(4, 3)
    for method in Method:
        a = run_flow(h, FlowConfig(method, 3, keep_history=True))
        b = run_flow(h, FlowConfig(method, 3, keep_history=True))
        for x, y in zip(a.edge_history, b.edge_history):
            assert np.array_equal(x, y)
