from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperricci.synthgen import EdgeClass, HsbmParams, _Stream, gen_hsbm, gen_toy, gen_uniform, toy_edge_counts


@pytest.mark.parametrize("a,b,nodes,edges", [(3, 3, 9, 10), (6, 4, 24, 61), (4, 8, 32, 49)])
def test_toy_sizes(a, b, nodes, edges):
    h, labels, tags = gen_toy(a, b)
    assert (h.n_nodes, h.n_edges) == (nodes, edges)
    assert Counter(tags) == toy_edge_counts(a, b)
    assert np.bincount(labels).tolist() == [a] * b


def test_toy_structure():
    h, labels, tags = gen_toy(5, 4)
    gateway = [e for e, t in zip(h.edges, tags) if t is EdgeClass.GATEWAY_EDGE]
    assert [sorted(e) for e in gateway] == [[0, 5, 10, 15]]
    for e, t in zip(h.edges, tags):
        if t is EdgeClass.GATEWAY_EDGE:
            continue
        assert len(e) == 2 and labels[e[0]] == labels[e[1]]
        assert (min(e) % 5 == 0) == (t is EdgeClass.GATEWAY_BINARY)
    with pytest.raises(ValueError):
        gen_toy(2, 3)


def test_hsbm_shape():
    p = HsbmParams(n=100, k=2, s_in=3, s_out=5, n_in=40, n_out=30, seed=4)
    h, labels = gen_hsbm(p)
    assert h.n_nodes == 100 and h.n_edges == 70
    assert Counter(len(e) for e in h.edges) == {3: 40, 5: 30}
    assert np.bincount(labels).tolist() == [50, 50]
    for e in h.edges[:40]:
        assert len({labels[v] for v in e}) == 1
    # round robin over communities
    assert Counter(int(labels[e[0]]) for e in h.edges[:40]) == {0: 20, 1: 20}
    for e in h.edges[40:]:
        assert {int(labels[v]) for v in e} == {0, 1}
        assert len(set(e)) == 5


def test_hsbm_per_community_count():
    h, _ = gen_hsbm(HsbmParams(60, 3, 2, 3, 10, 0, n_in_per_community=True))
    assert h.n_edges == 30


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32), st.integers(2, 4))
def test_hsbm_is_deterministic(seed, k):
    p = HsbmParams(12 * k, k, 3, k + 1, 20, 10, seed)
    h1, l1 = gen_hsbm(p)
    h2, l2 = gen_hsbm(p)
    assert h1.edges == h2.edges and np.array_equal(l1, l2)


def test_seeds_differ():
    a, _ = gen_hsbm(HsbmParams(100, 2, 4, 4, 50, 50, seed=1))
    b, _ = gen_hsbm(HsbmParams(100, 2, 4, 4, 50, 50, seed=2))
    assert a.edges != b.edges


@pytest.mark.parametrize("kwargs", [
    dict(n=101, k=2, s_in=2, s_out=2, n_in=1, n_out=1),
    dict(n=100, k=2, s_in=51, s_out=2, n_in=1, n_out=1),
    dict(n=100, k=4, s_in=2, s_out=3, n_in=1, n_out=1),
    dict(n=100, k=2, s_in=2, s_out=2, n_in=-1, n_out=1),
])
def test_hsbm_rejects_bad_params(kwargs):
    with pytest.raises(ValueError):
        HsbmParams(**kwargs)


def test_stream_matches_raw_pcg64():
    # the stream is nothing more than the raw outputs of a spawned PCG64
    seq = np.random.SeedSequence(7, spawn_key=(3,))
    raw = np.random.PCG64(seq).random_raw(5)
    s = _Stream(7, 3)
    assert [s.below(1 << 63) for _ in range(5)] == [int(r) % (1 << 63) for r in raw]


def test_stream_is_roughly_uniform():
    s = _Stream(0, 0)
    counts = np.bincount([s.below(6) for _ in range(6000)], minlength=6)
    # chi-square with 5 dof; 20.5 is the 0.999 quantile
    chi2 = float(np.sum((counts - 1000) ** 2 / 1000))
    assert chi2 < 20.5


def test_uniform_generator():
    h = gen_uniform(50, 30, 7, seed=3)
    assert h.n_edges == 30 and all(len(set(e)) == 7 for e in h.edges)
    assert gen_uniform(50, 30, 7, seed=3).edges == h.edges
    with pytest.raises(ValueError):
        gen_uniform(5, 3, 6)
