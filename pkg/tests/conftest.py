import numpy as np
import pytest
from hypothesis import strategies as st

from hyperricci.hypergraph import Hypergraph


@st.composite
def hypergraphs(draw, max_nodes=9, max_edges=8, max_size=5, weighted=False):
    n = draw(st.integers(3, max_nodes))
    m = draw(st.integers(1, max_edges))
    edges = []
    for _ in range(m):
        size = draw(st.integers(2, min(max_size, n)))
        edges.append(draw(st.lists(st.integers(0, n - 1), min_size=size, max_size=size, unique=True)))
    weights = None
    if weighted:
        weights = draw(st.lists(st.floats(0.1, 5.0), min_size=m, max_size=m))
    return Hypergraph(n, edges, weights)


def random_hypergraph(rng: np.random.Generator, n=12, m=10, max_size=5) -> Hypergraph:
    edges = [rng.choice(n, size=int(rng.integers(2, max_size + 1)), replace=False).tolist() for _ in range(m)]
    return Hypergraph(n, edges)


def dense_incidence(h: Hypergraph) -> np.ndarray:
    inc = np.zeros((h.n_nodes, h.n_edges), dtype=int)
    for j, e in enumerate(h.edges):
        for v in e:
            inc[v, j] = 1
    return inc


_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance():
    def record(criterion, ok, detail):
        _ACCEPTANCE.append(f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
