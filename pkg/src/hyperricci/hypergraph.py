"""Hypergraphs, their duals, and the clique / line graph expansions."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp


class HypergraphError(ValueError):
    pass


class WeightingScheme(enum.Enum):
    UNIFORM = "uniform"
    JACCARD = "jaccard"


def jaccard(u: Iterable, v: Iterable) -> float:
    u, v = set(u), set(v)
    union = len(u | v)
    return len(u & v) / union if union else 0.0


@dataclass(frozen=True)
class Hypergraph:
    """Nodes ``0..n_nodes-1`` and an ordered list of hyperedges.

    Each hyperedge is stored as a sorted tuple of distinct node ids.
    Duplicate hyperedges are allowed and keep distinct edge ids.
    Construction does not check the invariants, use :func:`validate`
    or :meth:`check` for that.
    """

    n_nodes: int
    edges: tuple[tuple[int, ...], ...]
    edge_weights: tuple[float, ...] = ()

    def __init__(self, n_nodes: int, edges: Iterable[Iterable[int]],
                 edge_weights: Sequence[float] | None = None):
        edges = tuple(tuple(sorted({int(v) for v in e})) for e in edges)
        if edge_weights is None or len(edge_weights) == 0:
            edge_weights = (1.0,) * len(edges)
        edge_weights = tuple(float(w) for w in edge_weights)
        if len(edge_weights) != len(edges):
            raise HypergraphError(
                f"{len(edge_weights)} weights given for {len(edges)} edges")
        object.__setattr__(self, "n_nodes", int(n_nodes))
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "edge_weights", edge_weights)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def weights(self) -> np.ndarray:
        return np.asarray(self.edge_weights, dtype=float)

    def with_weights(self, weights: Sequence[float]) -> "Hypergraph":
        return Hypergraph(self.n_nodes, self.edges, list(weights))

    @cached_property
    def stars(self) -> tuple[np.ndarray, ...]:
        """``stars[v]`` is the sorted array of edge ids containing ``v``."""
        buckets: list[list[int]] = [[] for _ in range(self.n_nodes)]
        for j, e in enumerate(self.edges):
            for v in e:
                if 0 <= v < self.n_nodes:
                    buckets[v].append(j)
        return tuple(np.asarray(b, dtype=np.int64) for b in buckets)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(s) for s in self.stars], dtype=np.int64)

    @cached_property
    def incidence(self) -> sp.csr_matrix:
        """Sparse n x m 0/1 incidence matrix."""
        rows = [v for e in self.edges for v in e]
        cols = [j for j, e in enumerate(self.edges) for _ in e]
        data = np.ones(len(rows), dtype=np.int64)
        return sp.csr_matrix((data, (rows, cols)),
                             shape=(self.n_nodes, self.n_edges))

    def check(self) -> "Hypergraph":
        problems = validate(self)
        if problems:
            raise HypergraphError("; ".join(problems))
        return self


def validate(h: Hypergraph) -> list[str]:
    """List every broken invariant of ``h``; empty when ``h`` is well formed."""
    problems = []
    if h.n_nodes < 0:
        problems.append(f"negative node count {h.n_nodes}")
    for j, e in enumerate(h.edges):
        if len(e) < 2:
            problems.append(f"edge {j}: size {len(e)} < 2")
        for v in e:
            if v < 0 or v >= h.n_nodes:
                problems.append(f"edge {j}: node {v} out of range [0, {h.n_nodes})")
    for j, w in enumerate(h.edge_weights):
        if not (math.isfinite(w) and w > 0):
            problems.append(f"edge {j}: weight {w!r} is not positive and finite")
    return problems


def star(h: Hypergraph, v: int) -> set[int]:
    if not 0 <= v < h.n_nodes:
        raise HypergraphError(f"node {v} out of range [0, {h.n_nodes})")
    return set(h.stars[v].tolist())


def dual(h: Hypergraph) -> Hypergraph:
    """Swap nodes and edges: one dual node per edge, one dual edge per node.

    Nodes of degree < 2 would give dual edges of size < 2; they are dropped
    with a warning.
    """
    kept, dropped = [], []
    for v, s in enumerate(h.stars):
        (kept if len(s) >= 2 else dropped).append(v)
    if dropped:
        warnings.warn(f"dual: dropped nodes of degree < 2: {dropped}", stacklevel=2)
    return Hypergraph(h.n_edges, [h.stars[v].tolist() for v in kept])


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Undirected simple graph with positive edge weights.

    Edges are stored once as ``(u, v)`` with ``u < v``, sorted
    lexicographically.
    """

    n_nodes: int
    edge_u: np.ndarray
    edge_v: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        for name, dtype in (("edge_u", np.int64), ("edge_v", np.int64), ("weights", float)):
            arr = np.array(getattr(self, name), dtype=dtype)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if np.any(self.edge_u >= self.edge_v):
            raise HypergraphError("edges must satisfy u < v (no self loops)")
        if self.weights.size and not np.all(self.weights > 0):
            raise HypergraphError("edge weights must be > 0")
        keys = self.edge_u * self.n_nodes + self.edge_v
        if np.any(np.diff(keys) <= 0):
            raise HypergraphError("edges must be sorted and unique")

    @property
    def n_edges(self) -> int:
        return int(self.edge_u.size)

    @cached_property
    def keys(self) -> np.ndarray:
        return self.edge_u.astype(np.int64) * self.n_nodes + self.edge_v

    def edge_id(self, u: int, v: int) -> int:
        """Index of edge ``{u, v}``; raises ``KeyError`` if absent."""
        if u > v:
            u, v = v, u
        key = u * self.n_nodes + v
        i = int(np.searchsorted(self.keys, key))
        if u == v or i >= self.keys.size or self.keys[i] != key:
            raise KeyError(f"({u}, {v}) is not an edge")
        return i

    def edge_ids(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        keys = lo.astype(np.int64) * self.n_nodes + hi
        idx = np.searchsorted(self.keys, keys)
        if np.any(idx >= self.keys.size) or np.any(self.keys[np.minimum(idx, self.keys.size - 1)] != keys):
            raise KeyError("some pairs are not edges")
        return idx

    def weight(self, u: int, v: int) -> float:
        return float(self.weights[self.edge_id(u, v)])

    @cached_property
    def incident(self) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
        """Per node: (neighbor ids, incident edge ids), neighbors ascending."""
        ends = np.concatenate([self.edge_u, self.edge_v])
        others = np.concatenate([self.edge_v, self.edge_u])
        eids = np.concatenate([np.arange(self.n_edges)] * 2)
        order = np.lexsort((others, ends))
        ends, others, eids = ends[order], others[order], eids[order]
        bounds = np.searchsorted(ends, np.arange(self.n_nodes + 1))
        return tuple((others[a:b], eids[a:b]) for a, b in zip(bounds[:-1], bounds[1:]))

    def neighbors(self, u: int) -> np.ndarray:
        return self.incident[u][0]

    def to_csr(self, weights: np.ndarray | None = None) -> sp.csr_matrix:
        w = self.weights if weights is None else np.asarray(weights, dtype=float)
        rows = np.concatenate([self.edge_u, self.edge_v])
        cols = np.concatenate([self.edge_v, self.edge_u])
        return sp.csr_matrix((np.concatenate([w, w]), (rows, cols)),
                             shape=(self.n_nodes, self.n_nodes))

    def edge_set(self) -> set[tuple[int, int]]:
        return set(zip(self.edge_u.tolist(), self.edge_v.tolist()))


def _pairs_from_gram(gram: sp.spmatrix, n: int, sizes: np.ndarray, scheme: WeightingScheme) -> WeightedGraph:
    upper = sp.triu(gram, k=1).tocoo()
    u, v, inter = upper.row.astype(np.int64), upper.col.astype(np.int64), upper.data
    keep = inter > 0
    u, v, inter = u[keep], v[keep], inter[keep].astype(float)
    order = np.lexsort((v, u))
    u, v, inter = u[order], v[order], inter[order]
    if scheme is WeightingScheme.UNIFORM:
        w = np.ones(u.size)
    elif scheme is WeightingScheme.JACCARD:
        union = sizes[u] + sizes[v] - inter
        w = union / inter
    else:
        raise ValueError(f"unknown weighting scheme {scheme!r}")
    return WeightedGraph(n, u, v, w)


def clique_expansion(h: Hypergraph, scheme: WeightingScheme = WeightingScheme.UNIFORM) -> WeightedGraph:
    """Graph on the nodes of ``h``; ``x ~ y`` iff some hyperedge holds both.

    Jaccard weights are ``1 / J(St(x), St(y))``, stars counted by edge id.
    """
    inc = h.incidence
    return _pairs_from_gram(inc @ inc.T, h.n_nodes, h.degrees, scheme)


def line_expansion(h: Hypergraph, scheme: WeightingScheme = WeightingScheme.UNIFORM) -> WeightedGraph:
    """Graph with one node per hyperedge, adjacent iff the hyperedges meet."""
    inc = h.incidence
    sizes = np.array([len(e) for e in h.edges], dtype=np.int64)
    return _pairs_from_gram(inc.T @ inc, h.n_edges, sizes, scheme)
