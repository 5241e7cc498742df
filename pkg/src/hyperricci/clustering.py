"""Threshold trimming, modularity-guided threshold choice and evaluation."""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .flow import FlowConfig, FlowState, run_flow
from .hypergraph import Hypergraph, WeightedGraph, WeightingScheme, clique_expansion


@dataclass
class Clustering:
    labels: np.ndarray
    method: str = ""
    tau: float | None = None
    iterations: int | None = None

    @property
    def num_communities(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0

    def communities(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.num_communities)]
        for v, c in enumerate(self.labels.tolist()):
            out[c].append(v)
        return out


class Criterion(enum.Enum):
    FIXED = "fixed"
    GRAPH_MODULARITY = "auto-c"
    HYPERGRAPH_MODULARITY = "auto-h"
    NMI = "auto-nmi"


@dataclass(frozen=True)
class ThresholdCriterion:
    kind: Criterion = Criterion.HYPERGRAPH_MODULARITY
    tau: float | None = None

    def __post_init__(self):
        if self.kind is Criterion.FIXED and (self.tau is None or self.tau < 0):
            raise ValueError("a fixed threshold needs tau >= 0")

    @classmethod
    def parse(cls, text: str) -> "ThresholdCriterion":
        if text in ("auto-h", "auto-c", "auto-nmi"):
            return cls(Criterion(text))
        try:
            return cls(Criterion.FIXED, float(text))
        except ValueError:
            raise ValueError(f"threshold must be auto-h, auto-c, auto-nmi or a number, got {text!r}") from None


def dense_labels(raw) -> np.ndarray:
    """Relabel to ``0..K-1`` in order of first appearance."""
    seen: dict = {}
    return np.array([seen.setdefault(r, len(seen)) for r in np.asarray(raw).tolist()], dtype=np.int64)


def trim_and_components(h: Hypergraph, weights, tau: float) -> Clustering:
    """Keep hyperedges with weight <= tau; communities are connected components."""
    weights = np.asarray(weights, dtype=float)
    kept = np.flatnonzero(weights <= tau)
    n, m = h.n_nodes, h.n_edges
    rows = [v for j in kept.tolist() for v in h.edges[j]]
    cols = [n + j for j in kept.tolist() for _ in h.edges[j]]
    bip = sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n + m, n + m))
    _, comp = connected_components(bip, directed=False)
    return Clustering(dense_labels(comp[:n]), tau=float(tau))


def _as_labels(partition) -> np.ndarray:
    return partition.labels if isinstance(partition, Clustering) else np.asarray(partition)


def graph_modularity(g: WeightedGraph, partition) -> float:
    """Modularity of the unweighted graph ``g`` under ``partition``."""
    labels = _as_labels(partition)
    if labels.size != g.n_nodes:
        raise ValueError("partition does not cover the graph nodes")
    n_edges = g.n_edges
    if n_edges == 0:
        raise ValueError("modularity undefined for a graph without edges")
    intra = int(np.sum(labels[g.edge_u] == labels[g.edge_v]))
    degree = np.bincount(np.concatenate([g.edge_u, g.edge_v]), minlength=g.n_nodes)
    vol = np.bincount(labels, weights=degree)
    return intra / n_edges - float(np.sum((vol / (2.0 * n_edges)) ** 2))


def hypergraph_modularity(h: Hypergraph, partition) -> float:
    """Strict hypergraph modularity.

    ``sum_c e(c)/|E| - sum_d (m_d/|E|) sum_c (vol(c)/vol(V))^d`` where
    ``e(c)`` counts hyperedges lying entirely in ``c``, ``m_d`` counts
    hyperedges of size ``d`` and degrees count incident hyperedges.
    """
    labels = _as_labels(partition)
    if labels.size != h.n_nodes:
        raise ValueError("partition does not cover the hypergraph nodes")
    m = h.n_edges
    if m == 0:
        raise ValueError("modularity undefined for a hypergraph without edges")
    inside = sum(1 for e in h.edges if len({labels[v] for v in e}) == 1)
    vol = np.bincount(labels, weights=h.degrees).astype(float)
    share = vol / vol.sum()
    sizes = Counter(len(e) for e in h.edges)
    expected = sum(count / m * float(np.sum(share ** d)) for d, count in sorted(sizes.items()))
    return inside / m - expected


def _entropy(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-np.sum(p * np.log(p)))


def nmi(a, b) -> float:
    """Normalized mutual information, arithmetic-mean normalization, natural log.

    Two single-class labelings score 1.
    """
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"label arrays differ in length: {a.size} vs {b.size}")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max() + 1, bi.max() + 1))
    np.add.at(table, (ai, bi), 1.0)
    ha, hb = _entropy(table.sum(axis=1)), _entropy(table.sum(axis=0))
    if ha == 0.0 and hb == 0.0:
        return 1.0
    n = table.sum()
    nz = table > 0
    outer = np.outer(table.sum(axis=1), table.sum(axis=0))
    mi = float(np.sum(table[nz] / n * np.log(table[nz] * n / outer[nz])))
    return min(1.0, max(0.0, mi / ((ha + hb) / 2.0)))


@dataclass
class ThresholdResult:
    tau: float
    clustering: Clustering
    score: float
    curve: list[dict] = field(default_factory=list)


def select_threshold(h: Hypergraph, weights, criterion: ThresholdCriterion,
                     truth=None, clique: WeightedGraph | None = None) -> ThresholdResult:
    """Scan every distinct weight as a threshold and keep the best one.

    Ties go to the smallest threshold. The returned curve records, for every
    candidate, the number of communities, both modularities, and the NMI
    when ``truth`` is given.
    """
    weights = np.asarray(weights, dtype=float)
    if not np.all(np.isfinite(weights)):
        raise ValueError("weights must be finite")
    if criterion.kind is Criterion.NMI and truth is None:
        raise ValueError("the NMI criterion needs ground-truth labels")
    if clique is None:
        clique = clique_expansion(h, WeightingScheme.UNIFORM)
    graph_q = clique.n_edges > 0

    def evaluate(tau: float) -> tuple[Clustering, dict]:
        c = trim_and_components(h, weights, tau)
        row = {"tau": tau, "communities": c.num_communities,
               "hypergraph_modularity": hypergraph_modularity(h, c),
               "graph_modularity": graph_modularity(clique, c) if graph_q else math.nan}
        if truth is not None:
            row["nmi"] = nmi(truth, c.labels)
        return c, row

    if criterion.kind is Criterion.FIXED:
        c, row = evaluate(criterion.tau)
        return ThresholdResult(criterion.tau, c, row["hypergraph_modularity"], [row])

    key = {Criterion.GRAPH_MODULARITY: "graph_modularity",
           Criterion.HYPERGRAPH_MODULARITY: "hypergraph_modularity",
           Criterion.NMI: "nmi"}[criterion.kind]
    candidates = np.unique(weights)
    results = [evaluate(float(t)) for t in candidates]
    curve = [row for _, row in results]
    scores = np.array([row[key] for row in curve])
    best = int(np.flatnonzero(scores >= scores.max() - 1e-12)[0])
    return ThresholdResult(float(candidates[best]), results[best][0], float(scores[best]), curve)


@dataclass
class ClusterResult:
    clustering: Clustering
    flow: FlowState
    threshold: ThresholdResult
    nmi: float | None = None

    @property
    def labels(self) -> np.ndarray:
        return self.clustering.labels


def cluster(h: Hypergraph, cfg: FlowConfig, criterion: ThresholdCriterion = ThresholdCriterion(),
            truth=None) -> ClusterResult:
    """Run the flow, pick a threshold, and cut the hypergraph into components."""
    state = run_flow(h, cfg)
    # graph modularity only looks at the clique's edge set, so any weighting works
    sel = select_threshold(h, state.edge_weights, criterion, truth, state.clique)
    sel.clustering.method = cfg.method.value
    sel.clustering.iterations = cfg.iterations
    score = nmi(truth, sel.clustering.labels) if truth is not None else None
    return ClusterResult(sel.clustering, state, sel, score)
