"""Probability measures on graph supports and Wasserstein-1 solvers."""

from __future__ import annotations

import math
import os
import threading
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import dijkstra, shortest_path
from scipy.special import logsumexp

from .hypergraph import Hypergraph, WeightedGraph

# keep POT from importing torch / tensorflow / jax on startup
for _backend in ("TENSORFLOW", "PYTORCH", "JAX", "CUPY"):
    os.environ.setdefault(f"POT_BACKEND_DISABLE_{_backend}", "1")

import ot  # noqa: E402

try:
    from ot.lp.emd_wrap import emd_c as _emd_c
except ImportError:  # pragma: no cover - depends on POT layout
    _emd_c = None

MASS_TOL = 1e-12
PLAN_TOL = 1e-9
UNDERFLOW = 1e-300
EMD_MAX_ITER = 10_000_000


class TransportError(ArithmeticError):
    """Numerical failure while transporting mass."""


class DisconnectedSupportsError(TransportError):
    pass


class SinkhornError(TransportError):
    def __init__(self, message: str, best_cost: float, gap: float):
        super().__init__(message)
        self.best_cost = best_cost
        self.gap = gap


class EmptySupportError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ProbabilityMeasure:
    support: np.ndarray
    mass: np.ndarray

    def __post_init__(self):
        support = np.asarray(self.support, dtype=np.int64)
        mass = np.asarray(self.mass, dtype=float)
        if support.shape != mass.shape or support.ndim != 1:
            raise ValueError("support and mass must be 1-d arrays of equal length")
        if support.size == 0:
            raise ValueError("empty support")
        if np.any(mass < 0):
            raise ValueError("negative mass")
        if abs(mass.sum() - 1.0) > MASS_TOL:
            raise ValueError(f"masses sum to {mass.sum()!r}, not 1")
        if np.unique(support).size != support.size:
            raise ValueError("support ids must be distinct")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "mass", mass)

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.support.tolist(), self.mass.tolist()))


@dataclass(frozen=True, eq=False)
class TransportPlan:
    source: np.ndarray
    target: np.ndarray
    mass: np.ndarray
    cost: float

    def entries(self) -> list[tuple[int, int, float]]:
        return list(zip(self.source.tolist(), self.target.tolist(), self.mass.tolist()))


class MetricOracle:
    """Shortest-path distances on a weighted graph, computed one source row
    at a time and memoized.

    ``weights`` overrides the graph's own weights (used by the node flow,
    whose clique weights change every iteration). Rows live in a dense
    ``n x n`` buffer ``dist`` (only rows already requested are valid), so
    this is meant for graphs up to a few thousand nodes.
    """

    def __init__(self, graph: WeightedGraph, weights: np.ndarray | None = None):
        self.graph = graph
        self.weights = graph.weights if weights is None else np.asarray(weights, dtype=float)
        if self.weights.shape != graph.weights.shape:
            raise ValueError("weights must have one entry per graph edge")
        self._csr = graph.to_csr(self.weights)
        n = graph.n_nodes
        self.dist = np.empty((n, n))
        self._have = np.zeros(n, dtype=bool)
        self._lock = threading.Lock()

    def rows(self, sources) -> np.ndarray:
        sources = np.atleast_1d(np.asarray(sources, dtype=np.int64))
        missing = np.unique(sources[~self._have[sources]])
        if missing.size:
            with self._lock:
                missing = missing[~self._have[missing]]
                if missing.size > self.graph.n_nodes // 2:
                    self.dist[:] = shortest_path(self._csr, method="auto", directed=False)
                    self._have[:] = True
                elif missing.size:
                    self.dist[missing] = dijkstra(self._csr, directed=False, indices=missing)
                    self._have[missing] = True
        return self.dist[sources]

    def all_pairs(self) -> np.ndarray:
        self.rows(np.arange(self.graph.n_nodes))
        return self.dist

    def submatrix(self, sources, targets) -> np.ndarray:
        sources = np.asarray(sources, dtype=np.int64)
        targets = np.asarray(targets, dtype=np.int64)
        self.rows(sources)
        return self.dist[np.ix_(sources, targets)]

    def distance(self, u: int, v: int) -> float:
        return float(self.rows([u])[0, v])

    def edge_weight(self, u: int, v: int) -> float:
        return float(self.weights[self.graph.edge_id(u, v)])


def distances(oracle: MetricOracle, sources, targets) -> np.ndarray:
    return oracle.submatrix(sources, targets)


def neighbor_masses(direct: np.ndarray, alpha: float, p: float) -> np.ndarray:
    """Neighbor masses ``(1 - alpha) exp(-d^p) / C`` for direct weights ``direct``."""
    raw = np.exp(-np.power(direct, p))
    raw[raw < UNDERFLOW] = 0.0
    total = raw.sum()
    if total == 0.0:
        warnings.warn("all neighbor masses underflowed; using uniform neighbor masses",
                      RuntimeWarning, stacklevel=2)
        raw = np.ones_like(direct)
        total = raw.sum()
    return (1.0 - alpha) * raw / total


def node_measure(oracle: MetricOracle, x: int, alpha: float = 0.5, p: float = 1.0) -> ProbabilityMeasure:
    nbrs, eids = oracle.graph.incident[x]
    if nbrs.size == 0:
        raise ValueError(f"node {x} has no neighbors")
    masses = neighbor_masses(oracle.weights[eids], alpha, p)
    if alpha > 0:
        return ProbabilityMeasure(np.concatenate([[x], nbrs]), np.concatenate([[alpha], masses]))
    return ProbabilityMeasure(nbrs, masses)


def _proportional(weights, support: np.ndarray) -> ProbabilityMeasure:
    w = np.asarray(weights, dtype=float)[support]
    return ProbabilityMeasure(support, w / w.sum())


def edge_measure(h: Hypergraph, weights, x: int) -> ProbabilityMeasure:
    support = h.stars[x]
    if support.size == 0:
        raise EmptySupportError(f"node {x} has an empty star")
    return _proportional(weights, support)


def reduced_support(h: Hypergraph, x: int, y: int) -> np.ndarray:
    # edges holding both x and y sit in both stars, so one set difference suffices
    return np.setdiff1d(h.stars[x], h.stars[y], assume_unique=True)


def edge_measure_reduced(h: Hypergraph, weights, x: int, y: int) -> ProbabilityMeasure:
    support = reduced_support(h, x, y)
    if support.size == 0:
        raise EmptySupportError(f"reduced star empty for ({x}, {y})")
    return _proportional(weights, support)


def emd(a: np.ndarray, b: np.ndarray, cost: np.ndarray) -> tuple[np.ndarray, float]:
    """Exact optimal plan and cost between histograms ``a`` and ``b``."""
    cost = np.ascontiguousarray(cost, dtype=float)
    if not np.all(np.isfinite(cost)):
        raise DisconnectedSupportsError("disconnected supports: infinite transport cost")
    a = np.ascontiguousarray(a, dtype=float)
    b = np.ascontiguousarray(b, dtype=float) * (a.sum() / b.sum())
    if a.size == 1 or b.size == 1:
        plan = np.outer(a, b) / (b.sum() if a.size == 1 else a.sum())
        return plan, float(np.sum(plan * cost))
    if _emd_c is not None:
        plan, value, _, _, status = _emd_c(a, b, cost, EMD_MAX_ITER, 1)
        if status != 1:
            raise TransportError(f"network simplex did not reach optimality (status {status})")
        return plan, float(value)
    plan = ot.emd(a, b, cost, numItermax=EMD_MAX_ITER)
    return plan, float(np.sum(plan * cost))


def emd_cost(a: np.ndarray, b: np.ndarray, cost: np.ndarray) -> float:
    return emd(a, b, cost)[1]


def wasserstein1_exact(mu: ProbabilityMeasure, nu: ProbabilityMeasure, cost) -> TransportPlan:
    cost = np.asarray(cost, dtype=float)
    if cost.shape != (mu.support.size, nu.support.size):
        raise ValueError(f"cost matrix shape {cost.shape} does not match supports")
    plan, value = emd(mu.mass, nu.mass, cost)
    i, j = np.nonzero(plan > 0)
    return TransportPlan(mu.support[i], nu.support[j], plan[i, j], value)


def _round_to_polytope(plan: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # Altschuler, Weed & Rigollet rounding onto the transport polytope
    r = plan.sum(axis=1)
    plan = plan * np.minimum(1.0, np.divide(a, r, out=np.ones_like(a), where=r > 0))[:, None]
    c = plan.sum(axis=0)
    plan = plan * np.minimum(1.0, np.divide(b, c, out=np.ones_like(b), where=c > 0))[None, :]
    err_a = a - plan.sum(axis=1)
    err_b = b - plan.sum(axis=0)
    total = err_a.sum()
    if total > 0:
        plan = plan + np.outer(err_a, err_b) / total
    return plan


def sinkhorn_plan(a: np.ndarray, b: np.ndarray, cost: np.ndarray, epsilon: float,
                  max_iter: int = 200_000) -> tuple[np.ndarray, float]:
    """Entropic plan rounded onto the polytope, with total error below ``epsilon``.

    The entropic bias is at most ``reg * log(n m)`` and rounding costs at
    most ``2 max(C) * (marginal error)``; ``reg`` and the stopping tolerance
    split ``epsilon`` between the two. The regularization is annealed from
    ``max(C)`` down to its target, warm-starting the dual potentials.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    cost = np.asarray(cost, dtype=float)
    if not np.all(np.isfinite(cost)):
        raise DisconnectedSupportsError("disconnected supports: infinite transport cost")
    keep_a, keep_b = a > 0, b > 0
    a, b, cost = a[keep_a], b[keep_b], cost[np.ix_(keep_a, keep_b)]
    a = a / a.sum()
    b = b / b.sum()
    n, m = cost.shape
    cmax = float(cost.max()) if cost.size else 0.0
    if n == 1 or m == 1 or cmax == 0.0:
        plan = np.outer(a, b)
        full = np.zeros((keep_a.size, keep_b.size))
        full[np.ix_(keep_a, keep_b)] = plan
        return full, float(np.sum(plan * cost))

    target_reg = epsilon / (2.0 * max(math.log(n * m), 1.0))
    tol = epsilon / (8.0 * cmax)
    log_a, log_b = np.log(a), np.log(b)
    f, g = np.zeros(n), np.zeros(m)
    reg = max(cmax, target_reg)
    iters = 0
    err = math.inf
    while True:
        final = reg <= target_reg
        stage_tol = tol if final else max(tol, 1e-3)
        while iters < max_iter:
            iters += 1
            f = reg * (log_a - logsumexp((g[None, :] - cost) / reg, axis=1))
            g = reg * (log_b - logsumexp((f[:, None] - cost) / reg, axis=0))
            if iters % 10 == 0 or final:
                plan = np.exp((f[:, None] + g[None, :] - cost) / reg)
                err = np.abs(plan.sum(axis=1) - a).sum()
                if err <= stage_tol:
                    break
        if final or iters >= max_iter:
            break
        reg = max(reg / 2.0, target_reg)

    plan = np.exp((f[:, None] + g[None, :] - cost) / reg)
    rounded = _round_to_polytope(plan, a, b)
    value = float(np.sum(rounded * cost))
    if err > tol:
        gap = reg * math.log(n * m) + 2.0 * cmax * err
        raise SinkhornError(f"Sinkhorn did not converge in {max_iter} iterations "
                            f"(marginal error {err:.3g})", value, gap)
    full = np.zeros((keep_a.size, keep_b.size))
    full[np.ix_(keep_a, keep_b)] = rounded
    return full, value


def sinkhorn_cost(a: np.ndarray, b: np.ndarray, cost: np.ndarray, epsilon: float) -> float:
    return sinkhorn_plan(np.asarray(a, float), np.asarray(b, float), cost, epsilon)[1]


def wasserstein1_sinkhorn(mu: ProbabilityMeasure, nu: ProbabilityMeasure, cost, epsilon: float) -> float:
    cost = np.asarray(cost, dtype=float)
    if cost.shape != (mu.support.size, nu.support.size):
        raise ValueError(f"cost matrix shape {cost.shape} does not match supports")
    return sinkhorn_cost(mu.mass, nu.mass, cost, epsilon)
