"""Node-Ricci and edge-Ricci curvature of adjacent node pairs."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .hypergraph import Hypergraph, WeightedGraph
from .transport import (
    EmptySupportError,
    MetricOracle,
    edge_measure,
    edge_measure_reduced,
    emd_cost,
    neighbor_masses,
    node_measure,
    reduced_support,
    sinkhorn_cost,
)


class Aggregation(enum.Enum):
    MAX = "max"
    AVERAGE = "avg"


class MeasureVariant(enum.Enum):
    STANDARD = "standard"
    REDUCED = "reduced"


@dataclass(frozen=True)
class CurvatureConfig:
    alpha: float = 0.5
    p: float = 1.0
    aggregation: Aggregation = Aggregation.MAX
    solver: str = "exact"
    epsilon: float | None = None
    measure_variant: MeasureVariant = MeasureVariant.STANDARD

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.p < 0:
            raise ValueError(f"p must be >= 0, got {self.p}")
        if self.solver not in ("exact", "sinkhorn"):
            raise ValueError(f"unknown solver {self.solver!r}")
        if self.solver == "sinkhorn" and not (self.epsilon and self.epsilon > 0):
            raise ValueError("sinkhorn solver needs epsilon > 0")

    def transport_cost(self, a: np.ndarray, b: np.ndarray, cost: np.ndarray) -> float:
        if self.solver == "sinkhorn":
            return sinkhorn_cost(a, b, cost, self.epsilon)
        return emd_cost(a, b, cost)


def parse_solver(text: str) -> tuple[str, float | None]:
    """``"exact"`` or ``"sinkhorn:<eps>"`` -> (solver, epsilon)."""
    if text == "exact":
        return "exact", None
    name, _, eps = text.partition(":")
    if name != "sinkhorn" or not eps:
        raise ValueError(f"solver must be 'exact' or 'sinkhorn:<eps>', got {text!r}")
    return "sinkhorn", float(eps)


def aggregate(values: Sequence[float], agg: Aggregation) -> float:
    values = list(values)
    if not values:
        raise ValueError("cannot aggregate an empty list")
    if agg is Aggregation.MAX:
        return max(values)
    return math.fsum(values) / len(values)


def node_ricci_pair(oracle: MetricOracle, x: int, y: int, cfg: CurvatureConfig = CurvatureConfig()) -> float:
    """``1 - W(nu_x, nu_y) / w(x, y)`` on the clique graph behind ``oracle``."""
    try:
        d_xy = oracle.edge_weight(x, y)
    except KeyError:
        raise ValueError(f"nodes {x} and {y} are not adjacent") from None
    mu = node_measure(oracle, x, cfg.alpha, cfg.p)
    nu = node_measure(oracle, y, cfg.alpha, cfg.p)
    cost = oracle.submatrix(mu.support, nu.support)
    return 1.0 - cfg.transport_cost(mu.mass, nu.mass, cost) / d_xy


def shared_edges(h: Hypergraph, x: int, y: int) -> np.ndarray:
    return np.intersect1d(h.stars[x], h.stars[y], assume_unique=True)


def edge_ricci_pair(h: Hypergraph, weights, line_oracle: MetricOracle, x: int, y: int,
                    cfg: CurvatureConfig = CurvatureConfig()) -> float:
    """``1 - W(mu_x, mu_y) / max_{e in St(x) & St(y)} w(e)`` with line-graph costs.

    With the reduced measures, an empty reduced star on either side gives
    curvature 1 (nothing to move, no stretching).
    """
    weights = np.asarray(weights, dtype=float)
    shared = shared_edges(h, x, y)
    if x == y or shared.size == 0:
        raise ValueError(f"nodes {x} and {y} are not adjacent")
    if cfg.measure_variant is MeasureVariant.REDUCED:
        try:
            mu = edge_measure_reduced(h, weights, x, y)
            nu = edge_measure_reduced(h, weights, y, x)
        except EmptySupportError:
            return 1.0
    else:
        mu = edge_measure(h, weights, x)
        nu = edge_measure(h, weights, y)
    cost = line_oracle.submatrix(mu.support, nu.support)
    return 1.0 - cfg.transport_cost(mu.mass, nu.mass, cost) / weights[shared].max()


def node_ricci_curvatures(oracle: MetricOracle, cfg: CurvatureConfig,
                          edge_ids: np.ndarray | None = None) -> np.ndarray:
    """Curvature of every clique-graph edge (or of ``edge_ids``), in edge order."""
    return 1.0 - node_transport_ratios(oracle, cfg, edge_ids)


def node_transport_ratios(oracle: MetricOracle, cfg: CurvatureConfig,
                          edge_ids: np.ndarray | None = None) -> np.ndarray:
    """``W(nu_x, nu_y) / w(x, y)`` per clique edge, i.e. ``1 - kappa``.

    The flow multiplies weights by this ratio directly; going through
    ``1 - kappa`` would cancel digits when ``kappa`` is close to 1.
    """
    g: WeightedGraph = oracle.graph
    ids = np.arange(g.n_edges) if edge_ids is None else np.asarray(edge_ids)
    ends = np.unique(np.concatenate([g.edge_u[ids], g.edge_v[ids]]))
    measures: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for x in ends.tolist():
        nbrs, eids = g.incident[x]
        masses = neighbor_masses(oracle.weights[eids], cfg.alpha, cfg.p)
        if cfg.alpha > 0:
            measures[x] = (np.concatenate([[x], nbrs]), np.concatenate([[cfg.alpha], masses]))
        else:
            measures[x] = (nbrs, masses)
    oracle.rows(ends)
    dist = oracle.dist
    out = np.empty(ids.size)
    for k, i in enumerate(ids.tolist()):
        sx, mx = measures[int(g.edge_u[i])]
        sy, my = measures[int(g.edge_v[i])]
        w = cfg.transport_cost(mx, my, dist[np.ix_(sx, sy)])
        out[k] = w / oracle.weights[i]
    return out


def star_residuals(wx: np.ndarray, wy: np.ndarray, shared_x: np.ndarray,
                   shared_y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Masses of two star measures left to move once their common part stays put.

    For a metric cost, mass common to both measures can stay where it is.
    Both stars are proportional to the same weights on shared edges, so the
    surplus there is ``w (Sy - Sx) / (Sx Sy)``; taking it in this form avoids
    subtracting two nearly equal normalized masses, which loses every digit
    once some weights have collapsed.
    """
    sx_total, sy_total = math.fsum(wx), math.fsum(wy)
    gap = math.fsum(wy[~shared_y]) - math.fsum(wx[~shared_x])
    ra = np.where(shared_x, 0.0, wx / sx_total)
    rb = np.where(shared_y, 0.0, wy / sy_total)
    if gap > 0:
        ra[shared_x] = wx[shared_x] * (gap / (sx_total * sy_total))
    elif gap < 0:
        rb[shared_y] = wy[shared_y] * (-gap / (sx_total * sy_total))
    return ra, rb


class EdgePairTable:
    """Static per-pair data for the edge-Ricci sweep.

    The line graph never changes during the flow, so supports, shared edges
    and cost submatrices are computed once and reused by every iteration.
    """

    def __init__(self, h: Hypergraph, line_oracle: MetricOracle, pairs_u: np.ndarray,
                 pairs_v: np.ndarray, variant: MeasureVariant, cache_costs: bool = True):
        self.h = h
        self.oracle = line_oracle
        self.pairs_u = np.asarray(pairs_u, dtype=np.int64)
        self.pairs_v = np.asarray(pairs_v, dtype=np.int64)
        self.variant = variant
        self.shared, self.sx, self.sy = [], [], []
        for x, y in zip(self.pairs_u.tolist(), self.pairs_v.tolist()):
            shared = shared_edges(h, x, y)
            if shared.size == 0:
                raise ValueError(f"nodes {x} and {y} are not adjacent")
            self.shared.append(shared)
            if variant is MeasureVariant.REDUCED:
                self.sx.append(reduced_support(h, x, y))
                self.sy.append(reduced_support(h, y, x))
            else:
                self.sx.append(h.stars[x])
                self.sy.append(h.stars[y])
        self.shared_x = [np.isin(a, s) for a, s in zip(self.sx, self.shared)]
        self.shared_y = [np.isin(b, s) for b, s in zip(self.sy, self.shared)]
        self.costs = None
        if cache_costs:
            used = np.unique(np.concatenate(self.sx + [np.zeros(0, np.int64)]))
            line_oracle.rows(used)
            dist = line_oracle.dist
            self.costs = [dist[np.ix_(a, b)] for a, b in zip(self.sx, self.sy)]

    def __len__(self) -> int:
        return self.pairs_u.size

    def curvatures(self, weights: np.ndarray, cfg: CurvatureConfig) -> np.ndarray:
        return 1.0 - self.ratios(weights, cfg)

    def ratios(self, weights: np.ndarray, cfg: CurvatureConfig) -> np.ndarray:
        """``W(mu_x, mu_y) / max shared weight`` per pair, i.e. ``1 - kappa``."""
        weights = np.asarray(weights, dtype=float)
        out = np.empty(len(self))
        for k in range(len(self)):
            sx, sy = self.sx[k], self.sy[k]
            if sx.size == 0 or sy.size == 0:
                out[k] = 0.0
                continue
            cost = self.costs[k] if self.costs is not None else self.oracle.submatrix(sx, sy)
            ra, rb = star_residuals(weights[sx], weights[sy], self.shared_x[k], self.shared_y[k])
            total = math.fsum(ra)
            if total == 0.0:
                out[k] = 0.0
                continue
            i, j = ra > 0, rb > 0
            w = total * cfg.transport_cost(ra[i] / total, rb[j] / math.fsum(rb), cost[np.ix_(i, j)])
            out[k] = w / weights[self.shared[k]].max()
        return out
