"""Experiment runners: NMI sweeps on the hypergraph SBM and per-iteration timings."""

from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .clustering import Criterion, ThresholdCriterion, cluster
from .curvature import CurvatureConfig, EdgePairTable, node_ricci_curvatures
from .flow import FlowConfig, Method
from .hypergraph import Hypergraph, WeightingScheme, clique_expansion, line_expansion
from .synthgen import HsbmParams, gen_hsbm, gen_uniform
from .transport import MetricOracle

log = logging.getLogger(__name__)

NMI_FIELDS = ["s_in", "s_out", "N_out", "method", "seed", "nmi"]
TIMING_FIELDS = ["K", "method", "rep", "seconds"]


def cell_seed(base: int, *key: int) -> int:
    """A 63-bit seed derived from the base seed and a cell key."""
    state = np.random.SeedSequence([base, *key]).generate_state(2, np.uint64)
    return int(state[0] >> np.uint64(1))


@dataclass
class SweepSpec:
    size_pairs: list[tuple[int, int]] = field(default_factory=lambda: [(2, 2)])
    n_out_values: list[int] = field(default_factory=lambda: [0, 50, 100, 200])
    n: int = 100
    k: int = 2
    n_in: int = 200
    repetitions: int = 5
    base_seed: int = 0
    methods: list[str] = field(default_factory=lambda: ["edge", "node"])
    iterations: int = 20
    n_in_per_community: bool = False

    def __post_init__(self):
        self.size_pairs = [tuple(p) for p in self.size_pairs]
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not self.size_pairs or not self.n_out_values or not self.methods:
            raise ValueError("empty sweep grid")
        for m in self.methods:
            Method(m)

    def cells(self):
        for (s_in, s_out), n_out in itertools.product(self.size_pairs, self.n_out_values):
            yield s_in, s_out, n_out

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


def sweep_instance(spec: SweepSpec, s_in: int, s_out: int, n_out: int, rep: int) -> tuple[Hypergraph, np.ndarray, int]:
    seed = cell_seed(spec.base_seed, s_in, s_out, n_out, rep)
    params = HsbmParams(spec.n, spec.k, s_in, s_out, spec.n_in, n_out, seed, spec.n_in_per_community)
    h, labels = gen_hsbm(params)
    return h, labels, seed


def run_nmi_sweep(spec: SweepSpec, flow_config: FlowConfig | None = None, progress=None) -> list[dict]:
    """One row per (cell, method, repetition), scored at the NMI-optimal threshold.

    Both methods see the same generated hypergraphs. A failing run is logged
    and recorded with NaN so the rest of the sweep proceeds.
    """
    base = flow_config or FlowConfig(iterations=spec.iterations)
    rows = []
    for s_in, s_out, n_out in spec.cells():
        for rep in range(spec.repetitions):
            h, labels, seed = sweep_instance(spec, s_in, s_out, n_out, rep)
            for name in spec.methods:
                cfg = FlowConfig(Method(name), base.iterations, base.curvature, base.weighting)
                try:
                    score = cluster(h, cfg, ThresholdCriterion(Criterion.NMI), truth=labels).nmi
                except Exception as exc:  # noqa: BLE001 - failed cells are data
                    log.warning("cell s_in=%d s_out=%d N_out=%d %s seed=%d failed: %s",
                                s_in, s_out, n_out, name, seed, exc)
                    score = math.nan
                row = {"s_in": s_in, "s_out": s_out, "N_out": n_out, "method": name,
                       "seed": seed, "nmi": score}
                rows.append(row)
                if progress:
                    progress(row)
    return rows


def summarize(rows: list[dict], key=("s_in", "s_out", "N_out", "method"), value="nmi") -> dict[tuple, tuple[float, float]]:
    """Mean and (population) std of ``value`` per group."""
    groups: dict[tuple, list[float]] = {}
    for row in rows:
        groups.setdefault(tuple(row[k] for k in key), []).append(float(row[value]))
    return {g: (float(np.mean(v)), float(np.std(v))) for g, v in groups.items()}


@dataclass
class TimingSpec:
    k_values: list[int] = field(default_factory=lambda: [20, 60, 100])
    n: int = 1000
    m: int = 300
    repetitions: int = 5
    base_seed: int = 0
    methods: list[str] = field(default_factory=lambda: ["edge", "node"])
    # pairs whose transport is actually solved; the rest is extrapolated
    sample_pairs: int = 200
    node_sample_pairs: int = 10
    # node transport switches to Sinkhorn at and above this K
    sinkhorn_from_k: int | None = 100
    sinkhorn_epsilon: float = 0.1
    timeout: float = 600.0

    def __post_init__(self):
        if any(k < 2 for k in self.k_values):
            raise ValueError("K must be >= 2")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        for m in self.methods:
            Method(m)

    @classmethod
    def from_dict(cls, d: dict) -> "TimingSpec":
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


class CellTimeout(Exception):
    pass


def _sample(total: int, size: int, seed: int) -> np.ndarray:
    if size >= total:
        return np.arange(total)
    return np.sort(np.random.Generator(np.random.PCG64(seed)).choice(total, size, replace=False))


def time_node_iteration(h: Hypergraph, cfg: CurvatureConfig, sample: int, seed: int,
                        deadline: float = math.inf) -> float:
    """Seconds for one node-flow iteration on the unweighted clique expansion.

    All-pairs shortest paths are timed in full; transport is timed on a
    sample of clique edges (after one discarded warm-up solve) and scaled
    to the full edge count.
    """
    g = clique_expansion(h, WeightingScheme.UNIFORM)
    t0 = time.perf_counter()
    oracle = MetricOracle(g)
    oracle.rows(np.arange(g.n_nodes))
    t_paths = time.perf_counter() - t0
    ids = _sample(g.n_edges, sample + 1, seed)
    node_ricci_curvatures(oracle, cfg, ids[:1])
    per_pair = []
    for i in ids[1:].tolist():
        t0 = time.perf_counter()
        node_ricci_curvatures(oracle, cfg, np.array([i]))
        per_pair.append(time.perf_counter() - t0)
        if time.perf_counter() > deadline:
            raise CellTimeout
    return t_paths + float(np.mean(per_pair)) * g.n_edges


def time_edge_iteration(h: Hypergraph, cfg: CurvatureConfig, sample: int, seed: int,
                        deadline: float = math.inf) -> float:
    """Seconds for one edge-flow iteration on the unweighted line expansion.

    The line graph is fixed during the flow, so its distances are set-up
    cost and excluded; transport is sampled and scaled as for the node flow.
    """
    pairs = clique_expansion(h, WeightingScheme.UNIFORM)
    oracle = MetricOracle(line_expansion(h, WeightingScheme.UNIFORM))
    oracle.rows(np.arange(h.n_edges))
    ids = _sample(pairs.n_edges, sample + 1, seed)
    table = EdgePairTable(h, oracle, pairs.edge_u[ids], pairs.edge_v[ids], cfg.measure_variant)
    w = h.weights
    warm = EdgePairTable(h, oracle, pairs.edge_u[ids[:1]], pairs.edge_v[ids[:1]], cfg.measure_variant)
    warm.curvatures(w, cfg)
    t0 = time.perf_counter()
    table.curvatures(w, cfg)
    elapsed = time.perf_counter() - t0
    if time.perf_counter() > deadline:
        raise CellTimeout
    return elapsed / len(table) * pairs.n_edges


def run_timing_bench(spec: TimingSpec, progress=None) -> list[dict]:
    """Estimated wall-clock seconds per flow iteration, one row per (K, method, rep).

    Cells that run past ``spec.timeout`` are recorded as ``inf``.
    """
    rows = []
    for k in spec.k_values:
        for rep in range(spec.repetitions):
            seed = cell_seed(spec.base_seed, k, rep)
            h = gen_uniform(spec.n, spec.m, k, seed)
            for name in spec.methods:
                deadline = time.perf_counter() + spec.timeout
                try:
                    if name == "node":
                        sinkhorn = spec.sinkhorn_from_k is not None and k >= spec.sinkhorn_from_k
                        cfg = CurvatureConfig(solver="sinkhorn", epsilon=spec.sinkhorn_epsilon) if sinkhorn else CurvatureConfig()
                        seconds = time_node_iteration(h, cfg, spec.node_sample_pairs, seed, deadline)
                    else:
                        seconds = time_edge_iteration(h, CurvatureConfig(), spec.sample_pairs, seed, deadline)
                except CellTimeout:
                    log.warning("K=%d %s rep=%d timed out after %.0f s", k, name, rep, spec.timeout)
                    seconds = math.inf
                row = {"K": k, "method": name, "rep": rep, "seconds": seconds}
                rows.append(row)
                if progress:
                    progress(row)
    return rows
