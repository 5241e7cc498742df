"""Synthetic hypergraphs: the gateway toy model and a hypergraph SBM.

Randomness is drawn from PCG64 streams, one per hyperedge, spawned from
``SeedSequence(seed)`` with the edge index as spawn key. Only the raw
64-bit outputs of the bit generator are used and all sampling on top of
them is done here (rejection sampling for bounded integers, partial
Fisher-Yates for subsets), so the generated files do not depend on how a
numpy version implements ``Generator.choice``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import comb

import numpy as np

from .hypergraph import Hypergraph

_U64 = 1 << 64


class EdgeClass(enum.Enum):
    GATEWAY_EDGE = "gateway_edge"
    GATEWAY_BINARY = "gateway_binary"
    INTERNAL = "internal"


def gen_toy(a: int, b: int) -> tuple[Hypergraph, np.ndarray, list[EdgeClass]]:
    """``b`` cliques on ``a`` nodes plus one size-``b`` edge over the gateways.

    Community ``i`` owns nodes ``i*a .. i*a + a - 1``; its gateway is ``i*a``.
    Binary clique edges come first (community by community), the gateway
    hyperedge last.
    """
    if a < 3 or b < 3:
        raise ValueError(f"need a, b >= 3, got a={a}, b={b}")
    edges, tags = [], []
    for c in range(b):
        base = c * a
        for i in range(a):
            for j in range(i + 1, a):
                edges.append((base + i, base + j))
                tags.append(EdgeClass.GATEWAY_BINARY if i == 0 else EdgeClass.INTERNAL)
    edges.append(tuple(c * a for c in range(b)))
    tags.append(EdgeClass.GATEWAY_EDGE)
    labels = np.repeat(np.arange(b), a)
    return Hypergraph(a * b, edges), labels, tags


def toy_edge_counts(a: int, b: int) -> dict[EdgeClass, int]:
    return {EdgeClass.GATEWAY_EDGE: 1,
            EdgeClass.GATEWAY_BINARY: b * (a - 1),
            EdgeClass.INTERNAL: b * comb(a - 1, 2)}


@dataclass(frozen=True)
class HsbmParams:
    n: int
    k: int
    s_in: int
    s_out: int
    n_in: int
    n_out: int
    seed: int = 0
    n_in_per_community: bool = False

    def __post_init__(self):
        if self.k < 1 or self.n % self.k:
            raise ValueError(f"n={self.n} is not divisible by k={self.k}")
        if not 2 <= self.s_in <= self.n // self.k:
            raise ValueError(f"s_in={self.s_in} must lie in [2, n/k={self.n // self.k}]")
        if not max(2, self.k) <= self.s_out <= self.n:
            raise ValueError(f"s_out={self.s_out} must lie in [max(2, k), n]")
        if self.n_in < 0 or self.n_out < 0:
            raise ValueError("edge counts must be >= 0")


class _Stream:
    def __init__(self, seed: int, key: int):
        seq = np.random.SeedSequence(seed, spawn_key=(key,))
        self._bits = np.random.PCG64(seq)

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)`` by rejection from 64-bit draws."""
        limit = _U64 - (_U64 % bound)
        while True:
            r = int(self._bits.random_raw())
            if r < limit:
                return r % bound

    def subset(self, pool: list[int], size: int) -> list[int]:
        pool = list(pool)
        for i in range(size):
            j = i + self.below(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:size]


def gen_hsbm(params: HsbmParams) -> tuple[Hypergraph, np.ndarray]:
    """Planted-partition hypergraph with ``k`` equal communities.

    Intra-community edges (size ``s_in``) are dealt to communities round
    robin, ``n_in`` in total unless ``n_in_per_community``. Each of the
    ``n_out`` inter-community edges takes one uniform node from every
    community, then fills up to ``s_out`` with uniform draws over all nodes,
    redrawing on collision.
    """
    n, k = params.n, params.k
    size = n // k
    labels = np.repeat(np.arange(k), size)
    communities = [list(range(c * size, (c + 1) * size)) for c in range(k)]
    n_in_total = params.n_in * k if params.n_in_per_community else params.n_in
    edges = []
    key = 0
    for j in range(n_in_total):
        stream = _Stream(params.seed, key)
        key += 1
        edges.append(stream.subset(communities[j % k], params.s_in))
    for _ in range(params.n_out):
        stream = _Stream(params.seed, key)
        key += 1
        chosen = [comm[stream.below(size)] for comm in communities]
        taken = set(chosen)
        while len(chosen) < params.s_out:
            v = stream.below(n)
            if v not in taken:
                taken.add(v)
                chosen.append(v)
        edges.append(chosen)
    return Hypergraph(n, edges), labels


def gen_uniform(n: int, m: int, size: int, seed: int = 0) -> Hypergraph:
    """``m`` hyperedges, each a uniform ``size``-subset of ``n`` nodes."""
    if not 2 <= size <= n:
        raise ValueError(f"edge size {size} must lie in [2, {n}]")
    nodes = list(range(n))
    return Hypergraph(n, [_Stream(seed, j).subset(nodes, size) for j in range(m)])
