"""Ricci-flow clustering of hypergraphs.

Two flows are provided: node transport on the clique expansion and edge
transport on the line expansion. Both end with one weight per hyperedge,
and trimming heavy hyperedges leaves the communities as components.
"""

from .clustering import (
    Clustering,
    Criterion,
    ThresholdCriterion,
    cluster,
    graph_modularity,
    hypergraph_modularity,
    nmi,
    select_threshold,
    trim_and_components,
)
from .curvature import Aggregation, CurvatureConfig, MeasureVariant, edge_ricci_pair, node_ricci_pair
from .flow import FlowConfig, FlowState, Method, edge_ricci_flow, node_ricci_flow, run_flow
from .hypergraph import (
    Hypergraph,
    HypergraphError,
    WeightedGraph,
    WeightingScheme,
    clique_expansion,
    dual,
    line_expansion,
)
from .synthgen import HsbmParams, gen_hsbm, gen_toy
from .transport import MetricOracle, ProbabilityMeasure, TransportError

__version__ = "0.1.0"
