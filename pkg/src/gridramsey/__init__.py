"""Graph kernels, sparse-regularity machinery, grid embedding, and Ramsey tooling."""

from gridramsey.graphs import (
    Graph,
    GridSpec,
    RandomModel,
    VertexSet,
    build_graph,
    codegree,
    complete_graph,
    count_c4_constrained,
    cycle_graph,
    edge_count_between,
    gnp,
    grid_graph,
    neighbours_in,
)

__all__ = [
    "Graph",
    "GridSpec",
    "RandomModel",
    "VertexSet",
    "build_graph",
    "codegree",
    "complete_graph",
    "count_c4_constrained",
    "cycle_graph",
    "edge_count_between",
    "gnp",
    "grid_graph",
    "neighbours_in",
]

__version__ = "0.1.0"
