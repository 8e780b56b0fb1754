"""Attributed-graph community detection by differentiable soft modularity."""

from ._core import (
    AttributedGraph,
    DataError,
    NumericalError,
    TrainConfig,
    acc,
    ari,
    build_graph,
    dbi,
    f1,
    filter_communities,
    generate_sbm,
    hard_assign,
    l2_normalize,
    load_dataset,
    louvain,
    modularity_hard,
    nmi,
    propagation_matrix,
    run_cli,
    similarity,
    soft_assign,
    soft_modularity,
    train,
)

__all__ = [
    "AttributedGraph",
    "DataError",
    "NumericalError",
    "TrainConfig",
    "acc",
    "ari",
    "build_graph",
    "dbi",
    "f1",
    "filter_communities",
    "generate_sbm",
    "hard_assign",
    "l2_normalize",
    "load_dataset",
    "louvain",
    "modularity_hard",
    "nmi",
    "propagation_matrix",
    "run_cli",
    "similarity",
    "soft_assign",
    "soft_modularity",
    "train",
]
