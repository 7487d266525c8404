"""Graph Laplacian regularized regression on point clouds."""

from ._core import (
    Graph,
    LapregError,
    __version__,
    bias_check,
    build_graph,
    generate,
    modified_trend,
    out_of_sample,
    pde_beta,
    residual,
    run_experiment,
    sample_cloud,
    solve,
    variational_beta,
    voronoi_extend,
)

__all__ = [
    "Graph",
    "LapregError",
    "bias_check",
    "build_graph",
    "generate",
    "modified_trend",
    "out_of_sample",
    "pde_beta",
    "residual",
    "run_experiment",
    "sample_cloud",
    "solve",
    "variational_beta",
    "voronoi_extend",
]
