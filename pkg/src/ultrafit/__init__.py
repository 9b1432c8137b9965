"""Ultrametric fitting for Euclidean point sets.

A fast approximate pipeline (multi-scale spanner, Kruskal, 5-estimated
cut weights, cartesian tree), an exact optimal baseline, the classic
linkage baselines, and an exact distortion-evaluation harness.
"""

from .core import PointSet, UnionFind, WeightedEdge, dedupe, distance
from .cutweight import ClusterState, approximate_cut_weights, exact_cut_weights
from .dendro import (
    Dendrogram,
    build_dendrogram,
    contract_duplicates,
    expand_duplicates,
    format_merge_list,
    from_merge_rows,
    normalize,
    parse_merge_list,
    to_merge_rows,
    to_newick,
)
from .evaluate import DistortionReport, benchmark, distortion
from .linkage import METHODS, agglomerate, single_linkage
from .mst import (
    DisconnectedGraphError,
    SpanningTree,
    connect_components,
    exact_mst,
    kruskal,
    kt_factor,
)
from .pipeline import (
    ALGORITHMS,
    FitResult,
    approx_acc_ult,
    approx_ult,
    brute_force_opt_alpha,
    farach_exact,
    run_algorithm,
)
from .spanner import SpannerConfig, SpannerGraph, build_spanner, estimate_scales, verify_stretch

__version__ = "0.1.0"

__all__ = [
    "PointSet", "UnionFind", "WeightedEdge", "dedupe", "distance",
    "ClusterState", "approximate_cut_weights", "exact_cut_weights",
    "Dendrogram", "build_dendrogram", "contract_duplicates", "expand_duplicates", "format_merge_list",
    "from_merge_rows", "normalize", "parse_merge_list", "to_merge_rows", "to_newick",
    "DistortionReport", "benchmark", "distortion",
    "METHODS", "agglomerate", "single_linkage",
    "DisconnectedGraphError", "SpanningTree", "connect_components",
    "exact_mst", "kruskal", "kt_factor",
    "ALGORITHMS", "FitResult", "approx_acc_ult", "approx_ult",
    "brute_force_opt_alpha", "farach_exact", "run_algorithm",
    "SpannerConfig", "SpannerGraph", "build_spanner", "estimate_scales", "verify_stretch",
    "__version__",
]
