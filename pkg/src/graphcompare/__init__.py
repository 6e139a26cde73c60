"""Comparison indicators over property graphs.

Infers property-graph schemas and relationship cardinalities, derives
and validates per-node-type comparison indicators, and solves the joint
indicator-partition / node-clustering problem to rank node-comparison
insights.
"""

from .context import ContextGraph, Direction, TypePath, TypeStep, compute_context, enumerate_indicator_paths
from .clustering import fuzzy_c_medoids
from .graph import (
    Cardinality,
    FormalBaseType,
    GraphFileFormat,
    GraphType,
    PropertyGraph,
    ValidityReport,
    check_instance,
    compute_cardinalities,
    infer_graph_type,
    load_graph,
    load_graph_file,
)
from .heuristics import coefficient_of_variation, elbow_cut, laplacian_heuristic, laplacian_score
from .indicators import (
    Elem,
    Indicator,
    IndicatorMatrix,
    Op,
    build_indicator_matrix,
    canonical_order,
    derive_candidate_indicators,
    evaluate_indicator,
)
from .insights import InsightResult, extract_insights
from .objective import Clustering, ThreePartition, objective_score, significance, sq_distance
from .search import (
    SearchResult,
    exponential_search,
    local_search,
    make_clusterer,
    random_baseline,
    random_restart_search,
    solve,
)
from .validation import (
    Mode,
    ValidationConfig,
    ValidationTrace,
    attenuation,
    pearson,
    percentile_scale,
    validate_indicators,
)

__version__ = "0.1.0"

__all__ = [
    "Cardinality",
    "Clustering",
    "ContextGraph",
    "Direction",
    "Elem",
    "FormalBaseType",
    "GraphFileFormat",
    "GraphType",
    "Indicator",
    "IndicatorMatrix",
    "InsightResult",
    "Mode",
    "Op",
    "PropertyGraph",
    "SearchResult",
    "ThreePartition",
    "TypePath",
    "TypeStep",
    "ValidationConfig",
    "ValidationTrace",
    "ValidityReport",
    "attenuation",
    "build_indicator_matrix",
    "canonical_order",
    "check_instance",
    "coefficient_of_variation",
    "compute_cardinalities",
    "compute_context",
    "derive_candidate_indicators",
    "elbow_cut",
    "enumerate_indicator_paths",
    "evaluate_indicator",
    "exponential_search",
    "extract_insights",
    "fuzzy_c_medoids",
    "infer_graph_type",
    "laplacian_heuristic",
    "laplacian_score",
    "load_graph",
    "load_graph_file",
    "local_search",
    "make_clusterer",
    "objective_score",
    "pearson",
    "percentile_scale",
    "random_baseline",
    "random_restart_search",
    "significance",
    "solve",
    "sq_distance",
    "validate_indicators",
]
