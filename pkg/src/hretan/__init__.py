"""Tree Augmented Naive Bayes with lazy hierarchical redundancy elimination.

Binary features arranged in a DAG hierarchy (ancestor = more generic term)
often duplicate information along a path.  The lazy classifier here builds a
per-test-instance feature tree that skips hierarchically redundant pairs, on
top of a conventional TAN pipeline: CMI edge scoring, maximum-weight
spanning tree, seeded root, Laplace-smoothed tables, log-space inference.
"""

from . import errors
from ._kernels import BACKEND as kernel_backend
from .dataset import (
    Dataset,
    FoldSplit,
    Instance,
    parse_dataset,
    project,
    project_instance,
    serialize_dataset,
    stratified_kfold,
    synthesize,
)
from .estimation import (
    Cpt,
    ScoredEdge,
    ScoredEdgeList,
    class_prior,
    conditional_mutual_information,
    estimate_cpts,
    score_all_edges,
)
from .evaluation import (
    ComparisonReport,
    ConfusionCounts,
    EvalReport,
    compare_methods,
    comparison_to_csv,
    comparison_to_dict,
    comparison_to_plot_tsv,
    confusion,
    cross_validate,
    degree_of_imbalance,
    linear_fit,
    metrics,
    pearson_r,
    report_to_dict,
    wilcoxon_signed_rank,
)
from .hierarchy import (
    FeatureDag,
    build_dag,
    is_hierarchically_redundant,
    parse_dag_edges,
    repair_true_path,
    validate_true_path,
)
from .lazy import classify_lazy, evaluate_hre_tan, hre_mst, hre_spanning_edges
from .tan import (
    DirectedTree,
    PredictionResult,
    TanModel,
    build_mst,
    choose_root,
    classify,
    direct_tree,
    fit_tan,
)

__version__ = "0.1.0"

__all__ = [
    "ComparisonReport",
    "ConfusionCounts",
    "Cpt",
    "Dataset",
    "DirectedTree",
    "EvalReport",
    "FeatureDag",
    "FoldSplit",
    "Instance",
    "PredictionResult",
    "ScoredEdge",
    "ScoredEdgeList",
    "TanModel",
    "build_dag",
    "build_mst",
    "choose_root",
    "class_prior",
    "classify",
    "classify_lazy",
    "compare_methods",
    "comparison_to_csv",
    "comparison_to_dict",
    "comparison_to_plot_tsv",
    "conditional_mutual_information",
    "confusion",
    "cross_validate",
    "degree_of_imbalance",
    "direct_tree",
    "errors",
    "estimate_cpts",
    "evaluate_hre_tan",
    "fit_tan",
    "hre_mst",
    "hre_spanning_edges",
    "is_hierarchically_redundant",
    "kernel_backend",
    "linear_fit",
    "metrics",
    "parse_dag_edges",
    "parse_dataset",
    "pearson_r",
    "project",
    "project_instance",
    "repair_true_path",
    "report_to_dict",
    "score_all_edges",
    "serialize_dataset",
    "stratified_kfold",
    "synthesize",
    "validate_true_path",
    "wilcoxon_signed_rank",
]
