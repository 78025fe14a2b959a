"""
Variable selection for functional linear regression.

Stacked designs, the covariance-projection criterion, penalized ranking,
cross-validated tuning and the end-to-end pipeline.
"""

from .base import (
    ArgumentError,
    CovariancePair,
    DataFormatError,
    DomainError,
    FoldPlan,
    NumericalError,
    SelectionConfig,
    SelectionError,
    SelectionResult,
    StackedDesign,
    TuningGrid,
    VariableSubset,
)
from .criterion import (
    ProjectionCriterion,
    block_columns,
    estimate_cardinality,
    order_by_penalized_statistic,
    penalty_weight,
    projection_matrix,
    rank_variables,
    select_variables,
    selection_matrix,
    xi_hat,
)
from .design import DesignBuilder, assemble_design, cap_dimensions, covariances, stack_blocks
from .tuning import (
    CrossValidator,
    PipelineConfig,
    PipelineResult,
    TuningSurface,
    cv_index,
    holdout_msep,
    make_folds,
    msep,
    optimize_tuning,
    run_pipeline,
    search_grid,
    split_sample,
    tune_and_select,
)

__all__ = [
    "ArgumentError",
    "CovariancePair",
    "DataFormatError",
    "DomainError",
    "FoldPlan",
    "NumericalError",
    "SelectionConfig",
    "SelectionError",
    "SelectionResult",
    "StackedDesign",
    "TuningGrid",
    "VariableSubset",
    "ProjectionCriterion",
    "block_columns",
    "estimate_cardinality",
    "order_by_penalized_statistic",
    "penalty_weight",
    "projection_matrix",
    "rank_variables",
    "select_variables",
    "selection_matrix",
    "xi_hat",
    "DesignBuilder",
    "assemble_design",
    "cap_dimensions",
    "covariances",
    "stack_blocks",
    "CrossValidator",
    "PipelineConfig",
    "PipelineResult",
    "TuningSurface",
    "cv_index",
    "holdout_msep",
    "make_folds",
    "msep",
    "optimize_tuning",
    "run_pipeline",
    "search_grid",
    "split_sample",
    "tune_and_select",
]
