"""Simulated examples, Monte Carlo studies and their metrics."""

from .metrics import ReplicationReport, StudyMetrics, metrics, reports_frame, summarize_msep
from .reporting import METRIC_COLUMNS, decimals_for, format_metrics_table, markdown_summary
from .scenarios import (
    GENERATORS,
    Example,
    Role,
    SampleKind,
    ScenarioSpec,
    SimulatedSample,
    coefficient_functions,
    generate,
    synthesize_responses,
    trapezoid_integral,
)
from .study import (
    DEFAULT_REPLICATIONS,
    EXAMPLE_D_MAX,
    StudyResult,
    metrics_table,
    pipeline_config_for,
    run_grid,
    run_replication,
    run_study,
    study_templates,
)

__all__ = [
    "ReplicationReport",
    "StudyMetrics",
    "metrics",
    "reports_frame",
    "summarize_msep",
    "METRIC_COLUMNS",
    "decimals_for",
    "format_metrics_table",
    "markdown_summary",
    "GENERATORS",
    "Example",
    "Role",
    "SampleKind",
    "ScenarioSpec",
    "SimulatedSample",
    "coefficient_functions",
    "generate",
    "synthesize_responses",
    "trapezoid_integral",
    "DEFAULT_REPLICATIONS",
    "EXAMPLE_D_MAX",
    "StudyResult",
    "metrics_table",
    "pipeline_config_for",
    "run_grid",
    "run_replication",
    "run_study",
    "study_templates",
]
