"""Query-log analytics: deduplication, sessions, reliability, correlation."""

from .content import (
    AutoFlags,
    Category,
    CategoryReport,
    ExerciseMatcher,
    category_report,
    consensus_labels,
    copied_percentage,
    flag_short_issue,
)
from .dedup import (
    DedupResult,
    deduplicate,
    levenshtein,
    normalized_field_distance,
    query_similarity,
)
from .performance import (
    MissingDataError,
    UsagePerformanceAnalysis,
    auto_outliers,
    course_performance,
    usage_performance_analysis,
)
from .report import ReportOptions, build_report, render_text_report
from .sessions import (
    CompositeUsage,
    Session,
    UsageRecord,
    composite_usage,
    sessionize,
    usage_metrics,
)
from .stats import (
    AnalyticsError,
    CorrelationResult,
    UndefinedStatisticError,
    ZeroVarianceError,
    binary_kappa,
    cohen_kappa,
    cronbach_alpha,
    pearson,
    zscores,
)

__all__ = [
    "AnalyticsError",
    "AutoFlags",
    "Category",
    "CategoryReport",
    "CompositeUsage",
    "CorrelationResult",
    "DedupResult",
    "ExerciseMatcher",
    "MissingDataError",
    "ReportOptions",
    "Session",
    "UndefinedStatisticError",
    "UsagePerformanceAnalysis",
    "UsageRecord",
    "ZeroVarianceError",
    "auto_outliers",
    "binary_kappa",
    "build_report",
    "category_report",
    "cohen_kappa",
    "composite_usage",
    "consensus_labels",
    "copied_percentage",
    "course_performance",
    "cronbach_alpha",
    "deduplicate",
    "flag_short_issue",
    "levenshtein",
    "normalized_field_distance",
    "pearson",
    "query_similarity",
    "render_text_report",
    "sessionize",
    "usage_metrics",
    "usage_performance_analysis",
    "zscores",
]
