"""Full analytics report: every quantitative analysis over one query log.

Usage metrics (queries, sessions, session length, composite) are computed
over the raw submitted stream; deduplication applies to the content
analyses (categories and low-effort flags), which is where resubmissions
would otherwise exert undue influence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..model import HelpRequest
from ..storage import ExerciseText, LabelRecord, PerformanceRecord
from .content import (
    COPIED_THRESHOLD,
    SHORT_ISSUE_LIMIT,
    AutoFlags,
    CategoryReport,
    ExerciseMatcher,
    category_report,
)
from .dedup import DEFAULT_THRESHOLD, deduplicate
from .performance import usage_performance_analysis
from .sessions import DEFAULT_GAP_SECONDS, composite_usage, sessionize, usage_metrics
from .stats import sample_sd

CATEGORY_DISPLAY = {
    "debugging": "Debugging (all)",
    "implementation": "Implementation",
    "understanding": "Understanding",
    "nothing": "Nothing",
    "debugging:error_only": "Including error",
    "debugging:outcome_only": "Including outcome",
    "debugging:error_and_outcome": "Including error & outcome",
}


@dataclass(frozen=True)
class ReportOptions:
    dedup_k: float = DEFAULT_THRESHOLD
    gap_seconds: float = DEFAULT_GAP_SECONDS
    exclusions: tuple[str, ...] = field(default_factory=tuple)
    auto_exclude_outliers: bool = False
    short_issue_limit: int = SHORT_ISSUE_LIMIT
    copied_threshold: float = COPIED_THRESHOLD


def _summary(values: Sequence[float]) -> dict:
    mean = sum(values) / len(values) if values else 0.0
    sd = sample_sd(values) if len(values) >= 2 else 0.0
    return {"mean": mean, "sd": sd}


def _category_section(cat: CategoryReport) -> dict:
    return {
        "analyzed": cat.analyzed,
        "off_topic": cat.off_topic,
        "unlabeled": cat.unlabeled,
        "disagreements": cat.disagreements,
        "overall_kappa": cat.overall_kappa,
        "collapsed_kappa": cat.collapsed_kappa,
        "rows": [
            {
                "category": row.name,
                "count": row.count,
                "percent": row.percent,
                "kappa": row.kappa,
            }
            for row in cat.rows
        ],
        "debugging_subcategories": [
            {
                "category": row.name,
                "count": row.count,
                "percent": row.percent,
                "kappa": row.kappa,
            }
            for row in cat.subcategory_rows
        ],
    }


def build_report(
    queries: Sequence[HelpRequest],
    labels: Sequence[LabelRecord] | None = None,
    exercises: Sequence[ExerciseText] | None = None,
    performance: Sequence[PerformanceRecord] | None = None,
    options: ReportOptions = ReportOptions(),
) -> dict:
    """Assemble the machine-readable report.

    The categories section appears only when labels are supplied; the
    correlation section only when performance data is supplied.  Analytics
    errors (zero variance, missing cells, too few users) propagate.
    """
    dedup = deduplicate(queries, k=options.dedup_k)
    sessions = sessionize(queries, gap_seconds=options.gap_seconds)
    usage = usage_metrics(sessions, queries)
    composite = composite_usage(usage, exclusions=options.exclusions)

    matcher = ExerciseMatcher(exercises or [])
    flags = {
        q.id: AutoFlags.compute(
            q.issue,
            matcher,
            short_limit=options.short_issue_limit,
            copied_threshold=options.copied_threshold,
        )
        for q in dedup.kept
    }
    kept_count = len(dedup.kept)
    short_count = sum(f.short_issue for f in flags.values())
    copied_count = sum(f.copied for f in flags.values())

    report: dict = {
        "parameters": {
            "dedup_k": options.dedup_k,
            "gap_seconds": options.gap_seconds,
            "exclusions": sorted(options.exclusions),
            "auto_exclude_outliers": options.auto_exclude_outliers,
            "short_issue_limit": options.short_issue_limit,
            "copied_threshold": options.copied_threshold,
        },
        "queries": {
            "total": len(queries),
            "users": len({q.user_id for q in queries}),
        },
        "dedup": {
            "duplicates_removed": dedup.duplicate_count,
            "kept": kept_count,
        },
        "sessions": {
            "total": len(sessions),
        },
        "usage": {
            "per_user": [
                {
                    "user_id": r.user_id,
                    "total_queries": r.total_queries,
                    "total_sessions": r.total_sessions,
                    "avg_session_length_seconds": r.avg_session_length_seconds,
                }
                for r in usage.values()
            ],
            "summary": {
                "total_queries": _summary([r.total_queries for r in usage.values()]),
                "total_sessions": _summary(
                    [r.total_sessions for r in usage.values()]
                ),
                "avg_session_length_seconds": _summary(
                    [r.avg_session_length_seconds for r in usage.values()]
                ),
            },
        },
        "composite": {
            "scores": dict(sorted(composite.scores.items())),
            "cronbach_alpha": composite.cronbach_alpha,
        },
        "flags": {
            "short_issue": {
                "count": short_count,
                "percent": 100.0 * short_count / kept_count if kept_count else 0.0,
            },
            "copied": {
                "count": copied_count,
                "percent": 100.0 * copied_count / kept_count if kept_count else 0.0,
            },
            "exercises_available": bool(exercises),
        },
    }

    if labels is not None:
        cat = category_report(dedup.kept, labels, flags)
        report["categories"] = _category_section(cat)
        report["per_user_fractions"] = {
            user: dict(fractions)
            for user, fractions in cat.per_user_fractions.items()
        }

    if performance is not None:
        analysis = usage_performance_analysis(
            usage,
            performance,
            exclusions=options.exclusions,
            auto_exclude_outliers=options.auto_exclude_outliers,
        )
        report["correlation"] = {
            "r": analysis.correlation.r,
            "p_two_tailed": analysis.correlation.p_two_tailed,
            "n": analysis.correlation.n,
            "excluded_users": list(analysis.correlation.excluded_users),
            "cronbach_alpha": analysis.cronbach_alpha,
            "scatter": [
                {"user_id": u, "usage": x, "performance": y}
                for u, x, y in analysis.scatter
            ],
        }

    return report


def _format_kappa(value: float | None) -> str:
    return f"{value:.2f}" if value is not None else "-"


def render_text_report(report: Mapping) -> str:
    """Aligned plain-text rendering with a Count / Percent / Kappa table."""
    lines = []
    q = report["queries"]
    d = report["dedup"]
    lines.append(
        f"Queries: {q['total']} from {q['users']} users; "
        f"{d['duplicates_removed']} duplicates removed, {d['kept']} kept"
    )
    lines.append(f"Sessions: {report['sessions']['total']}")
    summary = report["usage"]["summary"]
    lines.append(
        "Usage per user: "
        f"queries M={summary['total_queries']['mean']:.2f} "
        f"SD={summary['total_queries']['sd']:.2f}; "
        f"sessions M={summary['total_sessions']['mean']:.2f} "
        f"SD={summary['total_sessions']['sd']:.2f}; "
        f"session length M={summary['avg_session_length_seconds']['mean']:.2f}s "
        f"SD={summary['avg_session_length_seconds']['sd']:.2f}s"
    )
    lines.append(
        f"Composite usage alpha: {report['composite']['cronbach_alpha']:.2f}"
    )
    flags = report["flags"]
    lines.append(
        f"Low-effort: short issue {flags['short_issue']['count']} "
        f"({flags['short_issue']['percent']:.0f}%), copied "
        f"{flags['copied']['count']} ({flags['copied']['percent']:.0f}%)"
    )

    categories = report.get("categories")
    if categories:
        lines.append("")
        header = f"{'Category':<28}{'Count':>8}{'Percent':>10}{'Kappa':>8}"
        lines.append(header)
        lines.append("-" * len(header))
        for row in categories["rows"]:
            name = CATEGORY_DISPLAY.get(row["category"], row["category"])
            lines.append(
                f"{name:<28}{row['count']:>8}{round(row['percent']):>9}%"
                f"{_format_kappa(row['kappa']):>8}"
            )
        lines.append("")
        lines.append(f"{'Debugging sub-categories':<28}")
        lines.append("-" * len(header))
        for row in categories["debugging_subcategories"]:
            name = CATEGORY_DISPLAY.get(row["category"], row["category"])
            lines.append(
                f"{name:<28}{row['count']:>8}{round(row['percent']):>9}%"
                f"{_format_kappa(row['kappa']):>8}"
            )
        lines.append("")
        lines.append(
            f"Overall kappa {_format_kappa(categories['overall_kappa'])} "
            f"(collapsed {_format_kappa(categories['collapsed_kappa'])}); "
            f"{categories['disagreements']} disagreements, "
            f"{categories['off_topic']} off-topic, "
            f"{categories['unlabeled']} unlabeled"
        )

    correlation = report.get("correlation")
    if correlation:
        lines.append("")
        lines.append(
            f"Usage-performance correlation: r = {correlation['r']:.4f}, "
            f"p = {correlation['p_two_tailed']:.4f}, n = {correlation['n']}"
        )
        if correlation["excluded_users"]:
            lines.append(
                "Excluded users: " + ", ".join(correlation["excluded_users"])
            )
    return "\n".join(lines) + "\n"
