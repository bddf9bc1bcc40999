"""Course performance aggregation and its correlation with tool usage."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from ..storage import PerformanceRecord
from .sessions import UsageRecord, composite_usage
from .stats import AnalyticsError, CorrelationResult, pearson, sample_sd, zscores

OUTLIER_SD_MULTIPLE = 3.0


class MissingDataError(AnalyticsError):
    pass


def course_performance(
    records: Sequence[PerformanceRecord],
    transform=math.log1p,
) -> dict[str, float]:
    """Aggregate per-activity points into one standardized score per user.

    Points for each activity are skew-transformed, z-scored across users
    (sample SD), and averaged per user.  Every included user must have
    points for every activity.
    """
    users = sorted({r.user_id for r in records})
    activities = sorted({r.activity_id for r in records})
    if not users or not activities:
        raise MissingDataError("no performance records")
    cells: dict[tuple[str, str], float] = {
        (r.user_id, r.activity_id): r.points for r in records
    }
    gaps = [
        f"({u}, {a})" for u in users for a in activities if (u, a) not in cells
    ]
    if gaps:
        shown = ", ".join(gaps[:10])
        more = "" if len(gaps) <= 10 else f" and {len(gaps) - 10} more"
        raise MissingDataError(f"missing (user, activity) cells: {shown}{more}")
    z_by_activity = []
    for activity in activities:
        transformed = [transform(cells[(u, activity)]) for u in users]
        z_by_activity.append(zscores(transformed, name=f"activity {activity!r}"))
    return {
        user: sum(z[i] for z in z_by_activity) / len(activities)
        for i, user in enumerate(users)
    }


@dataclass(frozen=True)
class UsagePerformanceAnalysis:
    correlation: CorrelationResult
    scatter: tuple[tuple[str, float, float], ...]
    cronbach_alpha: float


def auto_outliers(
    records: Mapping[str, UsageRecord] | Sequence[UsageRecord],
    sd_multiple: float = OUTLIER_SD_MULTIPLE,
) -> list[str]:
    """Users whose raw total queries exceed mean + sd_multiple * SD."""
    if isinstance(records, Mapping):
        records = list(records.values())
    if len(records) < 3:
        return []
    totals = [r.total_queries for r in records]
    mean = sum(totals) / len(totals)
    cutoff = mean + sd_multiple * sample_sd(totals)
    return sorted(r.user_id for r in records if r.total_queries > cutoff)


def usage_performance_analysis(
    usage: Mapping[str, UsageRecord] | Sequence[UsageRecord],
    performance: Sequence[PerformanceRecord],
    exclusions: Sequence[str] = (),
    auto_exclude_outliers: bool = False,
) -> UsagePerformanceAnalysis:
    """Correlate composite usage with course performance.

    Exclusions are explicit user ids; the automatic raw-total outlier rule
    is off by default.  Excluded users are removed *before* either composite
    is standardized, so the correlated scores are z-based on exactly the
    analyzed population.  Users appearing in only one dataset are excluded
    and reported alongside the explicit exclusions.
    """
    if isinstance(usage, Mapping):
        usage = list(usage.values())
    excluded = set(exclusions)
    if auto_exclude_outliers:
        excluded.update(auto_outliers(usage))
    usage_users = {r.user_id for r in usage}
    perf_users = {r.user_id for r in performance}
    common = (usage_users & perf_users) - excluded
    not_shared = sorted((usage_users ^ perf_users) - excluded)
    excluded_all = sorted(excluded | set(not_shared))
    if len(common) < 3:
        raise AnalyticsError(
            f"need at least 3 users with both usage and performance data, "
            f"got {len(common)}"
        )
    kept_usage = [r for r in usage if r.user_id in common]
    kept_perf = [r for r in performance if r.user_id in common]
    composite = composite_usage(kept_usage)
    perf_scores = course_performance(kept_perf)
    users = sorted(common)
    x = [composite.scores[u] for u in users]
    y = [perf_scores[u] for u in users]
    base = pearson(x, y)
    correlation = CorrelationResult(
        r=base.r,
        p_two_tailed=base.p_two_tailed,
        n=base.n,
        excluded_users=tuple(excluded_all),
    )
    scatter = tuple((u, xi, yi) for u, xi, yi in zip(users, x, y))
    return UsagePerformanceAnalysis(
        correlation=correlation,
        scatter=scatter,
        cronbach_alpha=composite.cronbach_alpha,
    )
