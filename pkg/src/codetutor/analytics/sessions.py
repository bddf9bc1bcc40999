"""Sessionization and per-student usage metrics.

A session is a run of one student's queries with no gap of an hour or more
between consecutive queries; a gap of exactly the threshold already counts
as inactivity and splits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime
from typing import Mapping, Sequence

from ..model import HelpRequest
from .stats import AnalyticsError, cronbach_alpha, zscores

DEFAULT_GAP_SECONDS = 3600.0


@dataclass(frozen=True)
class Session:
    user_id: str
    query_ids: tuple[str, ...]
    start: datetime
    end: datetime

    @property
    def length_seconds(self) -> float:
        return (self.end - self.start).total_seconds()


@dataclass(frozen=True)
class UsageRecord:
    user_id: str
    total_queries: int
    total_sessions: int
    avg_session_length_seconds: float


@dataclass(frozen=True)
class CompositeUsage:
    """Skew-transformed, standardized, averaged usage metrics per student."""

    scores: Mapping[str, float]
    cronbach_alpha: float


def sessionize(
    queries: Sequence[HelpRequest], gap_seconds: float = DEFAULT_GAP_SECONDS
) -> list[Session]:
    """Partition each user's time-ordered queries into sessions.

    A new session starts at the first query and at every query whose gap
    from the previous one is >= gap_seconds.  Singleton sessions have
    length 0.
    """
    if gap_seconds <= 0:
        raise ValueError("gap_seconds must be positive")
    by_user: dict[str, list[HelpRequest]] = {}
    for q in queries:
        by_user.setdefault(q.user_id, []).append(q)
    sessions: list[Session] = []
    for user_id in sorted(by_user):
        stream = sorted(by_user[user_id], key=lambda q: q.timestamp)
        current: list[HelpRequest] = []
        for q in stream:
            if current and (
                (q.timestamp - current[-1].timestamp).total_seconds() >= gap_seconds
            ):
                sessions.append(_close(user_id, current))
                current = []
            current.append(q)
        if current:
            sessions.append(_close(user_id, current))
    return sessions


def _close(user_id: str, queries: list[HelpRequest]) -> Session:
    return Session(
        user_id=user_id,
        query_ids=tuple(q.id for q in queries),
        start=queries[0].timestamp,
        end=queries[-1].timestamp,
    )


def usage_metrics(
    sessions: Sequence[Session], queries: Sequence[HelpRequest]
) -> dict[str, UsageRecord]:
    """Raw per-user counts: total queries, total sessions, mean session length."""
    query_counts: dict[str, int] = {}
    for q in queries:
        query_counts[q.user_id] = query_counts.get(q.user_id, 0) + 1
    lengths: dict[str, list[float]] = {}
    for s in sessions:
        lengths.setdefault(s.user_id, []).append(s.length_seconds)
    records = {}
    for user_id in sorted(query_counts):
        user_lengths = lengths.get(user_id, [])
        avg = sum(user_lengths) / len(user_lengths) if user_lengths else 0.0
        records[user_id] = UsageRecord(
            user_id=user_id,
            total_queries=query_counts[user_id],
            total_sessions=len(user_lengths),
            avg_session_length_seconds=avg,
        )
    return records


def composite_usage(
    records: Mapping[str, UsageRecord] | Sequence[UsageRecord],
    exclusions: Sequence[str] = (),
    transform=math.log1p,
) -> CompositeUsage:
    """Combine the three usage metrics into one standardized score per user.

    Each metric is skew-transformed (log1p by default), z-scored across
    users with the sample SD, and the three z-scores are averaged.  Also
    reports Cronbach's alpha over the transformed, standardized items.
    """
    if isinstance(records, Mapping):
        records = list(records.values())
    excluded = set(exclusions)
    included = [r for r in records if r.user_id not in excluded]
    if len(included) < 3:
        raise AnalyticsError(
            f"composite needs at least 3 users after exclusions, got {len(included)}"
        )
    included.sort(key=lambda r: r.user_id)
    metric_names = ("total_queries", "total_sessions", "avg_session_length_seconds")
    z_columns = []
    for name in metric_names:
        transformed = [transform(getattr(r, name)) for r in included]
        z_columns.append(zscores(transformed, name=name))
    rows = [[col[i] for col in z_columns] for i in range(len(included))]
    alpha = cronbach_alpha(rows)
    scores = {
        r.user_id: sum(row) / len(row) for r, row in zip(included, rows)
    }
    return CompositeUsage(scores=scores, cronbach_alpha=alpha)
