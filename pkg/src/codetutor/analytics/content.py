"""Query content characterization: categories, reliability, low-effort flags.

Category labels are human-supplied (two raters per query); this module only
aggregates them.  The automated flags catch "low-effort" queries: issue text
that is empty/short, or mostly copied from exercise instructions.
"""

from __future__ import annotations

import difflib
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

from ..model import HelpRequest
from ..storage import ExerciseText, LabelRecord
from .stats import UndefinedStatisticError, binary_kappa, cohen_kappa

SHORT_ISSUE_LIMIT = 10
COPIED_THRESHOLD = 80.0


class Category(str, Enum):
    DEBUGGING_ERROR = "debugging:error_only"
    DEBUGGING_OUTCOME = "debugging:outcome_only"
    DEBUGGING_BOTH = "debugging:error_and_outcome"
    IMPLEMENTATION = "implementation"
    UNDERSTANDING = "understanding"
    NOTHING = "nothing"
    OFF_TOPIC = "off_topic"

    @property
    def top_level(self) -> str:
        if self.value.startswith("debugging:"):
            return "debugging"
        return self.value


TOP_LEVEL_CATEGORIES = ("debugging", "implementation", "understanding", "nothing")
DEBUGGING_SUBCATEGORIES = (
    Category.DEBUGGING_ERROR,
    Category.DEBUGGING_OUTCOME,
    Category.DEBUGGING_BOTH,
)

VALID_CATEGORY_VALUES = tuple(c.value for c in Category)


def parse_category(value: str) -> Category:
    try:
        return Category(value)
    except ValueError:
        valid = ", ".join(VALID_CATEGORY_VALUES)
        raise ValueError(f"unknown category {value!r}; valid: {valid}") from None


def flag_short_issue(issue: str, limit: int = SHORT_ISSUE_LIMIT) -> bool:
    """True iff the issue text is shorter than ``limit`` characters."""
    return len(issue) < limit


class ExerciseMatcher:
    """Reusable matcher for copied-percentage computation.

    Holds one SequenceMatcher per exercise with the exercise pre-indexed as
    the second sequence, which makes scanning a whole corpus far cheaper.
    autojunk must stay off: with it on, long exercises would never reach
    100% even against themselves.
    """

    def __init__(self, exercises: Iterable[ExerciseText]):
        self._matchers: list[difflib.SequenceMatcher] = []
        self._cache: dict[str, float] = {}
        for exercise in exercises:
            sm = difflib.SequenceMatcher(None, autojunk=False)
            sm.set_seq2(exercise.text)
            self._matchers.append(sm)

    def copied_percentage(self, issue: str) -> float:
        """Highest share of the issue's characters covered by matching
        blocks against any exercise, as a percentage."""
        if not issue or not self._matchers:
            return 0.0
        cached = self._cache.get(issue)
        if cached is not None:
            return cached
        best = 0.0
        for sm in self._matchers:
            sm.set_seq1(issue)
            matched = sum(block.size for block in sm.get_matching_blocks())
            best = max(best, 100.0 * matched / len(issue))
            if best == 100.0:
                break
        self._cache[issue] = best
        return best


def copied_percentage(issue: str, exercises: Sequence[ExerciseText]) -> float:
    return ExerciseMatcher(exercises).copied_percentage(issue)


@dataclass(frozen=True)
class AutoFlags:
    short_issue: bool
    copied_percentage: float
    copied: bool

    @classmethod
    def compute(
        cls,
        issue: str,
        matcher: ExerciseMatcher,
        short_limit: int = SHORT_ISSUE_LIMIT,
        copied_threshold: float = COPIED_THRESHOLD,
    ) -> "AutoFlags":
        pct = matcher.copied_percentage(issue)
        return cls(
            short_issue=flag_short_issue(issue, short_limit),
            copied_percentage=pct,
            copied=pct >= copied_threshold,
        )


@dataclass(frozen=True)
class ConsensusResult:
    """Per-query consensus labels under the rater-precedence rule.

    When the two raters disagree, the first rater's label (raters ordered
    by id) wins; every disagreement is counted.
    """

    labels: Mapping[str, Category]
    disagreements: int
    double_rated: int
    rater_vectors: tuple[tuple[Category, ...], tuple[Category, ...]]


def consensus_labels(labels: Sequence[LabelRecord]) -> ConsensusResult:
    by_query: dict[str, dict[str, Category]] = {}
    for record in labels:
        category = parse_category(record.category)
        by_query.setdefault(record.query_id, {})[record.rater_id] = category
    consensus: dict[str, Category] = {}
    disagreements = 0
    vec_a: list[Category] = []
    vec_b: list[Category] = []
    for query_id in sorted(by_query):
        raters = by_query[query_id]
        first, *rest = sorted(raters)
        consensus[query_id] = raters[first]
        if rest:
            second = raters[rest[0]]
            vec_a.append(raters[first])
            vec_b.append(second)
            if raters[first] != second:
                disagreements += 1
    return ConsensusResult(
        labels=consensus,
        disagreements=disagreements,
        double_rated=len(vec_a),
        rater_vectors=(tuple(vec_a), tuple(vec_b)),
    )


@dataclass(frozen=True)
class CategoryRow:
    name: str
    count: int
    percent: float
    kappa: float | None


@dataclass(frozen=True)
class CategoryReport:
    rows: tuple[CategoryRow, ...]
    subcategory_rows: tuple[CategoryRow, ...]
    analyzed: int
    off_topic: int
    unlabeled: int
    overall_kappa: float | None
    collapsed_kappa: float | None
    disagreements: int
    per_user_fractions: Mapping[str, Mapping[str, float]]


def _safe_kappa(a: Sequence, b: Sequence) -> float | None:
    try:
        return cohen_kappa(a, b)
    except UndefinedStatisticError:
        return None


def _safe_binary_kappa(a: Sequence, b: Sequence, positive) -> float | None:
    try:
        return binary_kappa(a, b, positive)
    except UndefinedStatisticError:
        return None


def category_report(
    kept_queries: Sequence[HelpRequest],
    labels: Sequence[LabelRecord],
    flags: Mapping[str, AutoFlags] | None = None,
) -> CategoryReport:
    """Corpus-level category table plus per-user category/flag fractions.

    Off-topic queries are excluded from the category distribution (their
    count is reported separately), matching how they are dropped from the
    analysis.  Percentages are over the analyzed (labeled, on-topic)
    queries; subcategory percentages are over all debugging queries.
    """
    consensus = consensus_labels(labels)
    flags = flags or {}
    counts = {name: 0 for name in TOP_LEVEL_CATEGORIES}
    sub_counts = {c: 0 for c in DEBUGGING_SUBCATEGORIES}
    off_topic = 0
    unlabeled = 0
    analyzed = 0
    for q in kept_queries:
        label = consensus.labels.get(q.id)
        if label is None:
            unlabeled += 1
        elif label is Category.OFF_TOPIC:
            off_topic += 1
        else:
            analyzed += 1
            counts[label.top_level] += 1
            if label in sub_counts:
                sub_counts[label] += 1

    vec_a, vec_b = consensus.rater_vectors
    top_a = [c.top_level for c in vec_a]
    top_b = [c.top_level for c in vec_b]
    rows = []
    for name in TOP_LEVEL_CATEGORIES:
        percent = 100.0 * counts[name] / analyzed if analyzed else 0.0
        kappa = _safe_binary_kappa(top_a, top_b, name) if vec_a else None
        rows.append(CategoryRow(name=name, count=counts[name], percent=percent, kappa=kappa))
    debugging_total = counts["debugging"]
    sub_rows = []
    for sub in DEBUGGING_SUBCATEGORIES:
        percent = 100.0 * sub_counts[sub] / debugging_total if debugging_total else 0.0
        kappa = _safe_binary_kappa(vec_a, vec_b, sub) if vec_a else None
        sub_rows.append(
            CategoryRow(name=sub.value, count=sub_counts[sub], percent=percent, kappa=kappa)
        )

    per_user: dict[str, dict[str, float]] = {}
    by_user: dict[str, list[HelpRequest]] = {}
    for q in kept_queries:
        by_user.setdefault(q.user_id, []).append(q)
    for user_id in sorted(by_user):
        user_queries = by_user[user_id]
        labeled = [
            consensus.labels[q.id].top_level
            for q in user_queries
            if consensus.labels.get(q.id) not in (None, Category.OFF_TOPIC)
        ]
        fractions: dict[str, float] = {}
        for name in TOP_LEVEL_CATEGORIES:
            fractions[name] = (
                labeled.count(name) / len(labeled) if labeled else 0.0
            )
        user_flags = [flags[q.id] for q in user_queries if q.id in flags]
        if user_flags:
            fractions["short_issue"] = sum(f.short_issue for f in user_flags) / len(
                user_flags
            )
            fractions["copied"] = sum(f.copied for f in user_flags) / len(user_flags)
        per_user[user_id] = fractions

    return CategoryReport(
        rows=tuple(rows),
        subcategory_rows=tuple(sub_rows),
        analyzed=analyzed,
        off_topic=off_topic,
        unlabeled=unlabeled,
        overall_kappa=_safe_kappa(vec_a, vec_b) if vec_a else None,
        collapsed_kappa=_safe_kappa(top_a, top_b) if vec_a else None,
        disagreements=consensus.disagreements,
        per_user_fractions=per_user,
    )
