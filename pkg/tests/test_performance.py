import random

import pytest

from codetutor.analytics.performance import (
    MissingDataError,
    auto_outliers,
    course_performance,
    usage_performance_analysis,
)
from codetutor.analytics.sessions import UsageRecord
from codetutor.analytics.stats import AnalyticsError, ZeroVarianceError
from codetutor.storage import PerformanceRecord


def _perf(rows):
    return [PerformanceRecord(u, a, float(p)) for u, a, p in rows]


class TestCoursePerformance:
    def test_zero_variance_activity_error(self):
        records = _perf([("u1", "q1", 5), ("u2", "q1", 5), ("u3", "q1", 5)])
        with pytest.raises(ZeroVarianceError):
            course_performance(records)

    def test_single_activity_hand_oracle(self):
        records = _perf([("u1", "q1", 0), ("u2", "q1", 10), ("u3", "q1", 20)])
        scores = course_performance(records)
        # log1p then z-score, worked out independently offline
        assert scores["u1"] == pytest.approx(-1.1310003665718602, abs=1e-9)
        assert scores["u2"] == pytest.approx(0.3639347395443546, abs=1e-9)
        assert scores["u3"] == pytest.approx(0.7670656270275058, abs=1e-9)
        assert sum(scores.values()) == pytest.approx(0, abs=1e-9)

    def test_rank_agreement_preserved(self):
        records = _perf(
            [
                ("u1", "quiz", 1), ("u2", "quiz", 5), ("u3", "quiz", 20),
                ("u1", "hw", 2), ("u2", "hw", 9), ("u3", "hw", 30),
            ]
        )
        scores = course_performance(records)
        assert scores["u1"] < scores["u2"] < scores["u3"]

    def test_missing_cell_listed(self):
        records = _perf([("u1", "q1", 5), ("u2", "q1", 7), ("u2", "q2", 3)])
        with pytest.raises(MissingDataError) as exc:
            course_performance(records)
        assert "(u1, q2)" in str(exc.value)


def _usage(rows):
    return {
        u: UsageRecord(u, t, s, float(l)) for u, t, s, l in rows
    }


def _correlated_dataset(n=20, seed=5):
    rng = random.Random(seed)
    usage_rows = []
    perf_rows = []
    for i in range(n):
        user = f"u{i:02d}"
        level = rng.uniform(0.5, 3.0)
        usage_rows.append(
            (user, round(10 * level) + rng.randrange(3), max(1, round(3 * level)),
             round(200 * level))
        )
        for activity in ("quiz", "hw"):
            perf_rows.append((user, activity, 10 * level + rng.uniform(0, 4)))
    return _usage(usage_rows), _perf(perf_rows)


class TestUsagePerformanceAnalysis:
    def test_positive_association_recovered(self):
        usage, perf = _correlated_dataset()
        analysis = usage_performance_analysis(usage, perf)
        assert analysis.correlation.r > 0.6
        assert analysis.correlation.n == 20
        assert len(analysis.scatter) == 20

    def test_explicit_exclusion_reduces_n(self):
        usage, perf = _correlated_dataset()
        analysis = usage_performance_analysis(usage, perf, exclusions=["u03"])
        assert analysis.correlation.n == 19
        assert "u03" in analysis.correlation.excluded_users
        assert all(u != "u03" for u, _, _ in analysis.scatter)

    def test_auto_outlier_rule(self):
        usage, perf = _correlated_dataset()
        usage["big"] = UsageRecord("big", 614, 40, 1500.0)
        perf.extend(_perf([("big", "quiz", 25), ("big", "hw", 31)]))
        assert auto_outliers(usage) == ["big"]
        on = usage_performance_analysis(usage, perf, auto_exclude_outliers=True)
        assert on.correlation.n == 20
        assert "big" in on.correlation.excluded_users
        off = usage_performance_analysis(usage, perf)
        assert off.correlation.n == 21

    def test_users_missing_from_either_side_reported(self):
        usage, perf = _correlated_dataset(n=6)
        usage["extra"] = UsageRecord("extra", 9, 3, 120.0)
        analysis = usage_performance_analysis(usage, perf)
        assert analysis.correlation.n == 6
        assert "extra" in analysis.correlation.excluded_users

    def test_too_few_common_users(self):
        usage, perf = _correlated_dataset(n=3)
        with pytest.raises(AnalyticsError):
            usage_performance_analysis(usage, perf, exclusions=["u00"])

    def test_shuffled_independence_property(self):
        # permutation null: shuffling breaks the association most of the time
        usage, perf = _correlated_dataset(n=48, seed=31)
        rng = random.Random(314)
        users = sorted(usage)
        high_p = 0
        trials = 50
        for _ in range(trials):
            permuted = rng.sample(users, len(users))
            remapped = []
            for original, target in zip(users, permuted):
                for r in perf:
                    if r.user_id == original:
                        remapped.append(
                            PerformanceRecord(target, r.activity_id, r.points)
                        )
            analysis = usage_performance_analysis(usage, remapped)
            if analysis.correlation.p_two_tailed > 0.05:
                high_p += 1
        assert high_p >= trials * 0.9
