import random
import string

import pytest
from hypothesis import given
from hypothesis import strategies as st

from codetutor.analytics.dedup import (
    deduplicate,
    levenshtein,
    normalized_field_distance,
    query_similarity,
)

from conftest import make_request


def levenshtein_oracle(a: str, b: str) -> int:
    """Textbook full-matrix DP, independent of the optimized paths."""
    m, n = len(a), len(b)
    dist = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(m + 1):
        dist[i][0] = i
    for j in range(n + 1):
        dist[0][j] = j
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            dist[i][j] = min(
                dist[i - 1][j] + 1,
                dist[i][j - 1] + 1,
                dist[i - 1][j - 1] + cost,
            )
    return dist[m][n]


class TestLevenshtein:
    def test_against_oracle_random_pairs(self):
        rng = random.Random(2023)
        alphabet = string.ascii_lowercase[:9] + " "
        for _ in range(200):
            # lengths straddle the plain/numpy implementation cutoff
            a = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 90)))
            b = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 90)))
            assert levenshtein(a, b) == levenshtein_oracle(a, b)

    def test_unicode(self):
        assert levenshtein("héllo", "hello") == 1
        assert levenshtein("héllo" * 20, "hello" * 20) == 20

    def test_trivial_cases(self):
        assert levenshtein("", "") == 0
        assert levenshtein("abc", "") == 3
        assert levenshtein("abc", "abc") == 0


class TestNormalizedFieldDistance:
    def test_identical(self):
        assert normalized_field_distance("abc", "abc") == 0.0

    def test_empty_empty_convention(self):
        assert normalized_field_distance("", "") == 0.0

    def test_worked_example(self):
        # hand Levenshtein = 3 substitutions, longer length 10
        assert normalized_field_distance("abcdefghij", "abcdefgxyz") == 0.3

    def test_disjoint(self):
        assert normalized_field_distance("aaa", "bbbbb") == 1.0

    @given(st.text(max_size=30), st.text(max_size=30))
    def test_bounds_and_symmetry(self, a, b):
        d = normalized_field_distance(a, b)
        assert 0.0 <= d <= 1.0
        assert d == normalized_field_distance(b, a)


class TestQuerySimilarity:
    def test_identical_queries(self):
        x = make_request(code="a", error="b", issue="c")
        assert query_similarity(x, x) == 0.0

    def test_fully_disjoint(self):
        x = make_request(code="aaa", error="bbb", issue="ccc")
        y = make_request(code="xxx", error="yyy", issue="zzz")
        assert query_similarity(x, y) == 3.0

    def test_single_field_contribution(self):
        x = make_request(code="same", error="same", issue="abcdefghij")
        y = make_request(code="same", error="same", issue="abcdefgxyz")
        assert query_similarity(x, y) == pytest.approx(0.3)

    def test_language_field_ignored(self):
        x = make_request(language="Python", code="a", error="b", issue="c")
        y = make_request(language="Rust", code="a", error="b", issue="c")
        assert query_similarity(x, y) == 0.0

    @given(
        st.tuples(st.text(max_size=12), st.text(max_size=12), st.text(max_size=12)),
        st.tuples(st.text(max_size=12), st.text(max_size=12), st.text(max_size=12)),
    )
    def test_symmetric_bounded(self, fields_x, fields_y):
        x = make_request(code=fields_x[0], error=fields_x[1], issue=fields_x[2])
        y = make_request(code=fields_y[0], error=fields_y[1], issue=fields_y[2])
        s = query_similarity(x, y)
        assert 0.0 <= s <= 3.0
        assert s == query_similarity(y, x)
        if fields_x == fields_y:
            assert s == 0.0


LONG = "this is a long issue about an assignment problem"  # 49 chars


class TestDeduplicate:
    def test_identical_resubmission_dropped(self):
        a = make_request(at=0, code="x=1", issue=LONG)
        b = make_request(at=60, code="x=1", issue=LONG, req_id="b")
        result = deduplicate([a, b])
        assert result.duplicate_count == 1
        assert [q.id for q in result.kept] == [a.id]

    def test_cross_user_identical_kept(self):
        a = make_request(user_id="u1", at=0, code="x=1", issue=LONG)
        b = make_request(user_id="u2", at=30, code="x=1", issue=LONG)
        result = deduplicate([a, b])
        assert result.duplicate_count == 0
        assert len(result.kept) == 2

    def test_first_query_never_dropped(self):
        queries = [
            make_request(user_id=u, at=i * 10, code="same", issue=LONG, req_id=f"{u}-{i}")
            for u in ("u1", "u2")
            for i in range(3)
        ]
        result = deduplicate(queries)
        kept_ids = {q.id for q in result.kept}
        assert "u1-0" in kept_ids and "u2-0" in kept_ids

    def test_chained_resubmissions_collapse_to_anchor(self):
        # B and C drift from A gradually; each is compared against kept A
        a = make_request(at=0, issue=LONG, req_id="a")
        b = make_request(at=10, issue=LONG + "!!", req_id="b")  # 2/51 from A
        c = make_request(at=20, issue=LONG + "!!!!", req_id="c")  # 4/53 from A
        result = deduplicate([a, b, c])
        assert [q.id for q in result.kept] == ["a"]
        assert result.duplicate_count == 2

    def test_drift_beyond_threshold_kept(self):
        a = make_request(at=0, issue="aaaaaaaaaaaaaaaaaaaa", req_id="a")
        far = make_request(at=10, issue="aaaaaaaaaaaabbbbbbbb", req_id="far")
        result = deduplicate([a, far])  # 8/20 = 0.4 >= 0.25
        assert result.duplicate_count == 0

    def test_threshold_strictly_less_than(self):
        a = make_request(at=0, code="", error="", issue="aaaaaaaaaaaaaaaaaaaa", req_id="a")
        b = make_request(at=10, code="", error="", issue="aaaaaaaaaaaaaaabbbbb", req_id="b")
        # distance exactly 5/20 = 0.25: not a duplicate under strict <
        assert deduplicate([a, b], k=0.25).duplicate_count == 0
        assert deduplicate([a, b], k=0.2501).duplicate_count == 1

    def test_k_zero_drops_only_exact_matches(self):
        a = make_request(at=0, code="x=1", issue=LONG, req_id="a")
        exact = make_request(at=10, code="x=1", issue=LONG, req_id="ex")
        near = make_request(at=20, code="x=1", issue=LONG + "?", req_id="near")
        result = deduplicate([a, exact, near], k=0.0)
        assert [q.id for q in result.duplicates] == ["ex"]

    def test_unsorted_input_ordered_by_timestamp(self):
        # the earlier query anchors even when it appears later in the input
        a = make_request(at=100, code="x=1", issue=LONG, req_id="later")
        b = make_request(at=0, code="x=1", issue=LONG, req_id="earlier")
        result = deduplicate([a, b])
        assert [q.id for q in result.kept] == ["earlier"]
        assert [q.id for q in result.duplicates] == ["later"]

    def test_threshold_validation(self):
        with pytest.raises(ValueError):
            deduplicate([], k=-0.1)
        with pytest.raises(ValueError):
            deduplicate([], k=3.5)


def test_dedup_ordering_across_users_preserved():
    queries = [
        make_request(user_id="u2", at=0, code="a", issue=LONG, req_id="u2-a"),
        make_request(user_id="u1", at=5, code="b", issue="different thing entirely", req_id="u1-a"),
        make_request(user_id="u2", at=9, code="a", issue=LONG, req_id="u2-dup"),
    ]
    result = deduplicate(queries)
    assert [q.id for q in result.kept] == ["u2-a", "u1-a"]
    assert [q.id for q in result.duplicates] == ["u2-dup"]
