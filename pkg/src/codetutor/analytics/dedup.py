"""Near-duplicate filtering of consecutive resubmissions.

Two consecutive queries from one user count as duplicates when the sum of
the normalized edit distances of their code, error, and issue fields falls
below a threshold (default 0.25).  Each incoming query is compared against
the previous *kept* query, so a run of near-identical resubmissions
collapses to its first occurrence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..model import HelpRequest

DEFAULT_THRESHOLD = 0.25

SIMILARITY_FIELDS = ("code", "error", "issue")

# numpy pays off once the DP matrix is big enough
_NUMPY_CUTOFF = 48


def _levenshtein_plain(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        curr = [i]
        for j, cb in enumerate(b, 1):
            cost = 0 if ca == cb else 1
            curr.append(min(prev[j] + 1, curr[j - 1] + 1, prev[j - 1] + cost))
        prev = curr
    return prev[-1]


def _levenshtein_numpy(a: str, b: str) -> int:
    # Row-wise DP: deletion/substitution terms vectorize directly; the
    # insertion term is a running minimum of (row - j) restored by + j.
    bb = np.frombuffer(b.encode("utf-32-le"), dtype=np.uint32)
    n = len(bb)
    offsets = np.arange(n + 1)
    prev = offsets.copy()
    row = np.empty(n + 1, dtype=np.intp)
    for i, ca in enumerate(a, 1):
        cost = (bb != ord(ca)).astype(np.intp)
        row[0] = i
        np.minimum(prev[1:] + 1, prev[:-1] + cost, out=row[1:])
        prev = np.minimum.accumulate(row - offsets) + offsets
    return int(prev[-1])


def levenshtein(a: str, b: str) -> int:
    """Edit distance (insert / delete / substitute, unit costs)."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if max(len(a), len(b)) < _NUMPY_CUTOFF:
        return _levenshtein_plain(a, b)
    return _levenshtein_numpy(a, b)


def normalized_field_distance(a: str, b: str) -> float:
    """Levenshtein distance divided by the longer length, in [0, 1].

    Two empty strings are identical, so their distance is 0 (the formula's
    0/0 case).
    """
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return levenshtein(a, b) / longest


def query_similarity(x: HelpRequest, y: HelpRequest) -> float:
    """Sum of normalized distances over code, error, and issue, in [0, 3].

    0 means all three fields equivalent; 3 means all three entirely
    different.  The language field does not participate.
    """
    return sum(
        normalized_field_distance(getattr(x, f), getattr(y, f))
        for f in SIMILARITY_FIELDS
    )


def _similarity_below(x: HelpRequest, y: HelpRequest, threshold: float) -> bool:
    """query_similarity(x, y) < threshold, with early exits.

    The length difference of a field pair lower-bounds its normalized
    distance, so clearly-different pairs skip the DP entirely.
    """
    bound = 0.0
    pairs = []
    for f in SIMILARITY_FIELDS:
        a, b = getattr(x, f), getattr(y, f)
        longest = max(len(a), len(b))
        if longest:
            bound += abs(len(a) - len(b)) / longest
            if bound >= threshold:
                return False
        pairs.append((a, b, longest))
    total = 0.0
    for a, b, longest in pairs:
        if longest:
            total += levenshtein(a, b) / longest
            if total >= threshold:
                return False
    return total < threshold


@dataclass(frozen=True)
class DedupResult:
    kept: tuple[HelpRequest, ...]
    duplicates: tuple[HelpRequest, ...]

    @property
    def duplicate_count(self) -> int:
        return len(self.duplicates)


def _fields_equal(x: HelpRequest, y: HelpRequest) -> bool:
    return all(getattr(x, f) == getattr(y, f) for f in SIMILARITY_FIELDS)


def deduplicate(
    queries: Sequence[HelpRequest], k: float = DEFAULT_THRESHOLD
) -> DedupResult:
    """Drop consecutive per-user near-duplicates.

    Comparisons never cross users and the first query of a user is always
    kept.  Exact resubmissions (similarity 0) are duplicates at every
    threshold, including k=0.  Output preserves the input's overall order.
    """
    if not 0 <= k <= 3:
        raise ValueError(f"threshold {k} outside [0, 3]")
    order = {id(q): i for i, q in enumerate(queries)}
    by_user: dict[str, list[HelpRequest]] = {}
    for q in queries:
        by_user.setdefault(q.user_id, []).append(q)
    kept_set: list[HelpRequest] = []
    dropped: list[HelpRequest] = []
    for stream in by_user.values():
        stream = sorted(stream, key=lambda q: (q.timestamp, order[id(q)]))
        anchor: HelpRequest | None = None
        for q in stream:
            if anchor is not None and (
                _fields_equal(anchor, q) or _similarity_below(anchor, q, k)
            ):
                dropped.append(q)
            else:
                kept_set.append(q)
                anchor = q
    kept_set.sort(key=lambda q: order[id(q)])
    dropped.sort(key=lambda q: order[id(q)])
    return DedupResult(kept=tuple(kept_set), duplicates=tuple(dropped))
