"""Synthetic corpus generator with a ground-truth manifest.

Real classroom data cannot be redistributed, so the seeded corpus is the
oracle for the analytics pipeline: every planted quantity (duplicate count,
category counts, outlier, target correlation) is recorded in a manifest
that an ``analyze`` run must reproduce.

Construction notes:

- Usage metrics per user are realized exactly: each session spans exactly
  the user's planned length, so total queries / sessions / mean length are
  known, not estimated.
- Performance points are built from the recovered usage composite so the
  sample correlation equals the target r exactly (residuals are
  orthogonalized in-sample before mixing).
- Duplicates are planted as consecutive perturbations below the similarity
  threshold; every other consecutive pair is checked (and regenerated if
  needed) to sit above it.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Sequence

from .analytics.content import Category, ExerciseMatcher, flag_short_issue
from .analytics.dedup import (
    DEFAULT_THRESHOLD,
    _similarity_below,
    deduplicate,
)
from .analytics.sessions import UsageRecord, composite_usage
from .analytics.stats import cohen_kappa, pearson, sample_sd, zscores
from .model import HelpRequest, format_timestamp
from .storage import ExerciseText, LabelRecord, QueryLogRecord, write_labels

DEFAULT_SEED = 20230130

SEMESTER_START = datetime(2023, 1, 30, 9, 0, 0, tzinfo=timezone.utc)

# Loadings of the shared activity factor vs. idiosyncratic noise for the
# three usage metrics; calibrated so the realized internal consistency of
# the integerized, clamped metrics lands near alpha = 0.87.
FACTOR_LOADING = 0.52**0.5
NOISE_LOADING = 0.48**0.5

RATERS = ("rater1", "rater2")


@dataclass(frozen=True)
class SeedProfile:
    users: int
    total_queries: int
    duplicates: int
    category_counts: dict[Category, int]
    outlier_queries: int | None
    target_r: float = 0.38
    target_alpha: float = 0.87

    @property
    def kept(self) -> int:
        return self.total_queries - self.duplicates


TABLE1_CATEGORY_COUNTS = {
    Category.DEBUGGING_ERROR: 484,
    Category.DEBUGGING_OUTCOME: 90,
    Category.DEBUGGING_BOTH: 259,
    Category.IMPLEMENTATION: 1038,
    Category.UNDERSTANDING: 161,
    Category.NOTHING: 47,
    Category.OFF_TOPIC: 3,
}


def table1_profile() -> SeedProfile:
    return SeedProfile(
        users=49,
        total_queries=2591,
        duplicates=509,
        category_counts=dict(TABLE1_CATEGORY_COUNTS),
        outlier_queries=614,
    )


def generic_profile(users: int, total_queries: int) -> SeedProfile:
    if users < 3:
        raise ValueError("need at least 3 users")
    if total_queries < 6 * users:
        raise ValueError(f"need at least {6 * users} queries for {users} users")
    duplicates = round(total_queries * 0.2)
    kept = total_queries - duplicates
    counts = _allocate_proportional(
        kept,
        {c: n for c, n in TABLE1_CATEGORY_COUNTS.items()},
    )
    return SeedProfile(
        users=users,
        total_queries=total_queries,
        duplicates=duplicates,
        category_counts=counts,
        outlier_queries=None,
    )


def _allocate_proportional(total: int, weights: dict) -> dict:
    """Largest-remainder allocation of ``total`` across weighted keys."""
    weight_sum = sum(weights.values())
    shares = {k: total * w / weight_sum for k, w in weights.items()}
    counts = {k: int(share) for k, share in shares.items()}
    remainder = total - sum(counts.values())
    by_frac = sorted(weights, key=lambda k: shares[k] - counts[k], reverse=True)
    for k in by_frac[:remainder]:
        counts[k] += 1
    return counts


def _adjust_to_sum(values: list[int], target: int, minimum: int) -> list[int]:
    values = list(values)
    i = 0
    while sum(values) != target:
        idx = i % len(values)
        if sum(values) < target:
            values[idx] += 1
        elif values[idx] > minimum:
            values[idx] -= 1
        i += 1
    return values


def _ensure_variance(
    values: list[int], minimum: int, preserve_sum: bool = False
) -> list[int]:
    """Nudge a constant vector so standardization never degenerates."""
    if len(set(values)) > 1:
        return values
    values = list(values)
    values[0] += 1
    if preserve_sum:
        # a constant vector at the floor cannot be varied sum-preservingly,
        # but the profiles guarantee per-user averages above the floor
        if values[1] <= minimum:
            raise RuntimeError("cannot vary a constant vector at its minimum")
        values[1] -= 1
    return values


# --- content pools ---------------------------------------------------------

_FUNCTION_NAMES = (
    "count_vowels", "middle_chars", "grade_average", "word_lengths",
    "temp_convert", "filter_evens", "running_total", "swap_pairs",
    "find_longest", "digit_sum", "merge_lists", "strip_punct",
)
_VARIABLES = ("total", "result", "values", "counts", "items", "scores",
              "grades", "numbers", "letters", "entries")
_CONCEPT_PAIRS = (
    ("a list", "a tuple"), ("append", "extend"), ("print", "return"),
    ("a for loop", "a while loop"), ("== comparison", "= assignment"),
    ("local variables", "global variables"), ("sort", "sorted"),
    ("a method", "a function"), ("slicing", "indexing"),
)
_ERROR_TEMPLATES = (
    "NameError: name '{var}' is not defined",
    "TypeError: unsupported operand type(s) for +: 'int' and 'str'",
    "IndexError: list index out of range",
    "IndentationError: unexpected indent",
    "ValueError: invalid literal for int() with base 10: '{var}'",
    "AttributeError: 'list' object has no attribute '{var}'",
    "KeyError: '{var}'",
    "ZeroDivisionError: division by zero",
)
_SHORT_ISSUES = ("fix 404?", "err @9", "fx it 4?!", "?? 12", "broke 77", "hi 00")
_OFF_TOPIC_ISSUES = (
    "can you recommend a good lunch spot near campus",
    "who will win the championship game this weekend",
    "write me a poem about the weekend please",
)
_EXERCISE_OPENERS = (
    "Write a fruitful function called {fn}() that takes {arg} as an argument.",
    "Define a function named {fn}() accepting {arg}.",
    "Create a program with a function {fn}() which processes {arg}.",
)
_EXERCISE_BODIES = (
    "If the input has an even number of elements, return a new collection "
    "with the middle pair removed; otherwise drop only the single middle "
    "element and return what remains.",
    "The function should accumulate a running tally as it traverses the "
    "input and return the final tally once every element has been visited.",
    "Validate the input first: when it is empty, return None; when it "
    "contains negative entries, raise a ValueError naming the offender.",
    "Convert every entry according to the course formula sheet, rounding "
    "to two decimal places, and return the converted values in order.",
    "Compare adjacent elements pairwise and swap any pair that is out of "
    "order, repeating passes until a full pass performs no swaps.",
    "Count how many entries satisfy the threshold given as the second "
    "parameter and return both the count and the qualifying entries.",
)
_EXERCISE_CLOSERS = (
    "Test your function with at least three cases of your own design.",
    "Your submission must include a docstring describing the parameters.",
    "Do not use any imports beyond the standard library for this task.",
)


def _token(rng: random.Random) -> str:
    return "".join(rng.choice("abcdefghijklmnopqrstuvwxyz") for _ in range(5))


def _make_exercises(rng: random.Random, count: int = 18) -> list[tuple[str, str]]:
    exercises = []
    for i in range(1, count + 1):
        opener = rng.choice(_EXERCISE_OPENERS).format(
            fn=rng.choice(_FUNCTION_NAMES), arg=f"a {rng.choice(_VARIABLES)} list"
        )
        body = rng.choice(_EXERCISE_BODIES)
        closer = rng.choice(_EXERCISE_CLOSERS)
        text = f"{opener} {body} {closer}\n"
        exercises.append((f"exercise{i:02d}", text))
    return exercises


def _code_snippet(rng: random.Random) -> str:
    fn = rng.choice(_FUNCTION_NAMES)
    var = rng.choice(_VARIABLES)
    tok = _token(rng)
    styles = (
        f"def {fn}({var}):\n    {tok} = 0\n    for item in {var}:\n"
        f"        {tok} = {tok} + item\n    return {tok}",
        f"{var} = input('enter {tok}: ')\nif {var} > {rng.randrange(2, 60)}:\n"
        f"    print('{tok}')",
        f"for i in range(len({var})):\n    if {var}[i] == '{tok}':\n"
        f"        print(i)",
        f"while {var} != '{tok}':\n    {var} = {var} - {rng.randrange(1, 9)}\n"
        f"print({var})",
    )
    return rng.choice(styles)


def _error_text(rng: random.Random) -> str:
    return rng.choice(_ERROR_TEMPLATES).format(var=rng.choice(_VARIABLES))


@dataclass
class _Slot:
    """One raw query being assembled."""

    user_id: str
    position: int
    timestamp: datetime
    is_duplicate: bool
    category: Category | None = None
    language: str = "Python"
    code: str = ""
    error: str = ""
    issue: str = ""


def _ref(rng: random.Random) -> str:
    """Identifier-ish reference with digits and underscores.

    Exercise texts are plain prose (no digits, '_', '?', '@'), so these
    characters can never participate in a matching block; generated issues
    stay clearly below the copied threshold unless copying is planted.
    """
    return f"{rng.choice(_FUNCTION_NAMES)}_{rng.randrange(100, 9999)}"


def _fresh_content(
    slot: _Slot,
    rng: random.Random,
    exercise_texts: list[str],
    copied_cursor: list[int],
) -> None:
    category = slot.category
    assert category is not None
    line = rng.randrange(2, 99)
    if category is Category.NOTHING:
        slot.code = _code_snippet(rng)
        slot.error = ""
        slot.issue = ""
    elif category is Category.OFF_TOPIC:
        slot.code = ""
        slot.error = ""
        slot.issue = f"{rng.choice(_OFF_TOPIC_ISSUES)} [q_{rng.randrange(1000, 9999)}]"
    elif category is Category.UNDERSTANDING:
        a, b = rng.choice(_CONCEPT_PAIRS)
        slot.code = ""
        slot.error = ""
        slot.issue = (
            f"what is the difference between {a} and {b}? asking for "
            f"problem_{rng.randrange(10, 99)} ({_token(rng)}_{line})"
        )
    elif category is Category.IMPLEMENTATION:
        slot.code = _code_snippet(rng)
        slot.error = ""
        if rng.random() < 0.28:
            exercise = exercise_texts[copied_cursor[0] % len(exercise_texts)]
            copied_cursor[0] += 1
            prefix = rng.choice(("How do I ", "", "This is using Pandas. "))
            slot.issue = prefix + exercise.strip()
        else:
            slot.issue = (
                f"how do i get {_ref(rng)} to handle input #{line} "
                f"for part_{rng.randrange(1, 9)} of the lab? ({_token(rng)})"
            )
    elif category is Category.DEBUGGING_ERROR:
        slot.code = _code_snippet(rng)
        slot.error = _error_text(rng)
        if rng.random() < 0.15:
            slot.issue = rng.choice(_SHORT_ISSUES)
        else:
            slot.issue = (
                f"why am i getting this error on line {line} of {_ref(rng)} "
                f"when i run it?"
            )
    elif category is Category.DEBUGGING_OUTCOME:
        slot.code = _code_snippet(rng)
        slot.error = ""
        slot.issue = (
            f"my function {_ref(rng)} should return the {rng.choice(_VARIABLES)} "
            f"doubled but it gives back [] after pass {line}"
        )
    elif category is Category.DEBUGGING_BOTH:
        slot.code = _code_snippet(rng)
        slot.error = _error_text(rng)
        slot.issue = (
            f"it crashes on line {line} with this error but test_{_ref(rng)} "
            f"expects the sorted {rng.choice(_VARIABLES)}"
        )
    else:  # pragma: no cover - taxonomy is closed
        raise AssertionError(category)


def _perturb_duplicate(slot: _Slot, anchor: _Slot, rng: random.Random) -> None:
    slot.language = anchor.language
    slot.code = anchor.code
    slot.error = anchor.error
    slot.issue = anchor.issue
    if rng.random() < 0.4 and len(anchor.issue) >= 40:
        # small edit: stays well under threshold on a long issue
        cut = rng.randrange(0, 3)
        slot.issue = anchor.issue[: len(anchor.issue) - cut] + rng.choice(
            ("", " ", "!")
        )


def _slot_request(slot: _Slot) -> HelpRequest:
    return HelpRequest(
        id=f"{slot.user_id}-{slot.position:04d}",
        user_id=slot.user_id,
        timestamp=slot.timestamp,
        language=slot.language,
        code=slot.code,
        error=slot.error,
        issue=slot.issue,
    )


def _draw_metrics(
    rng: random.Random, profile: SeedProfile, users: list[str], outlier: str | None
) -> tuple[dict[str, int], dict[str, int], dict[str, int]]:
    """Plan (raw queries, sessions, mean session length) per user."""
    regular = [u for u in users if u != outlier]
    budget = profile.total_queries - (profile.outlier_queries or 0)
    mu_t = math.log(budget / len(regular) + 1)
    totals_f = {}
    sessions_f = {}
    lengths_f = {}
    for u in regular:
        g = rng.gauss(0, 1)
        e1, e2, e3 = (rng.gauss(0, 1) for _ in range(3))
        totals_f[u] = math.expm1(mu_t + 0.85 * (FACTOR_LOADING * g + NOISE_LOADING * e1))
        sessions_f[u] = math.expm1(2.67 + 0.65 * (FACTOR_LOADING * g + NOISE_LOADING * e2))
        lengths_f[u] = math.expm1(6.55 + 0.80 * (FACTOR_LOADING * g + NOISE_LOADING * e3))
    totals = {u: max(4, round(v)) for u, v in totals_f.items()}
    adjusted = _adjust_to_sum(list(totals.values()), budget, minimum=4)
    totals = dict(
        zip(regular, _ensure_variance(adjusted, minimum=4, preserve_sum=True))
    )
    sessions = {}
    lengths = {}
    for u in regular:
        sessions[u] = max(2, min(totals[u] // 2, round(sessions_f[u])))
        lengths[u] = max(60, min(3400, round(lengths_f[u])))
    session_values = _ensure_variance([sessions[u] for u in regular], minimum=1)
    sessions = dict(zip(regular, session_values))
    length_values = _ensure_variance([lengths[u] for u in regular], minimum=60)
    lengths = dict(zip(regular, length_values))
    if outlier is not None:
        totals[outlier] = profile.outlier_queries or 0
        sessions[outlier] = min(totals[outlier] // 2, 44)
        lengths[outlier] = 1490
    return totals, sessions, lengths


def _build_user_stream(
    rng: random.Random,
    user_id: str,
    total: int,
    session_count: int,
    session_length: int,
    dup_count: int,
) -> list[_Slot]:
    sizes = [2] * session_count
    for _ in range(total - 2 * session_count):
        sizes[rng.randrange(session_count)] += 1
    start = SEMESTER_START + timedelta(seconds=rng.randrange(0, 14 * 86400))
    timestamps: list[datetime] = []
    for size in sizes:
        offsets = [0, session_length]
        offsets.extend(rng.randrange(0, session_length + 1) for _ in range(size - 2))
        offsets.sort()
        timestamps.extend(start + timedelta(seconds=o) for o in offsets)
        start += timedelta(seconds=session_length + rng.randrange(4000, 90000))
    dup_positions = set(rng.sample(range(1, total), dup_count)) if dup_count else set()
    return [
        _Slot(
            user_id=user_id,
            position=i + 1,
            timestamp=timestamps[i],
            is_duplicate=i in dup_positions,
        )
        for i in range(total)
    ]


def generate_corpus(
    out_dir: str | Path,
    users: int | None = None,
    total_queries: int | None = None,
    profile_name: str = "table1",
    seed: int = DEFAULT_SEED,
) -> dict:
    """Write a synthetic corpus and return its ground-truth manifest.

    Emits log.jsonl, labels.jsonl, performance.csv, exercises/*.txt, and
    manifest.json.  Deterministic for a fixed seed.
    """
    if users is not None or total_queries is not None:
        n_users = users or 10
        profile = generic_profile(n_users, total_queries or 40 * n_users)
        profile_name = "custom"
    elif profile_name == "table1":
        profile = table1_profile()
    else:
        raise ValueError(f"unknown profile {profile_name!r}")

    rng = random.Random(seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    user_ids = [f"student{i:02d}" for i in range(1, profile.users + 1)]
    outlier = rng.choice(user_ids) if profile.outlier_queries else None

    exercises = _make_exercises(rng)
    exercise_dir = out / "exercises"
    exercise_dir.mkdir(exist_ok=True)
    for exercise_id, text in exercises:
        (exercise_dir / f"{exercise_id}.txt").write_text(text, encoding="utf-8")
    exercise_texts = [text for _, text in exercises]

    totals, session_counts, session_lengths = _draw_metrics(
        rng, profile, user_ids, outlier
    )

    # duplicates proportional to raw totals, capped so every user keeps >= 2
    dup_weights = {u: totals[u] for u in user_ids}
    dups = _allocate_proportional(profile.duplicates, dup_weights)
    for u in user_ids:
        cap = totals[u] - 2
        if dups[u] > cap:
            spill = dups[u] - cap
            dups[u] = cap
            for v in sorted(user_ids, key=lambda x: totals[x], reverse=True):
                while spill and dups[v] < totals[v] - 2:
                    dups[v] += 1
                    spill -= 1

    streams = {
        u: _build_user_stream(
            rng, u, totals[u], session_counts[u], session_lengths[u], dups[u]
        )
        for u in user_ids
    }

    # assign categories to kept slots from the exact planted pool
    label_pool: list[Category] = []
    for category, count in profile.category_counts.items():
        label_pool.extend([category] * count)
    rng.shuffle(label_pool)
    kept_slots = [s for u in user_ids for s in streams[u] if not s.is_duplicate]
    assert len(kept_slots) == len(label_pool) == profile.kept
    for slot, category in zip(kept_slots, label_pool):
        slot.category = category

    # generate content, then repair any accidental near-duplicate neighbors
    copied_cursor = [0]
    for u in user_ids:
        anchor: _Slot | None = None
        for slot in streams[u]:
            if slot.is_duplicate:
                assert anchor is not None
                _perturb_duplicate(slot, anchor, rng)
            else:
                _fresh_content(slot, rng, exercise_texts, copied_cursor)
                if anchor is not None:
                    tries = 0
                    while _similarity_below(
                        _slot_request(anchor), _slot_request(slot), DEFAULT_THRESHOLD
                    ):
                        _fresh_content(slot, rng, exercise_texts, copied_cursor)
                        tries += 1
                        if tries > 50:
                            raise RuntimeError("could not separate consecutive queries")
                anchor = slot

    # receipt order: global timestamp order (stable per-user)
    all_slots = [s for u in user_ids for s in streams[u]]
    all_slots.sort(key=lambda s: (s.timestamp, s.user_id, s.position))
    requests = [_slot_request(s) for s in all_slots]

    # self-check: the planted duplicate structure is exactly recoverable
    dedup = deduplicate(requests, k=DEFAULT_THRESHOLD)
    if dedup.duplicate_count != profile.duplicates:
        raise RuntimeError(
            f"planted {profile.duplicates} duplicates but dedup finds "
            f"{dedup.duplicate_count}"
        )

    log_path = out / "log.jsonl"
    with open(log_path, "w", encoding="utf-8", newline="") as fh:
        for seq, req in enumerate(requests, start=1):
            record = QueryLogRecord(
                seq=seq,
                id=req.id,
                user_id=req.user_id,
                timestamp=format_timestamp(req.timestamp),
                language=req.language,
                code=req.code,
                error=req.error,
                issue=req.issue,
            )
            fh.write(record.to_json_line() + "\n")

    # labels: rater1 is the planted consensus; rater2 disagrees at rates
    # that land overall kappa near the profile's reported reliability
    labels: list[LabelRecord] = []
    vec1: list[Category] = []
    vec2: list[Category] = []
    marginals = {c: n / profile.kept for c, n in profile.category_counts.items()}
    for slot in kept_slots:
        primary = slot.category
        assert primary is not None
        draw = rng.random()
        if draw < 0.099:
            secondary = _draw_other_top_level(rng, primary, marginals)
        elif primary.top_level == "debugging" and draw < 0.099 + 0.175:
            others = [c for c in (
                Category.DEBUGGING_ERROR,
                Category.DEBUGGING_OUTCOME,
                Category.DEBUGGING_BOTH,
            ) if c is not primary]
            secondary = rng.choice(others)
        else:
            secondary = primary
        vec1.append(primary)
        vec2.append(secondary)
        query_id = _slot_request(slot).id
        labels.append(LabelRecord(query_id, RATERS[0], primary.value))
        labels.append(LabelRecord(query_id, RATERS[1], secondary.value))
    write_labels(labels, out / "labels.jsonl")
    achieved_kappa = cohen_kappa(vec1, vec2)
    achieved_kappa_collapsed = cohen_kappa(
        [c.top_level for c in vec1], [c.top_level for c in vec2]
    )

    # performance: exact-r construction against the recovered composite
    usage_records = {
        u: UsageRecord(
            user_id=u,
            total_queries=totals[u],
            total_sessions=session_counts[u],
            avg_session_length_seconds=float(session_lengths[u]),
        )
        for u in user_ids
    }
    included = sorted(u for u in user_ids if u != outlier)
    composite = composite_usage(
        usage_records, exclusions=[outlier] if outlier else []
    )
    composite_all = composite_usage(usage_records)
    z_hat = zscores([composite.scores[u] for u in included], name="composite")
    eps = _orthogonal_noise(rng, z_hat)
    r = profile.target_r
    c_scores = [r * z + math.sqrt(1 - r * r) * e for z, e in zip(z_hat, eps)]
    performance_by_user = dict(zip(included, c_scores))
    if outlier is not None:
        performance_by_user[outlier] = rng.gauss(0, 0.6)

    activities = (
        [(f"quiz{i:02d}", math.log(21.0), 0.22) for i in range(1, 5)]
        + [(f"assignment{i:02d}", math.log(46.0), 0.25) for i in range(1, 6)]
        + [(f"reading{i:02d}", math.log(10.0), 0.18) for i in range(1, 4)]
    )
    perf_path = out / "performance.csv"
    with open(perf_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("user_id,activity_id,points\n")
        for u in user_ids:
            c = performance_by_user[u]
            for activity_id, mu, sigma in activities:
                points = math.expm1(mu + sigma * c)
                assert points >= 0
                fh.write(f"{u},{activity_id},{points!r}\n")

    achieved_r = pearson(
        [composite.scores[u] for u in included],
        [performance_by_user[u] for u in included],
    ).r

    # measured low-effort ground truth over kept queries
    matcher = ExerciseMatcher(
        [ExerciseText(exercise_id=e, text=t) for e, t in exercises]
    )
    short_count = sum(flag_short_issue(s.issue) for s in kept_slots)
    copied_count = sum(
        matcher.copied_percentage(s.issue) >= 80.0 for s in kept_slots
    )

    category_counts_str = {
        c.value: n for c, n in profile.category_counts.items()
    }
    manifest = {
        "seed": seed,
        "profile": profile_name,
        "users": profile.users,
        "total_queries": profile.total_queries,
        "planted_duplicates": profile.duplicates,
        "kept_queries": profile.kept,
        "dedup_k": DEFAULT_THRESHOLD,
        "gap_seconds": 3600,
        "category_counts": category_counts_str,
        "outlier_user": outlier,
        "outlier_queries": profile.outlier_queries,
        "target_r": profile.target_r,
        "achieved_r": achieved_r,
        "target_alpha": profile.target_alpha,
        "achieved_alpha_excluding_outlier": composite.cronbach_alpha,
        "achieved_alpha_all_users": composite_all.cronbach_alpha,
        "achieved_kappa": achieved_kappa,
        "achieved_kappa_collapsed": achieved_kappa_collapsed,
        "short_issue_count": short_count,
        "copied_count": copied_count,
        "files": {
            "log": "log.jsonl",
            "labels": "labels.jsonl",
            "performance": "performance.csv",
            "exercises": "exercises",
        },
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    return manifest


def _draw_other_top_level(
    rng: random.Random, primary: Category, marginals: dict[Category, float]
) -> Category:
    candidates = [
        (c, w)
        for c, w in marginals.items()
        if c.top_level != primary.top_level and w > 0
    ]
    total = sum(w for _, w in candidates)
    pick = rng.random() * total
    acc = 0.0
    for c, w in candidates:
        acc += w
        if pick <= acc:
            return c
    return candidates[-1][0]


def _orthogonal_noise(rng: random.Random, z_hat: Sequence[float]) -> list[float]:
    """Standardized noise exactly orthogonal (in-sample) to z_hat."""
    n = len(z_hat)
    for _ in range(100):
        eps = [rng.gauss(0, 1) for _ in range(n)]
        mean = sum(eps) / n
        eps = [e - mean for e in eps]
        zz = sum(z * z for z in z_hat)
        proj = sum(e * z for e, z in zip(eps, z_hat)) / zz
        eps = [e - proj * z for e, z in zip(eps, z_hat)]
        sd = sample_sd(eps)
        if sd > 1e-9:
            return [e / sd for e in eps]
    raise RuntimeError("could not draw non-degenerate noise")
