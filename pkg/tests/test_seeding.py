import hashlib
import json
from pathlib import Path

import pytest

from codetutor.analytics import build_report, deduplicate
from codetutor.seeding import generate_corpus, generic_profile, table1_profile
from codetutor.storage import (
    import_exercises,
    import_performance,
    read_labels,
    read_log,
)


def _dir_digest(path: Path) -> str:
    h = hashlib.sha256()
    for file in sorted(path.rglob("*")):
        if file.is_file():
            h.update(file.relative_to(path).as_posix().encode())
            h.update(file.read_bytes())
    return h.hexdigest()


def test_profiles():
    t1 = table1_profile()
    assert t1.kept == 2082
    assert sum(t1.category_counts.values()) == 2082
    custom = generic_profile(5, 100)
    assert custom.total_queries == 100
    assert sum(custom.category_counts.values()) == custom.kept
    with pytest.raises(ValueError):
        generic_profile(2, 100)
    with pytest.raises(ValueError):
        generic_profile(10, 30)


def test_fixed_seed_byte_identical(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    generate_corpus(a, users=6, total_queries=120, seed=77)
    generate_corpus(b, users=6, total_queries=120, seed=77)
    assert _dir_digest(a) == _dir_digest(b)


def test_different_seed_differs(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    generate_corpus(a, users=6, total_queries=120, seed=77)
    generate_corpus(b, users=6, total_queries=120, seed=78)
    assert _dir_digest(a) != _dir_digest(b)


def test_small_corpus_planted_quantities(tmp_path):
    manifest = generate_corpus(tmp_path, users=8, total_queries=200, seed=5)
    records = read_log(tmp_path / "log.jsonl")
    assert len(records) == 200
    queries = [r.to_help_request() for r in records]
    dedup = deduplicate(queries)
    assert dedup.duplicate_count == manifest["planted_duplicates"]
    assert len(dedup.kept) == manifest["kept_queries"]
    labels = read_labels(tmp_path / "labels.jsonl")
    assert len(labels) == 2 * manifest["kept_queries"]
    exercises, problems = import_exercises(tmp_path / "exercises")
    assert problems == []
    assert all(len(e.text) >= 200 for e in exercises)
    performance = import_performance(tmp_path / "performance.csv")
    assert {p.user_id for p in performance} == {f"student{i:02d}" for i in range(1, 9)}


def test_minimal_corpus_analyzable(tmp_path):
    manifest = generate_corpus(tmp_path, users=3, total_queries=30, seed=9)
    records = read_log(tmp_path / "log.jsonl")
    queries = [r.to_help_request() for r in records]
    report = build_report(
        queries,
        labels=read_labels(tmp_path / "labels.jsonl"),
        exercises=import_exercises(tmp_path / "exercises")[0],
        performance=import_performance(tmp_path / "performance.csv"),
    )
    assert report["dedup"]["duplicates_removed"] == manifest["planted_duplicates"]
    assert report["correlation"]["n"] == 3


def test_seq_numbers_follow_receipt_order(tmp_path):
    generate_corpus(tmp_path, users=4, total_queries=60, seed=3)
    records = read_log(tmp_path / "log.jsonl")
    assert [r.seq for r in records] == list(range(1, 61))
    stamps = [r.timestamp for r in records]
    assert stamps == sorted(stamps)


def test_manifest_written(tmp_path):
    manifest = generate_corpus(tmp_path, users=5, total_queries=80, seed=1)
    on_disk = json.loads((tmp_path / "manifest.json").read_text())
    assert on_disk == manifest
    assert on_disk["files"]["log"] == "log.jsonl"
