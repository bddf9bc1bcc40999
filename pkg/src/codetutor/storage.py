"""Append-only storage for query logs, plus exercise and performance imports.

The canonical interchange format is JSON lines: one object per record,
UTF-8, keys in a fixed documented order, so identical stores export to
identical bytes.
"""

from __future__ import annotations

import csv
import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable

from .model import AssistanceResponse, HelpRequest

SCHEMA_VERSION = 1

# Key order of one log line.  Response fields are null for records persisted
# after a backend failure (the request is always kept).
RECORD_KEYS = (
    "schema_version",
    "seq",
    "id",
    "user_id",
    "timestamp",
    "language",
    "code",
    "error",
    "issue",
    "main_text",
    "clarification_text",
    "code_was_removed",
    "fallback_strip_applied",
    "template_version",
    "trace",
    "backend_failed",
)


class StorageError(Exception):
    pass


class LogFormatError(StorageError):
    """A log line could not be parsed; carries its 1-based line number."""

    def __init__(self, line_number: int, reason: str):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number


class PerformanceDataError(StorageError):
    pass


@dataclass(frozen=True)
class QueryLogRecord:
    """One logged query: request fields plus flattened response fields."""

    seq: int
    id: str
    user_id: str
    timestamp: str
    language: str
    code: str
    error: str
    issue: str
    main_text: str | None = None
    clarification_text: str | None = None
    code_was_removed: bool | None = None
    fallback_strip_applied: bool | None = None
    template_version: str | None = None
    trace: tuple[tuple[str, str], ...] | None = None
    backend_failed: bool = False
    schema_version: int = SCHEMA_VERSION

    @classmethod
    def from_parts(
        cls,
        req: HelpRequest,
        resp: AssistanceResponse | None,
        seq: int = 0,
        backend_failed: bool = False,
    ) -> "QueryLogRecord":
        base = req.to_dict()
        if resp is None:
            return cls(seq=seq, backend_failed=backend_failed, **base)
        return cls(
            seq=seq,
            main_text=resp.main_text,
            clarification_text=resp.clarification_text,
            code_was_removed=resp.code_was_removed,
            fallback_strip_applied=resp.fallback_strip_applied,
            template_version=resp.template_version,
            trace=resp.trace,
            backend_failed=backend_failed,
            **base,
        )

    def to_help_request(self) -> HelpRequest:
        return HelpRequest.from_dict(
            {
                "id": self.id,
                "user_id": self.user_id,
                "timestamp": self.timestamp,
                "language": self.language,
                "code": self.code,
                "error": self.error,
                "issue": self.issue,
            }
        )

    def to_json_line(self) -> str:
        data = {
            "schema_version": self.schema_version,
            "seq": self.seq,
            "id": self.id,
            "user_id": self.user_id,
            "timestamp": self.timestamp,
            "language": self.language,
            "code": self.code,
            "error": self.error,
            "issue": self.issue,
            "main_text": self.main_text,
            "clarification_text": self.clarification_text,
            "code_was_removed": self.code_was_removed,
            "fallback_strip_applied": self.fallback_strip_applied,
            "template_version": self.template_version,
            "trace": None if self.trace is None else [list(t) for t in self.trace],
            "backend_failed": self.backend_failed,
        }
        return json.dumps(data, ensure_ascii=False, separators=(",", ":"))

    @classmethod
    def from_json_line(cls, line: str, line_number: int = 0) -> "QueryLogRecord":
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise LogFormatError(line_number, f"invalid JSON ({exc.msg})") from None
        if not isinstance(data, dict):
            raise LogFormatError(line_number, "line is not a JSON object")
        missing = [k for k in RECORD_KEYS if k not in data]
        if missing:
            raise LogFormatError(line_number, f"missing keys: {', '.join(missing)}")
        try:
            trace = data["trace"]
            if trace is not None:
                trace = tuple((t[0], t[1]) for t in trace)
            return cls(
                schema_version=data["schema_version"],
                seq=data["seq"],
                id=data["id"],
                user_id=data["user_id"],
                timestamp=data["timestamp"],
                language=data["language"],
                code=data["code"],
                error=data["error"],
                issue=data["issue"],
                main_text=data["main_text"],
                clarification_text=data["clarification_text"],
                code_was_removed=data["code_was_removed"],
                fallback_strip_applied=data["fallback_strip_applied"],
                template_version=data["template_version"],
                trace=trace,
                backend_failed=data["backend_failed"],
            )
        except (TypeError, IndexError, KeyError) as exc:
            raise LogFormatError(line_number, f"malformed record: {exc}") from None


class QueryLogStore:
    """Durable append-only log of QueryLogRecords.

    Appends are serialized and fsynced before returning; sequence numbers
    are monotone.  A torn final line (no trailing newline; typically an
    interrupted write) is ignored on load, previous records stay intact.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._records: list[QueryLogRecord] = []
        self._next_seq = 1
        self._fh: IO[str] | None = None
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        raw = self.path.read_bytes()
        text = raw.decode("utf-8")
        lines = text.split("\n")
        complete = lines[:-1]
        for i, line in enumerate(complete, start=1):
            if not line:
                raise LogFormatError(i, "blank line in log")
            self._records.append(QueryLogRecord.from_json_line(line, i))
        if lines[-1]:
            # interrupted append: drop the torn bytes so the next append
            # starts on a fresh line
            clean_len = len(raw) - len(lines[-1].encode("utf-8"))
            with open(self.path, "r+b") as fh:
                fh.truncate(clean_len)
        if self._records:
            self._next_seq = max(r.seq for r in self._records) + 1

    def _handle(self) -> IO[str]:
        if self._fh is None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._fh = open(self.path, "a", encoding="utf-8", newline="")
        return self._fh

    def append(self, record: QueryLogRecord) -> int:
        """Write one record durably; returns its assigned sequence number."""
        with self._lock:
            seq = self._next_seq
            stored = QueryLogRecord(
                **{**record.__dict__, "seq": seq, "schema_version": SCHEMA_VERSION}
            )
            fh = self._handle()
            fh.write(stored.to_json_line() + "\n")
            fh.flush()
            os.fsync(fh.fileno())
            self._records.append(stored)
            self._next_seq = seq + 1
            return seq

    def append_imported(self, record: QueryLogRecord) -> int:
        """Append preserving the record's own seq (import path)."""
        with self._lock:
            fh = self._handle()
            fh.write(record.to_json_line() + "\n")
            fh.flush()
            os.fsync(fh.fileno())
            self._records.append(record)
            self._next_seq = max(self._next_seq, record.seq + 1)
            return record.seq

    def load_all(self) -> list[QueryLogRecord]:
        with self._lock:
            return list(self._records)

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)

    def close(self) -> None:
        with self._lock:
            if self._fh is not None:
                self._fh.close()
                self._fh = None


def export_log(store: QueryLogStore, destination: str | Path) -> int:
    """Write the store canonically, one JSON object per line; returns count."""
    records = store.load_all()
    dest = Path(destination)
    dest.parent.mkdir(parents=True, exist_ok=True)
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        for record in records:
            fh.write(record.to_json_line() + "\n")
    return len(records)


def import_log(source: str | Path, store: QueryLogStore) -> int:
    """Import a JSONL export into a store.

    All lines are parsed before anything is written, so a malformed line
    (reported with its line number) leaves the store untouched.
    """
    text = Path(source).read_text(encoding="utf-8")
    records = []
    for i, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            raise LogFormatError(i, "blank line")
        records.append(QueryLogRecord.from_json_line(line, i))
    for record in records:
        store.append_imported(record)
    return len(records)


def read_log(source: str | Path) -> list[QueryLogRecord]:
    """Parse a JSONL log file without a backing store."""
    text = Path(source).read_text(encoding="utf-8")
    records = []
    for i, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            raise LogFormatError(i, "blank line")
        records.append(QueryLogRecord.from_json_line(line, i))
    return records


@dataclass(frozen=True)
class ExerciseText:
    """Full instruction text of one course exercise."""

    exercise_id: str
    text: str


def import_exercises(directory: str | Path) -> tuple[list[ExerciseText], list[str]]:
    """Load every .txt file in a directory as an exercise.

    The exercise id is the filename stem.  Unreadable or empty files are
    reported in the second element; the rest still load.
    """
    directory = Path(directory)
    exercises: list[ExerciseText] = []
    problems: list[str] = []
    for path in sorted(directory.glob("*.txt")):
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            problems.append(f"{path.name}: {exc}")
            continue
        if not text.strip():
            problems.append(f"{path.name}: empty exercise text")
            continue
        exercises.append(ExerciseText(exercise_id=path.stem, text=text))
    return exercises, problems


@dataclass(frozen=True)
class PerformanceRecord:
    """Course points one student earned on one activity."""

    user_id: str
    activity_id: str
    points: float


def import_performance(path: str | Path) -> list[PerformanceRecord]:
    """Parse a CSV of earned course points.

    Requires the exact header ``user_id,activity_id,points``; rejects
    negative points and duplicate (user, activity) pairs.
    """
    records: list[PerformanceRecord] = []
    seen: set[tuple[str, str]] = set()
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"user_id", "activity_id", "points"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            have = ", ".join(reader.fieldnames or [])
            raise PerformanceDataError(
                f"missing column(s): need user_id, activity_id, points; got: {have}"
            )
        for row_no, row in enumerate(reader, start=2):
            try:
                points = float(row["points"])
            except (TypeError, ValueError):
                raise PerformanceDataError(
                    f"row {row_no}: points {row['points']!r} is not a number"
                )
            if points < 0:
                raise PerformanceDataError(
                    f"row {row_no}: negative points for "
                    f"({row['user_id']}, {row['activity_id']})"
                )
            key = (row["user_id"], row["activity_id"])
            if key in seen:
                raise PerformanceDataError(f"duplicate (user, activity) key: {key}")
            seen.add(key)
            records.append(
                PerformanceRecord(
                    user_id=row["user_id"],
                    activity_id=row["activity_id"],
                    points=points,
                )
            )
    return records


@dataclass(frozen=True)
class LabelRecord:
    """One rater's category assignment for one query."""

    query_id: str
    rater_id: str
    category: str


def read_labels(path: str | Path) -> list[LabelRecord]:
    """Parse a JSONL labels file: {"query_id", "rater_id", "category"}."""
    labels = []
    text = Path(path).read_text(encoding="utf-8")
    for i, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
            labels.append(
                LabelRecord(data["query_id"], data["rater_id"], data["category"])
            )
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise LogFormatError(i, f"bad label line: {exc}") from None
    return labels


def write_labels(labels: Iterable[LabelRecord], path: str | Path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for label in labels:
            fh.write(
                json.dumps(
                    {
                        "query_id": label.query_id,
                        "rater_id": label.rater_id,
                        "category": label.category,
                    },
                    ensure_ascii=False,
                    separators=(",", ":"),
                )
                + "\n"
            )
            count += 1
    return count
