"""Core data model: semi-structured help requests and assistant responses."""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable

DEFAULT_MAX_FIELD_BYTES = 64 * 1024

CONTENT_FIELDS = ("language", "code", "error", "issue")


class ValidationError(ValueError):
    """A submitted request could not be turned into a HelpRequest."""


class OversizedFieldError(ValidationError):
    """A content field exceeds the configured per-field byte limit."""

    def __init__(self, field_name: str, size: int, limit: int):
        super().__init__(
            f"field '{field_name}' is {size} bytes, exceeding the {limit}-byte limit"
        )
        self.field_name = field_name
        self.size = size
        self.limit = limit


class InvalidTimestampError(ValidationError):
    """A supplied timestamp is not a valid UTC instant."""


@dataclass(frozen=True)
class HelpRequest:
    """One student query: language, code, error, and issue, stored verbatim.

    Empty content fields are legal submissions; only oversized fields are
    rejected at validation time.
    """

    id: str
    user_id: str
    timestamp: datetime
    language: str
    code: str
    error: str
    issue: str

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "user_id": self.user_id,
            "timestamp": format_timestamp(self.timestamp),
            "language": self.language,
            "code": self.code,
            "error": self.error,
            "issue": self.issue,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "HelpRequest":
        return cls(
            id=data["id"],
            user_id=data["user_id"],
            timestamp=parse_timestamp(data["timestamp"]),
            language=data["language"],
            code=data["code"],
            error=data["error"],
            issue=data["issue"],
        )


@dataclass(frozen=True)
class AssistanceResponse:
    """Pipeline output for one request.

    ``main_text`` is guaranteed free of fenced code blocks by the guardrail
    pipeline.  ``trace`` holds the (prompt, completion) pairs that produced
    the response: sufficiency and main always, plus the code-removal exchange
    when it was triggered.
    """

    request_id: str
    main_text: str
    clarification_text: str | None
    code_was_removed: bool
    fallback_strip_applied: bool
    trace: tuple[tuple[str, str], ...]
    template_version: str

    def __post_init__(self):
        if not 2 <= len(self.trace) <= 3:
            raise ValueError(f"trace must have 2 or 3 entries, got {len(self.trace)}")


@dataclass(frozen=True)
class ClassContext:
    """Instructor configuration applied to every query in a class."""

    class_id: str
    name: str
    avoid_set: tuple[str, ...] = ()
    # (model name, temperature, max response tokens) for the chat role
    model: str = "gpt-3.5-turbo"
    temperature: float = 0.25
    max_tokens: int = 1000

    def __post_init__(self):
        cleaned = tuple(t.strip() for t in self.avoid_set)
        if any(not t for t in cleaned):
            raise ValueError("avoid_set entries must be non-empty after trimming")
        object.__setattr__(self, "avoid_set", cleaned)
        if not 0 <= self.temperature <= 2:
            raise ValueError(f"temperature {self.temperature} outside [0, 2]")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")


def format_timestamp(ts: datetime) -> str:
    """UTC instant at second precision, e.g. ``2023-04-01T12:00:00Z``."""
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_timestamp(value: str | datetime) -> datetime:
    if isinstance(value, datetime):
        if value.tzinfo is None:
            raise InvalidTimestampError(f"naive datetime not accepted: {value!r}")
        return value.astimezone(timezone.utc).replace(microsecond=0)
    try:
        parsed = datetime.strptime(value, "%Y-%m-%dT%H:%M:%SZ")
    except (TypeError, ValueError):
        try:
            parsed = datetime.fromisoformat(value)
        except (TypeError, ValueError):
            raise InvalidTimestampError(f"not a valid UTC instant: {value!r}") from None
        if parsed.tzinfo is None:
            raise InvalidTimestampError(f"timestamp lacks a timezone: {value!r}")
        return parsed.astimezone(timezone.utc).replace(microsecond=0)
    return parsed.replace(tzinfo=timezone.utc)


def _normalize(text: str) -> str:
    # Verbatim storage apart from trailing-newline normalization.
    return text.rstrip("\r\n")


def validate_request(
    user_id: str,
    language: str = "",
    code: str = "",
    error: str = "",
    issue: str = "",
    timestamp: str | datetime | None = None,
    max_field_bytes: int = DEFAULT_MAX_FIELD_BYTES,
    id_source: Callable[[], str] = lambda: uuid.uuid4().hex,
    clock: Callable[[], datetime] = lambda: datetime.now(timezone.utc),
) -> HelpRequest:
    """Validate a raw submission into a HelpRequest.

    Emptiness is never a reason to reject: queries with nothing in any
    content field are valid submissions.  Rejects only malformed timestamps
    and fields above ``max_field_bytes``.  When ``timestamp`` is None the
    clock supplies the receipt time (UTC, second precision).
    """
    fields = {"language": language, "code": code, "error": error, "issue": issue}
    for name, value in fields.items():
        size = len(value.encode("utf-8"))
        if size > max_field_bytes:
            raise OversizedFieldError(name, size, max_field_bytes)
    if timestamp is None:
        ts = clock().astimezone(timezone.utc).replace(microsecond=0)
    else:
        ts = parse_timestamp(timestamp)
    return HelpRequest(
        id=id_source(),
        user_id=user_id,
        timestamp=ts,
        language=_normalize(language),
        code=_normalize(code),
        error=_normalize(error),
        issue=_normalize(issue),
    )
