from datetime import datetime, timezone

import pytest

from codetutor.model import (
    ClassContext,
    HelpRequest,
    InvalidTimestampError,
    OversizedFieldError,
    format_timestamp,
    parse_timestamp,
    validate_request,
)


def test_empty_submission_accepted():
    req = validate_request(user_id="u1", language="Python")
    assert req.code == "" and req.error == "" and req.issue == ""
    assert req.language == "Python"


def test_no_minimum_length():
    req = validate_request(user_id="u1", issue="why error")
    assert req.issue == "why error"
    assert len(req.issue) == 9


def test_fields_stored_verbatim():
    code = "  x = 1\n\ty = 2  "
    req = validate_request(user_id="u1", code=code, issue="  padded  ")
    assert req.code == "  x = 1\n\ty = 2  "
    assert req.issue == "  padded  "


def test_trailing_newlines_normalized():
    req = validate_request(user_id="u1", code="x = 1\n\n", error="oops\r\n")
    assert req.code == "x = 1"
    assert req.error == "oops"


def test_oversized_field_rejected():
    big = "a" * (64 * 1024 + 1)
    with pytest.raises(OversizedFieldError) as exc:
        validate_request(user_id="u1", code=big)
    assert exc.value.field_name == "code"


def test_field_at_limit_accepted():
    at_limit = "a" * (64 * 1024)
    req = validate_request(user_id="u1", code=at_limit)
    assert req.code == at_limit


def test_bad_timestamp_rejected():
    with pytest.raises(InvalidTimestampError):
        validate_request(user_id="u1", timestamp="not-a-time")
    with pytest.raises(InvalidTimestampError):
        validate_request(user_id="u1", timestamp=datetime(2023, 1, 1))  # naive


def test_deterministic_with_fixed_sources():
    fixed_now = datetime(2023, 4, 1, 12, 0, 0, tzinfo=timezone.utc)
    kwargs = dict(
        user_id="u1",
        issue="help",
        id_source=lambda: "fixed-id",
        clock=lambda: fixed_now,
    )
    assert validate_request(**kwargs) == validate_request(**kwargs)


def test_round_trip_serialization():
    req = validate_request(
        user_id="u1",
        language="Python",
        code="print('héllo')",
        error="TypeError",
        issue="why",
        timestamp="2023-04-01T12:00:00Z",
    )
    again = HelpRequest.from_dict(req.to_dict())
    assert again == req


def test_timestamp_second_precision():
    ts = parse_timestamp("2023-04-01T12:00:05+02:00")
    assert format_timestamp(ts) == "2023-04-01T10:00:05Z"


def test_class_context_trims_avoid_set():
    ctx = ClassContext(class_id="c", name="n", avoid_set=(" recursion ",))
    assert ctx.avoid_set == ("recursion",)
    with pytest.raises(ValueError):
        ClassContext(class_id="c", name="n", avoid_set=("  ",))


def test_class_context_validates_backend_params():
    with pytest.raises(ValueError):
        ClassContext(class_id="c", name="n", temperature=2.5)
    with pytest.raises(ValueError):
        ClassContext(class_id="c", name="n", max_tokens=0)
