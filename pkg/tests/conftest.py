from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest

from codetutor.model import HelpRequest
from codetutor.seeding import generate_corpus

EPOCH = datetime(2023, 2, 6, 9, 0, 0, tzinfo=timezone.utc)


def make_request(
    user_id: str = "u1",
    at: float = 0,
    language: str = "Python",
    code: str = "",
    error: str = "",
    issue: str = "",
    req_id: str | None = None,
) -> HelpRequest:
    """HelpRequest with a timestamp ``at`` seconds after a fixed epoch."""
    return HelpRequest(
        id=req_id or f"{user_id}@{at}",
        user_id=user_id,
        timestamp=EPOCH + timedelta(seconds=at),
        language=language,
        code=code,
        error=error,
        issue=issue,
    )


@pytest.fixture(scope="session")
def table1_corpus(tmp_path_factory):
    """One shared table1-profile corpus; seeding it is the expensive step.

    Yields (directory, manifest, seconds the seed run took) so runtime
    budgets covering seed+analyze can be asserted.
    """
    import time

    out = tmp_path_factory.mktemp("table1")
    start = time.monotonic()
    manifest = generate_corpus(out)
    elapsed = time.monotonic() - start
    return out, manifest, elapsed
