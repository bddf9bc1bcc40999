import hashlib
import json
from datetime import datetime, timedelta, timezone

import pytest
from fastapi.testclient import TestClient

from codetutor.backends import BackendRejected, CompletionParams, MockBackend
from codetutor.config import Principal
from codetutor.model import ClassContext
from codetutor.pipeline import Responder, detect_code_blocks
from codetutor.service import ServiceState, create_app
from codetutor.storage import (
    QueryLogStore,
    export_log,
    import_log,
)

STUDENT_1 = "tok-student-1"
STUDENT_2 = "tok-student-2"
INSTRUCTOR = "tok-instructor"

RULES = [
    ("assess the following", "The student asks for help. OK."),
    ("rewrite the following", "Here is the idea described in plain words."),
    (
        "How would you respond",
        "Try this approach:\n```python\nanswer = 42\n```\nGood luck!",
    ),
]


class FlakyMainBackend:
    """Fails the main completion when the issue carries a marker."""

    def __init__(self, inner):
        self.inner = inner

    def complete(self, prompt, params, prompt_id=None):
        if "FAILMAIN" in prompt and "How would you respond" in prompt:
            raise BackendRejected("scripted failure", prompt_id or "?")
        return self.inner.complete(prompt, params, prompt_id)


class TickingClock:
    """Advances a scripted number of seconds on every submission."""

    def __init__(self, increments):
        self.increments = list(increments)
        self.now = datetime(2023, 3, 6, 9, 0, 0, tzinfo=timezone.utc)
        self.calls = 0

    def __call__(self):
        step = (
            self.increments[self.calls]
            if self.calls < len(self.increments)
            else 120
        )
        self.now += timedelta(seconds=step)
        self.calls += 1
        return self.now


@pytest.fixture
def state(tmp_path):
    mock = MockBackend(RULES, default="Generic advice with `hints` only.")
    chat = FlakyMainBackend(mock)
    responder = Responder(
        chat_backend=chat,
        rewrite_backend=mock,
        rewrite_params=CompletionParams(model="rewrite-model"),
    )
    return ServiceState(
        store=QueryLogStore(tmp_path / "queries.jsonl"),
        responder=responder,
        class_context=ClassContext(class_id="cs100", name="Intro"),
        tokens={
            STUDENT_1: Principal("alice", "student"),
            STUDENT_2: Principal("bob", "student"),
            INSTRUCTOR: Principal("prof", "instructor"),
        },
        data_dir=tmp_path,
        clock=TickingClock([0, 600, 4000, 300, 9000, 200, 100, 8000, 5000]),
    )


@pytest.fixture
def client(state):
    return TestClient(create_app(state), raise_server_exceptions=False)


def _auth(token):
    return {"Authorization": f"Bearer {token}"}


def _submit(client, token=STUDENT_1, **fields):
    body = {"language": "Python", "code": "", "error": "", "issue": ""}
    body.update(fields)
    return client.post("/api/queries", json=body, headers=_auth(token))


class TestAuth:
    def test_missing_token_401(self, client):
        resp = client.post("/api/queries", json={})
        assert resp.status_code == 401
        assert resp.json()["code"] == "unauthorized"

    def test_unknown_token_401(self, client):
        resp = client.post("/api/queries", json={}, headers=_auth("nope"))
        assert resp.status_code == 401

    def test_health_is_open(self, client):
        assert client.get("/api/health").json()["status"] == "ok"


class TestSubmitQuery:
    def test_submit_returns_code_free_main_text(self, client):
        resp = _submit(
            client,
            code='while x == "0":\nprint("no")',
            error="IndentationError: unindent does not match",
            issue="why am i getting this error",
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["main_text"]
        assert detect_code_blocks(body["main_text"]) == []
        assert body["query_id"]

    def test_empty_fields_accepted(self, client):
        resp = _submit(client)
        assert resp.status_code == 200

    def test_oversized_field_413(self, client):
        resp = _submit(client, code="x" * (64 * 1024 + 1))
        assert resp.status_code == 413
        assert resp.json()["code"] == "oversized_field"

    def test_each_200_persists_exactly_one_record(self, client, state):
        before = len(state.store)
        assert _submit(client, issue="first").status_code == 200
        assert _submit(client, issue="second").status_code == 200
        assert len(state.store) == before + 2

    def test_backend_failure_502_still_persisted(self, client, state):
        before = len(state.store)
        resp = _submit(client, issue="FAILMAIN please")
        assert resp.status_code == 502
        assert resp.json()["code"] == "backend_failure"
        records = state.store.load_all()
        assert len(records) == before + 1
        assert records[-1].backend_failed
        assert records[-1].issue == "FAILMAIN please"
        assert records[-1].main_text is None


class TestListQueries:
    def test_student_sees_own(self, client):
        for i in range(3):
            _submit(client, issue=f"alice question {i}")
        _submit(client, token=STUDENT_2, issue="bob question")
        resp = client.get("/api/queries", headers=_auth(STUDENT_1))
        assert resp.status_code == 200
        body = resp.json()
        assert body["total"] == 3
        assert all(r["user_id"] == "alice" for r in body["records"])

    def test_student_cross_user_403(self, client):
        resp = client.get("/api/queries?user=bob", headers=_auth(STUDENT_1))
        assert resp.status_code == 403

    def test_instructor_reads_any_user(self, client):
        _submit(client, token=STUDENT_2, issue="bob question")
        resp = client.get("/api/queries?user=bob", headers=_auth(INSTRUCTOR))
        assert resp.status_code == 200
        assert resp.json()["total"] == 1

    def test_paging(self, client):
        for i in range(5):
            _submit(client, issue=f"numbered question {i} entirely distinct")
        resp = client.get(
            "/api/queries?offset=2&limit=2", headers=_auth(STUDENT_1)
        )
        body = resp.json()
        assert body["total"] == 5
        assert len(body["records"]) == 2


class TestLabels:
    def _one_query(self, client):
        return _submit(client, issue="label me").json()["query_id"]

    def test_label_roundtrip(self, client, state):
        qid = self._one_query(client)
        resp = client.post(
            "/api/labels",
            json={"query_id": qid, "rater_id": "r1", "category": "implementation"},
            headers=_auth(INSTRUCTOR),
        )
        assert resp.status_code == 200
        assert state.effective_labels()[0].category == "implementation"

    def test_student_cannot_label(self, client):
        qid = self._one_query(client)
        resp = client.post(
            "/api/labels",
            json={"query_id": qid, "rater_id": "r1", "category": "nothing"},
            headers=_auth(STUDENT_1),
        )
        assert resp.status_code == 403

    def test_unknown_category_400_lists_valid(self, client):
        qid = self._one_query(client)
        resp = client.post(
            "/api/labels",
            json={"query_id": qid, "rater_id": "r1", "category": "Fixing"},
            headers=_auth(INSTRUCTOR),
        )
        assert resp.status_code == 400
        assert "implementation" in resp.json()["message"]

    def test_unknown_query_404(self, client):
        resp = client.post(
            "/api/labels",
            json={"query_id": "ghost", "rater_id": "r1", "category": "nothing"},
            headers=_auth(INSTRUCTOR),
        )
        assert resp.status_code == 404

    def test_relabel_keeps_audit_trail(self, client, state):
        qid = self._one_query(client)
        for category in ("nothing", "understanding"):
            client.post(
                "/api/labels",
                json={"query_id": qid, "rater_id": "r1", "category": category},
                headers=_auth(INSTRUCTOR),
            )
        effective = state.effective_labels()
        assert len(effective) == 1
        assert effective[0].category == "understanding"
        lines = state.labels_path.read_text().splitlines()
        assert len(lines) == 2  # the replaced label stays on disk
        assert json.loads(lines[1])["replaces"] == "nothing"


class TestClassConfig:
    def test_avoid_set_plumbs_into_next_query(self, client, state):
        resp = client.post(
            "/api/classes/cs100/config",
            json={"avoid_set": ["recursion"]},
            headers=_auth(INSTRUCTOR),
        )
        assert resp.status_code == 200
        _submit(client, issue="how do i loop")
        record = state.store.load_all()[-1]
        main_prompt = record.trace[1][0]
        assert "Do not discuss or use recursion in your response." in main_prompt

    def test_empty_avoid_set_no_sentence(self, client, state):
        client.post(
            "/api/classes/cs100/config",
            json={"avoid_set": []},
            headers=_auth(INSTRUCTOR),
        )
        _submit(client, issue="plain")
        record = state.store.load_all()[-1]
        assert "Do not discuss or use" not in record.trace[1][0]

    def test_bad_temperature_400(self, client):
        resp = client.post(
            "/api/classes/cs100/config",
            json={
                "avoid_set": [],
                "backend_params": {"model": "m", "temperature": 5.0},
            },
            headers=_auth(INSTRUCTOR),
        )
        assert resp.status_code == 400

    def test_unknown_class_404(self, client):
        resp = client.post(
            "/api/classes/other/config",
            json={"avoid_set": []},
            headers=_auth(INSTRUCTOR),
        )
        assert resp.status_code == 404

    def test_student_cannot_configure(self, client):
        resp = client.post(
            "/api/classes/cs100/config",
            json={"avoid_set": []},
            headers=_auth(STUDENT_1),
        )
        assert resp.status_code == 403


class TestAnalyticsEndpoint:
    def _populate(self, client):
        # submission order matches the state fixture's scripted clock:
        # alice gets two sessions, bob one, prof two singletons
        for i in range(4):
            _submit(client, issue=f"alice asks something number {i} here")
        for i in range(3):
            _submit(client, token=STUDENT_2, issue=f"bob wonders about part {i} now")
        for i in range(2):
            _submit(client, token=INSTRUCTOR, issue=f"prof tries the tool {i}")

    def test_student_forbidden(self, client):
        resp = client.get("/api/analytics/report", headers=_auth(STUDENT_1))
        assert resp.status_code == 403

    def test_conflict_when_composite_impossible(self, client):
        # two users only: composite prerequisites unmet -> 409
        _submit(client, issue="alice alone")
        _submit(client, token=STUDENT_2, issue="bob alone")
        resp = client.get("/api/analytics/report", headers=_auth(INSTRUCTOR))
        assert resp.status_code == 409
        assert resp.json()["code"] == "analytics_error"

    def test_report_without_performance_has_no_correlation(self, client, state):
        self._populate(client)
        resp = client.get("/api/analytics/report", headers=_auth(INSTRUCTOR))
        assert resp.status_code == 200
        report = resp.json()
        assert "correlation" not in report
        assert "categories" not in report  # no labels posted yet
        assert report["queries"]["total"] == len(state.store)

    def test_report_with_labels_and_performance(self, client, state):
        self._populate(client)
        qid = state.store.load_all()[0].id
        client.post(
            "/api/labels",
            json={"query_id": qid, "rater_id": "r1", "category": "implementation"},
            headers=_auth(INSTRUCTOR),
        )
        (state.data_dir / "performance.csv").write_text(
            "user_id,activity_id,points\n"
            "alice,quiz,10\nbob,quiz,13\nprof,quiz,20\n"
        )
        resp = client.get("/api/analytics/report", headers=_auth(INSTRUCTOR))
        assert resp.status_code == 200
        report = resp.json()
        assert "correlation" in report
        assert report["categories"]["rows"][1]["count"] == 1
        assert report["correlation"]["n"] == 3

    def test_dedup_k_parameter(self, client):
        for _ in range(2):
            _submit(client, issue="the exact same question")
        resp = client.get(
            "/api/analytics/report?dedup_k=0", headers=_auth(INSTRUCTOR)
        )
        # only the exact resubmission counts at k=0
        assert resp.status_code in (200, 409)
        if resp.status_code == 200:
            assert resp.json()["dedup"]["duplicates_removed"] == 1


def test_export_import_export_byte_identity(client, state, tmp_path):
    for i in range(3):
        _submit(client, issue=f"question number {i} about topic {i}")
    _submit(client, issue="FAILMAIN marker")  # failure record included
    export1 = tmp_path / "export1.jsonl"
    export_log(state.store, export1)
    second = QueryLogStore(tmp_path / "copy.jsonl")
    import_log(export1, second)
    export2 = tmp_path / "export2.jsonl"
    export_log(second, export2)
    assert (
        hashlib.sha256(export1.read_bytes()).hexdigest()
        == hashlib.sha256(export2.read_bytes()).hexdigest()
    )


def test_no_student_token_reads_another_users_records(client):
    _submit(client, token=STUDENT_1, issue="alice private question")
    _submit(client, token=STUDENT_2, issue="bob private question")
    probes = [
        "/api/queries?user=bob",
        "/api/queries?user=bob&offset=0&limit=10",
        "/api/queries?user=prof",
    ]
    for probe in probes:
        resp = client.get(probe, headers=_auth(STUDENT_1))
        assert resp.status_code == 403, probe
    own = client.get("/api/queries", headers=_auth(STUDENT_1)).json()
    assert all(r["user_id"] == "alice" for r in own["records"])
