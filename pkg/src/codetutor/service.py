"""HTTP API binding the pipeline, persistence, and analytics.

JSON over HTTP under /api, bearer-token auth with static per-user tokens.
Students submit queries and read their own records; instructors read
everything, label queries, tune the class configuration, and pull the
analytics report.
"""

from __future__ import annotations

import json
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from fastapi import Depends, FastAPI, Header, HTTPException, Query, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .analytics import ReportOptions, build_report
from .analytics.content import VALID_CATEGORY_VALUES
from .analytics.stats import AnalyticsError
from .config import Principal, ServiceConfig
from .model import ClassContext, OversizedFieldError, validate_request
from .pipeline import MainCompletionFailed, Responder
from .storage import (
    LabelRecord,
    QueryLogRecord,
    QueryLogStore,
    import_exercises,
    import_performance,
)

CLASS_CONFIG_FILE = "class_config.json"
LABELS_FILE = "labels.jsonl"
PERFORMANCE_FILE = "performance.csv"
EXERCISES_DIR = "exercises"


class QueryBody(BaseModel):
    language: str = ""
    code: str = ""
    error: str = ""
    issue: str = ""


class LabelBody(BaseModel):
    query_id: str
    rater_id: str
    category: str


class BackendParamsBody(BaseModel):
    model: str
    temperature: float = 0.25
    max_tokens: int = 1000


class ClassConfigBody(BaseModel):
    avoid_set: list[str] = []
    backend_params: Optional[BackendParamsBody] = None


class ServiceState:
    """Mutable runtime state shared by the endpoints."""

    def __init__(
        self,
        store: QueryLogStore,
        responder: Responder,
        class_context: ClassContext,
        tokens: dict[str, Principal],
        data_dir: Path,
        clock=None,
    ):
        self.store = store
        self.responder = responder
        self.class_context = class_context
        self.tokens = tokens
        self.data_dir = Path(data_dir)
        # receipt timestamps are always server-assigned; the clock is
        # injectable so tests can script session gaps
        self.clock = clock or (lambda: datetime.now(timezone.utc))
        self._labels_lock = threading.Lock()
        self._labels: list[LabelRecord] = []
        self._load_labels()
        self._load_class_config()

    # --- labels with audit trail ------------------------------------------

    @property
    def labels_path(self) -> Path:
        return self.data_dir / LABELS_FILE

    def _load_labels(self) -> None:
        if not self.labels_path.exists():
            return
        for line in self.labels_path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            data = json.loads(line)
            self._labels.append(
                LabelRecord(data["query_id"], data["rater_id"], data["category"])
            )

    def upsert_label(self, label: LabelRecord) -> str | None:
        """Append a label; returns the category it replaced, if any.

        The previous line stays in the file as the audit trail; the
        effective label for a (query, rater) pair is the last one written.
        """
        with self._labels_lock:
            previous = None
            for existing in self._labels:
                if (
                    existing.query_id == label.query_id
                    and existing.rater_id == label.rater_id
                ):
                    previous = existing.category
            entry = {
                "query_id": label.query_id,
                "rater_id": label.rater_id,
                "category": label.category,
            }
            if previous is not None:
                entry["replaces"] = previous
            self.data_dir.mkdir(parents=True, exist_ok=True)
            with open(self.labels_path, "a", encoding="utf-8", newline="") as fh:
                fh.write(json.dumps(entry, ensure_ascii=False) + "\n")
            self._labels.append(label)
            return previous

    def effective_labels(self) -> list[LabelRecord]:
        with self._labels_lock:
            effective: dict[tuple[str, str], LabelRecord] = {}
            for label in self._labels:
                effective[(label.query_id, label.rater_id)] = label
            return list(effective.values())

    # --- class configuration ----------------------------------------------

    @property
    def class_config_path(self) -> Path:
        return self.data_dir / CLASS_CONFIG_FILE

    def _load_class_config(self) -> None:
        if not self.class_config_path.exists():
            return
        data = json.loads(self.class_config_path.read_text(encoding="utf-8"))
        self.class_context = ClassContext(
            class_id=self.class_context.class_id,
            name=self.class_context.name,
            avoid_set=tuple(data.get("avoid_set", ())),
            model=data.get("model", self.class_context.model),
            temperature=data.get("temperature", self.class_context.temperature),
            max_tokens=data.get("max_tokens", self.class_context.max_tokens),
        )

    def update_class_config(self, ctx: ClassContext) -> None:
        self.class_context = ctx
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.class_config_path.write_text(
            json.dumps(
                {
                    "avoid_set": list(ctx.avoid_set),
                    "model": ctx.model,
                    "temperature": ctx.temperature,
                    "max_tokens": ctx.max_tokens,
                },
                indent=2,
            )
            + "\n",
            encoding="utf-8",
        )


def _error(status: int, code: str, message: str) -> HTTPException:
    return HTTPException(status_code=status, detail={"code": code, "message": message})


def create_app(state: ServiceState, frontend_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="codetutor", version="0.1.0")

    @app.exception_handler(HTTPException)
    async def _http_error(request: Request, exc: HTTPException):
        detail = exc.detail
        if not isinstance(detail, dict):
            detail = {"code": "error", "message": str(detail)}
        return JSONResponse(status_code=exc.status_code, content=detail)

    def principal(authorization: str = Header(default="")) -> Principal:
        if not authorization.startswith("Bearer "):
            raise _error(401, "unauthorized", "missing bearer token")
        token = authorization.removeprefix("Bearer ").strip()
        found = state.tokens.get(token)
        if found is None:
            raise _error(401, "unauthorized", "unknown token")
        return found

    def instructor(p: Principal = Depends(principal)) -> Principal:
        if p.role != "instructor":
            raise _error(403, "forbidden", "instructor role required")
        return p

    @app.get("/api/health")
    def health():
        return {"status": "ok", "queries": len(state.store)}

    @app.post("/api/queries")
    def submit_query(body: QueryBody, p: Principal = Depends(principal)):
        try:
            req = validate_request(
                user_id=p.user_id,
                language=body.language,
                code=body.code,
                error=body.error,
                issue=body.issue,
                clock=state.clock,
            )
        except OversizedFieldError as exc:
            raise _error(413, "oversized_field", str(exc))
        try:
            resp = state.responder.respond(req, state.class_context)
        except MainCompletionFailed as exc:
            state.store.append(
                QueryLogRecord.from_parts(req, None, backend_failed=True)
            )
            raise _error(502, "backend_failure", str(exc))
        state.store.append(QueryLogRecord.from_parts(req, resp))
        return {
            "query_id": req.id,
            "main_text": resp.main_text,
            "clarification_text": resp.clarification_text,
        }

    @app.get("/api/queries")
    def list_queries(
        user: str | None = Query(default=None),
        offset: int = Query(default=0, ge=0),
        limit: int = Query(default=50, ge=1, le=500),
        p: Principal = Depends(principal),
    ):
        target = user if user is not None else p.user_id
        if p.role != "instructor" and target != p.user_id:
            raise _error(403, "forbidden", "students may only read their own queries")
        records = [r for r in state.store.load_all() if r.user_id == target]
        page = records[offset : offset + limit]
        return {
            "total": len(records),
            "offset": offset,
            "limit": limit,
            "records": [json.loads(r.to_json_line()) for r in page],
        }

    @app.post("/api/labels")
    def post_label(body: LabelBody, p: Principal = Depends(instructor)):
        if body.category not in VALID_CATEGORY_VALUES:
            raise _error(
                400,
                "unknown_category",
                f"unknown category {body.category!r}; "
                f"valid: {', '.join(VALID_CATEGORY_VALUES)}",
            )
        known_ids = {r.id for r in state.store.load_all()}
        if body.query_id not in known_ids:
            raise _error(404, "unknown_query", f"no query {body.query_id!r}")
        replaced = state.upsert_label(
            LabelRecord(body.query_id, body.rater_id, body.category)
        )
        return {"status": "stored", "replaced": replaced}

    @app.get("/api/analytics/report")
    def analytics_report(
        dedup_k: float = Query(default=0.25, ge=0, le=3),
        gap_seconds: float = Query(default=3600, gt=0),
        exclude_user: list[str] = Query(default=[]),
        auto_exclude_outliers: bool = Query(default=False),
        p: Principal = Depends(instructor),
    ):
        queries = [r.to_help_request() for r in state.store.load_all()]
        labels = state.effective_labels() or None
        exercises_path = state.data_dir / EXERCISES_DIR
        exercises = (
            import_exercises(exercises_path)[0] if exercises_path.is_dir() else None
        )
        performance_path = state.data_dir / PERFORMANCE_FILE
        performance = (
            import_performance(performance_path)
            if performance_path.exists()
            else None
        )
        options = ReportOptions(
            dedup_k=dedup_k,
            gap_seconds=gap_seconds,
            exclusions=tuple(exclude_user),
            auto_exclude_outliers=auto_exclude_outliers,
        )
        try:
            return build_report(
                queries,
                labels=labels,
                exercises=exercises,
                performance=performance,
                options=options,
            )
        except AnalyticsError as exc:
            raise _error(409, "analytics_error", str(exc))

    @app.post("/api/classes/{class_id}/config")
    def set_class_config(
        class_id: str, body: ClassConfigBody, p: Principal = Depends(instructor)
    ):
        current = state.class_context
        if class_id != current.class_id:
            raise _error(404, "unknown_class", f"no class {class_id!r}")
        params = body.backend_params
        try:
            ctx = ClassContext(
                class_id=current.class_id,
                name=current.name,
                avoid_set=tuple(body.avoid_set),
                model=params.model if params else current.model,
                temperature=params.temperature if params else current.temperature,
                max_tokens=params.max_tokens if params else current.max_tokens,
            )
        except ValueError as exc:
            raise _error(400, "invalid_config", str(exc))
        state.update_class_config(ctx)
        return {"status": "stored"}

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount(
            "/", StaticFiles(directory=str(frontend_dir), html=True), name="ui"
        )

    return app


def build_state(config: ServiceConfig, tokens: dict[str, Principal]) -> ServiceState:
    config.data_dir.mkdir(parents=True, exist_ok=True)
    store = QueryLogStore(config.data_dir / "queries.jsonl")
    chat_backend, rewrite_backend = config.build_backends()
    responder = Responder(
        chat_backend=chat_backend,
        rewrite_backend=rewrite_backend,
        rewrite_params=config.rewrite.params,
    )
    return ServiceState(
        store=store,
        responder=responder,
        class_context=config.class_context(),
        tokens=tokens,
        data_dir=config.data_dir,
    )
