"""HTTP facade over pipeline snapshots.

Reads answer from one immutable snapshot captured at the top of each
request; retrain builds a whole new snapshot and swaps the reference
atomically, so concurrent readers never observe a mixed version. Feedback
appends to a durable log and only takes effect at the next retrain. Every
response carries an X-Snapshot-Version header naming the version it was
served from.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass

from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import wire
from .analytics import GRANULARITIES, TopicNotFoundError
from .config import AppConfig
from .corpus import CorpusStore, IngestError
from .feedback import (
    FeedbackLog,
    FeedbackValidationError,
    UnknownPostError,
    validate_submission,
)
from .pipeline import PipelineSnapshot, Resources, rebuild_snapshot
from .recommend import PostNotFoundError, QueryContractError, Relaxation, UnannotatedSourceError

logger = logging.getLogger(__name__)


class ServiceStartupError(RuntimeError):
    """The service refused to start (no usable corpus/snapshot)."""


@dataclass
class ServiceState:
    config: AppConfig
    store: CorpusStore
    resources: Resources
    snapshot: PipelineSnapshot
    feedback: FeedbackLog
    retrain_lock: threading.Lock

    def current(self) -> PipelineSnapshot:
        return self.snapshot  # atomic reference read


def create_state(config: AppConfig) -> ServiceState:
    """Load the store and build the initial snapshot, or refuse to start."""
    store_file = config.store_file
    if not store_file.exists():
        raise ServiceStartupError(
            f"no corpus store at {store_file}; run `concierge ingest` and "
            f"`concierge annotate` first"
        )
    try:
        store = CorpusStore.load(store_file)
    except IngestError as exc:
        raise ServiceStartupError(f"cannot load corpus store: {exc}") from exc
    if len(store) == 0:
        raise ServiceStartupError(f"corpus store at {store_file} is empty")

    resources = Resources.load(config)
    feedback = FeedbackLog(config.feedback_file)
    snapshot = rebuild_snapshot(
        store, resources, config, prior_version=0, feedback=feedback.read_all()
    )
    return ServiceState(
        config=config,
        store=store,
        resources=resources,
        snapshot=snapshot,
        feedback=feedback,
        retrain_lock=threading.Lock(),
    )


def _error(status: int, code: str, message: str, detail: object = None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "detail": detail},
    )


def _respond(snapshot: PipelineSnapshot, payload: dict, status: int = 200) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content=payload,
        headers={"X-Snapshot-Version": str(snapshot.version)},
    )


def build_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="misinfo-triage concierge", docs_url=None, redoc_url=None)
    app.add_middleware(  # dashboard may be served from another origin
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["X-Snapshot-Version"],
    )

    @app.exception_handler(StarletteHTTPException)
    async def http_error(_request: Request, exc: StarletteHTTPException):
        code = {404: "not_found", 405: "method_not_allowed"}.get(exc.status_code, "http_error")
        return _error(exc.status_code, code, str(exc.detail))

    @app.exception_handler(RequestValidationError)
    async def validation_error(_request: Request, exc: RequestValidationError):
        return _error(422, "validation_error", "invalid request", exc.errors())

    @app.exception_handler(Exception)
    async def internal_error(_request: Request, exc: Exception):
        logger.exception("unhandled service error")
        return _error(500, "internal_error", "internal error", str(exc))

    @app.get("/health")
    def health():
        snap = state.current()
        return _respond(snap, wire.health_payload(snap))

    @app.get("/stats/topics")
    def stats_topics():
        snap = state.current()
        return _respond(snap, wire.stats_topics_payload(snap))

    @app.get("/stats/entities")
    def stats_entities(topic: str | None = None, n: int = 50):
        snap = state.current()
        if n < 1:
            return _error(422, "validation_error", "n must be >= 1")
        try:
            return _respond(snap, wire.stats_entities_payload(snap, topic, n))
        except TopicNotFoundError:
            return _error(404, "not_found", f"unknown topic: {topic}")

    @app.get("/stats/timeline")
    def stats_timeline(topic: str | None = None, granularity: str = "day"):
        snap = state.current()
        if granularity not in GRANULARITIES:
            return _error(
                422, "validation_error", f"granularity must be one of {GRANULARITIES}"
            )
        try:
            return _respond(snap, wire.stats_timeline_payload(snap, topic, granularity))
        except TopicNotFoundError:
            return _error(404, "not_found", f"unknown topic: {topic}")

    @app.get("/posts")
    def posts(
        topic: str | None = None,
        label: str | None = None,
        page: int = 1,
        page_size: int = 20,
    ):
        snap = state.current()
        try:
            payload = wire.posts_page_payload(snap, topic, label, page, page_size)
        except ValueError as exc:
            return _error(422, "validation_error", str(exc))
        return _respond(snap, payload)

    @app.get("/posts/{post_id}")
    def get_post(post_id: str):
        snap = state.current()
        ap = snap.corpus.get(post_id)
        if ap is None:
            return _error(404, "not_found", f"unknown post: {post_id}")
        return _respond(snap, wire.post_payload(ap))

    @app.get("/posts/{post_id}/recommendations")
    def post_recommendations(
        post_id: str,
        k: int | None = None,
        target: str = "non-misleading",
        relaxation: str = "sentiment-drop",
    ):
        snap = state.current()
        if k is None:
            k = state.config.default_k
        if k < 1:
            return _error(422, "validation_error", "k must be >= 1")
        try:
            Relaxation(relaxation)
        except ValueError:
            return _error(
                422, "validation_error",
                "relaxation must be strict, entity-drop, or sentiment-drop",
            )
        try:
            payload = wire.recommendations_payload(snap, post_id, k, target, relaxation)
        except PostNotFoundError:
            return _error(404, "not_found", f"unknown post: {post_id}")
        except QueryContractError as exc:
            return _error(409, "contract_error", str(exc))
        except UnannotatedSourceError as exc:
            return _error(409, "contract_error", str(exc))
        except ValueError as exc:
            return _error(422, "validation_error", str(exc))
        return _respond(snap, payload)

    @app.post("/feedback")
    def submit_feedback(body: dict = Body(...)):
        snap = state.current()
        post_id = body.get("post_id")
        field_name = body.get("field")
        proposed = body.get("proposed")
        prior = body.get("prior")
        session = body.get("session") or ""
        if not isinstance(post_id, str) or not isinstance(field_name, str):
            return _error(422, "validation_error", "post_id and field are required strings")
        try:
            validate_submission(
                post_id,
                field_name,
                proposed,
                prior,
                snap.corpus,
                snap.topic_lexicon.all_names(),
            )
        except UnknownPostError:
            return _error(404, "not_found", f"unknown post: {post_id}")
        except FeedbackValidationError as exc:
            return _error(422, "validation_error", str(exc))
        record = state.feedback.append(post_id, field_name, proposed, prior, session)
        return _respond(
            snap,
            {"id": record.id, "seq": record.seq, "submitted_at": record.submitted_at},
        )

    @app.post("/analyze")
    def analyze(body: dict = Body(...)):
        snap = state.current()
        text = body.get("text")
        if not isinstance(text, str) or not text.strip():
            return _error(422, "validation_error", "text is required")
        return _respond(snap, wire.analyze_payload(snap, text, state.config))

    @app.post("/admin/retrain")
    def retrain():
        with state.retrain_lock:
            old = state.current()
            try:
                new = rebuild_snapshot(
                    state.store,
                    state.resources,
                    state.config,
                    prior_version=old.version,
                    feedback=state.feedback.read_all(),
                )
            except Exception as exc:  # old snapshot stays live
                logger.exception("retrain failed; keeping snapshot v%d", old.version)
                return _error(500, "retrain_failed", "retrain failed", str(exc))
            state.store.replace_all(new.corpus)
            state.snapshot = new  # atomic swap
            try:
                state.store.save(state.config.store_file)
            except OSError as exc:
                logger.error("could not persist retrained store: %s", exc)
        return _respond(
            new,
            {
                "snapshot_version": new.version,
                "posts": len(new.corpus),
                "feedback_applied": new.feedback_applied,
            },
        )

    return app


def serve(config: AppConfig) -> None:
    """Run the service under uvicorn (blocking)."""
    import uvicorn

    state = create_state(config)
    app = build_app(state)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
