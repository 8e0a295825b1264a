"""HTTP/JSON service exposing the annotation workflow to the browser UI.

All responses are JSON; failures come back as ``{"error": code,
"detail": ...}`` with a 4xx status so the client can branch on the code.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .annotation import AnnotationStore
from .corpus import Tag
from .errors import (
    BlidError,
    DuplicateVote,
    NotInAdjudication,
    UnknownAnnotator,
    UnknownItem,
)

__all__ = ["create_app"]

_STATUS_FOR = {
    UnknownItem: 404,
    UnknownAnnotator: 404,
    DuplicateVote: 409,
    NotInAdjudication: 409,
}


class LabelBody(BaseModel):
    item_id: str
    annotator: str
    tag: str
    overwrite: bool = False


class AdjudicateBody(BaseModel):
    item_id: str
    tag: str
    adjudicator: str


def create_app(store: AnnotationStore, static_dir: str | Path | None = None) -> FastAPI:
    """Build the service app around an open store.

    ``static_dir`` optionally mounts a built browser UI at ``/``.
    """
    app = FastAPI(title="blid annotation service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(BlidError)
    async def blid_error_handler(_request: Request, exc: BlidError):
        status = 400
        for klass, code in _STATUS_FOR.items():
            if isinstance(exc, klass):
                status = code
                break
        return JSONResponse(
            status_code=status,
            content={"error": exc.code, "detail": str(exc)},
        )

    @app.get("/api/annotators")
    def annotators():
        return {"annotators": store.annotators}

    @app.get("/api/items/next")
    def items_next(annotator: str, limit: int = 10):
        items = store.next_batch(annotator, limit)
        return {
            "items": [
                {"item_id": it.item_id, "word": it.word, "batch": it.batch}
                for it in items
            ]
        }

    @app.post("/api/labels")
    def post_label(body: LabelBody):
        tag = Tag.parse(body.tag)
        status = store.record_label(
            body.item_id, body.annotator, tag, overwrite=body.overwrite
        )
        return {"item_id": body.item_id, "status": status}

    @app.get("/api/progress")
    def progress():
        return store.progress()

    @app.get("/api/disagreements")
    def disagreements():
        _gold, queue = store.merge()
        return {"items": queue}

    @app.post("/api/adjudicate")
    def post_adjudicate(body: AdjudicateBody):
        tag = Tag.parse(body.tag)
        decision = store.adjudicate(body.item_id, tag, body.adjudicator)
        return {
            "item_id": body.item_id,
            "status": "decided",
            "outcome": str(decision.outcome),
            "adjudicator": decision.adjudicator,
        }

    @app.get("/api/agreement")
    def agreement():
        report = store.agreement()
        return {
            "pairwise": [
                {"annotators": list(pair), "agreement": value}
                for pair, value in report.pairwise.items()
            ],
            "full_consensus": report.full_consensus,
            "no_consensus": report.no_consensus,
        }

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
