"""HTTP service: documents, prompts, runs, reports and a change feed.

Status codes: 400 malformed/schema, 404 unknown id, 409 revision conflict or
duplicate create, 422 configuration violations, 502 backend failure.
"""

from __future__ import annotations

import asyncio
import json
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response, StreamingResponse
from fastapi.staticfiles import StaticFiles
from starlette.concurrency import run_in_threadpool

from ..diagnostics import report_to_json
from ..document import document_from_json, document_to_json
from ..engine import run_result_to_json, rendered_to_json
from ..errors import (
    DocumentError,
    NotATextElementError,
    StaleBindingError,
    UnboundTriggerError,
    UnknownElementError,
)
from ..prompts import ValidationReport, prompt_from_json, prompt_to_json, validate_prompt
from ..template import render
from .schemas import (
    CreateDocumentResponse,
    DocumentResponse,
    ElementPatched,
    PromptAck,
    RunsResponse,
    ValidationResponse,
)
from .state import SessionStore, StoredSession


def _violations_json(report: ValidationReport) -> dict:
    return {
        "prompt_id": report.prompt_id,
        "ok": report.ok,
        "violations": [
            {"rule": v.rule, "subject": v.subject, "detail": v.detail}
            for v in report.violations
        ],
        "warnings": [
            {"rule": v.rule, "subject": v.subject, "detail": v.detail}
            for v in report.warnings
        ],
    }


def _sse(message: dict) -> str:
    return f"event: {message['event']}\ndata: {json.dumps(message, sort_keys=True)}\n\n"


def create_app(store: SessionStore, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="promptloom", version="0.1.0")
    app.state.store = store
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(RequestValidationError)
    async def malformed_request(_, exc):
        # schema problems are 400 here; 422 is reserved for mapping violations
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    def _session_or_404(doc_id: str) -> StoredSession:
        stored = store.get(doc_id)
        if stored is None:
            raise HTTPException(404, f"unknown document {doc_id!r}")
        return stored

    def _check_revision(stored: StoredSession, expected_revision: int | None) -> None:
        if expected_revision is not None and stored.session.doc.revision != expected_revision:
            raise HTTPException(
                409,
                f"revision conflict: expected {expected_revision}, "
                f"document is at {stored.session.doc.revision}",
            )

    # -- documents ------------------------------------------------------------

    @app.post("/documents", response_model=CreateDocumentResponse)
    async def create_document(body: dict = Body(...)):
        try:
            doc = document_from_json(body)
        except DocumentError as exc:
            raise HTTPException(400, str(exc))
        if store.get(doc.doc_id) is not None:
            raise HTTPException(409, f"document {doc.doc_id!r} already exists")
        store.create(doc)
        return {"doc_id": doc.doc_id}

    @app.get("/documents/{doc_id}", response_model=DocumentResponse)
    async def get_document(doc_id: str):
        stored = _session_or_404(doc_id)
        session = stored.session
        return {
            "document": document_to_json(session.doc),
            "revision": session.doc.revision,
            "prompts": [prompt_to_json(p) for p in session.prompts],
        }

    @app.put("/documents/{doc_id}", response_model=DocumentResponse)
    async def replace_document(
        doc_id: str, body: dict = Body(...), expected_revision: int | None = None
    ):
        stored = _session_or_404(doc_id)
        async with stored.lock:
            _check_revision(stored, expected_revision)
            try:
                doc = document_from_json(body)
            except DocumentError as exc:
                raise HTTPException(400, str(exc))
            if doc.doc_id != doc_id:
                raise HTTPException(400, "doc_id in body does not match the path")
            doc.revision = stored.session.doc.revision + 1
            stored.session.doc = doc
            store.persist(stored)
            store.publish(stored, "element_changed", {"element_id": None})
            return {
                "document": document_to_json(doc),
                "revision": doc.revision,
                "prompts": [prompt_to_json(p) for p in stored.session.prompts],
                "stale_prompts": stored.session.stale_prompts(),
            }

    @app.patch("/documents/{doc_id}/elements/{element_id}", response_model=ElementPatched)
    async def patch_element_text(
        doc_id: str,
        element_id: str,
        body: dict = Body(...),
        expected_revision: int | None = None,
    ):
        stored = _session_or_404(doc_id)
        text = body.get("text")
        if not isinstance(text, str):
            raise HTTPException(400, "body must contain a string 'text' field")
        async with stored.lock:
            _check_revision(stored, expected_revision)
            try:
                stored.session.set_text(element_id, text)
            except NotATextElementError as exc:
                raise HTTPException(400, str(exc))
            except UnknownElementError as exc:
                raise HTTPException(404, str(exc))
            store.persist(stored)
            store.publish(stored, "element_changed", {"element_id": element_id})
            return {
                "element_id": element_id,
                "text": text,
                "revision": stored.session.doc.revision,
            }

    # -- prompts --------------------------------------------------------------

    def _parse_prompt(body: dict):
        try:
            return prompt_from_json(body)
        except DocumentError as exc:
            raise HTTPException(400, str(exc))

    async def _store_prompt(stored: StoredSession, prompt) -> dict:
        report = stored.session.upsert_prompt(prompt)
        if not report.ok:
            raise HTTPException(422, detail=_violations_json(report))
        stored.session.bump_revision()
        store.persist(stored)
        store.publish(stored, "prompt_changed", {"prompt_id": prompt.prompt_id})
        return {
            "prompt_id": prompt.prompt_id,
            "revision": stored.session.doc.revision,
            "warnings": _violations_json(report)["warnings"],
        }

    @app.post("/documents/{doc_id}/prompts", response_model=PromptAck)
    async def create_prompt(
        doc_id: str, body: dict = Body(...), expected_revision: int | None = None
    ):
        stored = _session_or_404(doc_id)
        prompt = _parse_prompt(body)
        async with stored.lock:
            _check_revision(stored, expected_revision)
            if stored.session.prompt_by_id(prompt.prompt_id) is not None:
                raise HTTPException(409, f"prompt {prompt.prompt_id!r} already exists")
            return await _store_prompt(stored, prompt)

    @app.put("/documents/{doc_id}/prompts/{prompt_id}", response_model=PromptAck)
    async def update_prompt(
        doc_id: str,
        prompt_id: str,
        body: dict = Body(...),
        expected_revision: int | None = None,
    ):
        stored = _session_or_404(doc_id)
        prompt = _parse_prompt(body)
        if prompt.prompt_id != prompt_id:
            raise HTTPException(400, "prompt_id in body does not match the path")
        async with stored.lock:
            _check_revision(stored, expected_revision)
            if stored.session.prompt_by_id(prompt_id) is None:
                raise HTTPException(404, f"unknown prompt {prompt_id!r}")
            return await _store_prompt(stored, prompt)

    @app.delete("/documents/{doc_id}/prompts/{prompt_id}", status_code=204)
    async def delete_prompt(
        doc_id: str, prompt_id: str, expected_revision: int | None = None
    ):
        stored = _session_or_404(doc_id)
        async with stored.lock:
            _check_revision(stored, expected_revision)
            if not stored.session.delete_prompt(prompt_id):
                raise HTTPException(404, f"unknown prompt {prompt_id!r}")
            stored.session.bump_revision()
            store.persist(stored)
            store.publish(stored, "prompt_changed", {"prompt_id": prompt_id})
            return Response(status_code=204)

    @app.get(
        "/documents/{doc_id}/prompts/{prompt_id}/validation",
        response_model=ValidationResponse,
    )
    async def prompt_validation(doc_id: str, prompt_id: str):
        stored = _session_or_404(doc_id)
        report = stored.session.validate(prompt_id)
        if report is None:
            raise HTTPException(404, f"unknown prompt {prompt_id!r}")
        return _violations_json(report)

    @app.get("/documents/{doc_id}/prompts/{prompt_id}/dry_run")
    async def prompt_dry_run(doc_id: str, prompt_id: str):
        stored = _session_or_404(doc_id)
        session = stored.session
        prompt = session.prompt_by_id(prompt_id)
        if prompt is None:
            raise HTTPException(404, f"unknown prompt {prompt_id!r}")
        others = [p for p in session.prompts if p.prompt_id != prompt_id]
        report = validate_prompt(prompt, session.doc, others)
        if not report.ok:
            raise HTTPException(422, detail=_violations_json(report))
        try:
            return rendered_to_json(render(prompt, session.doc))
        except StaleBindingError as exc:
            raise HTTPException(422, str(exc))

    # -- runs -----------------------------------------------------------------

    def _runs_response(stored: StoredSession, results) -> JSONResponse:
        payload = {"runs": [run_result_to_json(r) for r in results]}
        if any(r.status == "backend_error" for r in results):
            return JSONResponse(status_code=502, content=payload)
        if any(r.status == "validation_error" for r in results):
            return JSONResponse(status_code=422, content=payload)
        return JSONResponse(content=payload)

    @app.post("/documents/{doc_id}/triggers/{trigger_id}/fire", response_model=RunsResponse)
    async def fire_trigger(
        doc_id: str, trigger_id: str, expected_revision: int | None = None
    ):
        stored = _session_or_404(doc_id)
        session = stored.session
        async with stored.lock:
            _check_revision(stored, expected_revision)
            try:
                session.doc.find_trigger(trigger_id)
            except UnknownElementError as exc:
                raise HTTPException(404, str(exc))
            store.publish(stored, "run_started", {"trigger_id": trigger_id})
            try:
                results = await run_in_threadpool(session.fire, trigger_id)
            except UnboundTriggerError as exc:
                raise HTTPException(422, str(exc))
            store.persist(stored)
            for result in results:
                store.publish(
                    stored, "run_finished", {"run": run_result_to_json(result)}
                )
            store.publish(stored, "diagnostics_updated", {})
            return _runs_response(stored, results)

    @app.post("/documents/{doc_id}/prompts/{prompt_id}/run", response_model=RunsResponse)
    async def run_single_prompt(
        doc_id: str, prompt_id: str, expected_revision: int | None = None
    ):
        stored = _session_or_404(doc_id)
        session = stored.session
        async with stored.lock:
            _check_revision(stored, expected_revision)
            if session.prompt_by_id(prompt_id) is None:
                raise HTTPException(404, f"unknown prompt {prompt_id!r}")
            store.publish(stored, "run_started", {"prompt_id": prompt_id})
            result = await run_in_threadpool(session.run, prompt_id)
            store.persist(stored)
            store.publish(stored, "run_finished", {"run": run_result_to_json(result)})
            store.publish(stored, "diagnostics_updated", {})
            return _runs_response(stored, [result])

    @app.get("/documents/{doc_id}/runs", response_model=RunsResponse)
    async def list_runs(doc_id: str):
        stored = _session_or_404(doc_id)
        return {"runs": [run_result_to_json(r) for r in stored.session.run_history]}

    @app.get("/documents/{doc_id}/report")
    async def get_report(doc_id: str):
        stored = _session_or_404(doc_id)
        return report_to_json(stored.session.report)

    # -- change feed ------------------------------------------------------------

    @app.get("/documents/{doc_id}/events")
    async def events(doc_id: str):
        stored = _session_or_404(doc_id)

        async def stream():
            subscriber = store.subscribe(stored)
            try:
                yield _sse(
                    {"event": "resync", "revision": stored.session.doc.revision}
                )
                while True:
                    if subscriber.dropped and subscriber.queue.empty():
                        yield _sse(
                            {
                                "event": "resync",
                                "revision": stored.session.doc.revision,
                                "reason": "subscriber fell behind",
                            }
                        )
                        return
                    try:
                        message = await asyncio.wait_for(
                            subscriber.queue.get(), timeout=0.5
                        )
                    except asyncio.TimeoutError:
                        continue
                    yield _sse(message)
            finally:
                store.unsubscribe(stored, subscriber)

        return StreamingResponse(stream(), media_type="text/event-stream")

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
