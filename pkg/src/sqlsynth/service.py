"""HTTP JSON API around the synthesizer.

Endpoints:

* ``GET /api/health`` — liveness probe, returns ``{"ok": true}``.
* ``POST /api/synthesize`` — accepts a problem document (same schema the
  CLI reads) and responds with ``status`` (``solved``, ``timeout``,
  ``exhausted`` or ``invalid``), the ``sql`` and ``dsl`` text when solved,
  ``elapsed_ms`` and search ``stats``.

Malformed JSON or an invalid problem yields 400 with an explanation;
request bodies over one megabyte yield 413.  Per-request search time is
clamped to the server's cap so one request cannot pin a worker.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.concurrency import run_in_threadpool
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .engine import synthesize
from .problemio import ProblemFormatError, parse_problem

MAX_BODY_BYTES = 1_000_000


def create_app(timeout_cap_ms: int = 5000) -> FastAPI:
    app = FastAPI(title="sqlsynth", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.middleware("http")
    async def refuse_oversize_bodies(request: Request, call_next):
        length = request.headers.get("content-length")
        if length is not None and length.isdigit() and int(length) > MAX_BODY_BYTES:
            return JSONResponse(
                {"status": "invalid", "error": "request body exceeds one megabyte"},
                status_code=413)
        return await call_next(request)

    @app.get("/api/health")
    async def health() -> dict:
        return {"ok": True}

    @app.post("/api/synthesize")
    async def api_synthesize(request: Request) -> JSONResponse:
        try:
            doc = await request.json()
        except Exception:
            return JSONResponse(
                {"status": "invalid", "error": "request body is not valid JSON"},
                status_code=400)
        try:
            problem, config = parse_problem(doc)
        except ProblemFormatError as exc:
            return JSONResponse({"status": "invalid", "error": str(exc)},
                                status_code=400)
        config.timeout_ms = min(config.timeout_ms, timeout_cap_ms)
        result = await run_in_threadpool(synthesize, problem, config)
        body: dict = {
            "status": result.status.value,
            "elapsed_ms": round(result.elapsed_ms, 1),
            "stats": {
                "sketches_tried": result.stats.sketches_tried,
                "candidates_checked": result.stats.candidates_checked,
            },
        }
        if result.program is not None:
            body["sql"] = result.sql
            body["dsl"] = result.dsl
        return JSONResponse(body)

    return app
