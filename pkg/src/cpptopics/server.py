"""HTTP service exposing the highlighter to the web UI.

GET  /api/topics     -> {"topics": [nine names]}
POST /api/highlight  -> {"spans": [...], "elapsed_ms": ...}
GET  /                -> static UI assets when available

Every request is stateless; the model bundle is immutable after startup.
"""

from __future__ import annotations

import time
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from .bundle import ModelBundle
from .config import ConfigError, ServiceConfig, parse_highlight_overrides
from .corpus import SourceDocument
from .highlighter import highlight
from .topics import TOPIC_NAMES, Topic

_FALLBACK_PAGE = """<!doctype html>
<html><head><meta charset="utf-8"><title>cpptopics</title></head>
<body>
<h1>cpptopics service</h1>
<p>The web UI is not built. The JSON API is live:</p>
<ul>
<li><code>GET /api/topics</code></li>
<li><code>POST /api/highlight</code> with
<code>{"code": "...", "topics": ["OperatorOverload"]}</code></li>
</ul>
</body></html>
"""


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse({"error": message}, status_code=status)


def create_app(bundle: ModelBundle, service: ServiceConfig | None = None) -> FastAPI:
    service = service or ServiceConfig()
    app = FastAPI(title="cpptopics", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.get("/api/topics")
    async def topics() -> dict:
        return {"topics": list(TOPIC_NAMES)}

    @app.post("/api/highlight")
    async def highlight_endpoint(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "request body must be valid JSON")
        if not isinstance(body, dict):
            return _error(400, "request body must be a JSON object")
        unknown = set(body) - {"code", "topics", "config_overrides"}
        if unknown:
            return _error(400, f"unknown field: {sorted(unknown)[0]}")
        code = body.get("code")
        if not isinstance(code, str):
            return _error(400, "field 'code' must be a string")
        if len(code) > service.max_code_chars:
            return _error(
                400,
                f"code exceeds the configured size limit "
                f"({service.max_code_chars} characters)",
            )
        topic_names = body.get("topics", list(TOPIC_NAMES))
        if not isinstance(topic_names, list) or not all(
            isinstance(t, str) for t in topic_names
        ):
            return _error(400, "field 'topics' must be a list of topic names")
        try:
            topics = [Topic.from_name(name) for name in topic_names]
        except ValueError as exc:
            return _error(400, str(exc))
        cfg = bundle.highlight_config
        overrides = body.get("config_overrides")
        if overrides is not None:
            if not isinstance(overrides, dict):
                return _error(400, "config_overrides must be an object")
            try:
                cfg = parse_highlight_overrides(overrides, base=cfg)
            except ConfigError as exc:
                return _error(400, str(exc))
        started = time.perf_counter()
        if code:
            doc = SourceDocument("request", code)
            spans = highlight(doc, bundle.model, topics, cfg)
        else:
            spans = []
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        return {
            "spans": [
                {
                    "topic": h.topic.value,
                    "start": h.span.start,
                    "end": h.span.end,
                    "confidence": h.confidence,
                }
                for h in spans
            ],
            "elapsed_ms": elapsed_ms,
        }

    static_dir = _resolve_static_dir(service.static_dir)
    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    else:

        @app.get("/", response_class=HTMLResponse)
        async def index() -> str:
            return _FALLBACK_PAGE

    return app


def _resolve_static_dir(configured: str | None) -> Path | None:
    if configured:
        path = Path(configured)
        return path if path.is_dir() else None
    default = Path("frontend") / "dist"
    return default if (default / "index.html").is_file() else None


def serve(bundle: ModelBundle, service: ServiceConfig) -> None:
    import uvicorn

    app = create_app(bundle, service)
    uvicorn.run(app, host=service.host, port=service.port, log_level="info")
