"""HTTP API over discovery, compilation, execution, chat, and examples.

Compilation runs in-process but is exposed at /api/compile so browser
clients interact with the conversion engine over the same HTTP boundary
as everything else. Session state is only the per-session query
document, keyed by a client-supplied sessionId.
"""

from __future__ import annotations

import json
import threading
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import nlu
from .client import execute_select
from .compiler import SparqlQueryText, compile_query
from .config import ServiceConfig, bundled_data_path
from .discovery import CatalogCache, SensorCatalog, empty_catalog
from .errors import (
    BindError,
    DecodeError,
    DocumentSyntaxError,
    EndpointError,
    GeoWithoutCoordinates,
    NetworkError,
    SchemaError,
    ValidationFailed,
)
from .model import (
    AbstractQuery,
    apply_mutation,
    empty_query,
    query_from_obj,
    query_to_obj,
    validate_query,
)
from .table import ResultTable


def load_examples(path: str) -> list[dict]:
    """Read and check the predefined examples file."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    examples = []
    for i, entry in enumerate(raw):
        query = query_from_obj(entry["query"])
        diagnostics = validate_query(query)
        fatals = [d for d in diagnostics if d.severity == "fatal"]
        if fatals:
            raise ValidationFailed(fatals)
        examples.append(
            {
                "name": entry["name"],
                "description": entry.get("description", ""),
                "query": query_to_obj(query),
            }
        )
    return examples


class ServiceState:
    def __init__(self, config: ServiceConfig):
        self.config = config
        self.catalog_cache = CatalogCache(config.endpoint, config.discovery_query_override)
        self.sessions: dict[str, AbstractQuery] = {}
        self.sessions_lock = threading.Lock()
        self.first_load_done = False
        examples_path = config.examples_path or bundled_data_path("examples.json")
        self.examples = load_examples(examples_path)

    def catalog(self) -> SensorCatalog:
        try:
            return self.catalog_cache.get()
        finally:
            self.first_load_done = True

    def catalog_or_empty(self) -> SensorCatalog:
        try:
            return self.catalog()
        except Exception:
            return empty_catalog(self.config.endpoint.url)


def _error_response(status: int, message: str, **extra) -> JSONResponse:
    body = {"error": message}
    body.update(extra)
    return JSONResponse(status_code=status, content=body)


def create_app(config: ServiceConfig) -> FastAPI:
    state = ServiceState(config)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        try:
            state.catalog()
        except Exception:
            pass  # recorded in catalog_cache.last_error; health still reports ready
        yield

    app = FastAPI(title="sensorqb", docs_url=None, redoc_url=None, lifespan=lifespan)
    app.state.service = state
    # the browser UI may be served from a different origin than the API
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def _parse_document(payload) -> AbstractQuery:
        return query_from_obj(payload, default_limit=config.default_limit)

    @app.get("/api/health")
    def health():
        if not state.first_load_done:
            return _error_response(503, "catalog not loaded yet")
        return {"status": "ok"}

    @app.get("/api/sensors")
    def sensors():
        try:
            catalog = state.catalog()
        except (NetworkError, EndpointError, DecodeError) as exc:
            return _error_response(502, str(exc))
        return catalog.to_json_obj()

    @app.get("/api/examples")
    def examples():
        return state.examples

    @app.post("/api/compile")
    async def compile_endpoint(request: Request):
        try:
            payload = await request.json()
        except json.JSONDecodeError as exc:
            return _error_response(400, f"body is not valid JSON: {exc}")
        try:
            q = _parse_document(payload)
        except (SchemaError, DocumentSyntaxError) as exc:
            return _error_response(400, str(exc))
        try:
            compiled = compile_query(q, config.compile_options())
        except ValidationFailed as exc:
            return _error_response(
                422,
                "document does not compile",
                diagnostics=[
                    {"severity": d.severity, "path": d.path, "message": d.message}
                    for d in exc.diagnostics
                ],
            )
        except GeoWithoutCoordinates as exc:
            return _error_response(422, str(exc))
        return {"sparql": compiled.text}

    @app.post("/api/query")
    async def query_endpoint(request: Request):
        try:
            payload = await request.json()
        except json.JSONDecodeError as exc:
            return _error_response(400, f"body is not valid JSON: {exc}")
        try:
            q = _parse_document(payload)
        except (SchemaError, DocumentSyntaxError) as exc:
            return _error_response(400, str(exc))
        try:
            compiled, table = run_query(config, q)
        except ValidationFailed as exc:
            return _error_response(
                422,
                "document does not compile",
                diagnostics=[
                    {"severity": d.severity, "path": d.path, "message": d.message}
                    for d in exc.diagnostics
                ],
            )
        except GeoWithoutCoordinates as exc:
            return _error_response(422, str(exc))
        except NetworkError as exc:
            return _error_response(502, str(exc))
        except (EndpointError, DecodeError) as exc:
            return _error_response(502, str(exc))
        return {"sparql": compiled.text, "table": table.to_json_obj()}

    @app.post("/api/chat")
    async def chat_endpoint(request: Request):
        try:
            payload = await request.json()
        except json.JSONDecodeError as exc:
            return _error_response(400, f"body is not valid JSON: {exc}")
        message = payload.get("message")
        if not isinstance(message, str) or not message.strip():
            return _error_response(400, "message must be a nonempty string")
        session_id = payload.get("sessionId")
        if session_id is not None and not isinstance(session_id, str):
            return _error_response(400, "sessionId must be a string")

        catalog = state.catalog_or_empty()
        # An explicit query seeds this turn (letting a form-building client
        # keep the chat working on its current document); otherwise the
        # session document, otherwise a fresh one.
        if payload.get("query") is not None:
            try:
                q = _parse_document(payload["query"])
            except (SchemaError, DocumentSyntaxError) as exc:
                return _error_response(400, str(exc))
        elif session_id is not None:
            with state.sessions_lock:
                q = state.sessions.get(session_id, empty_query(config.default_limit))
        else:
            q = empty_query(config.default_limit)

        frame = nlu.classify(message, catalog)
        outcome = nlu.respond(frame, q, catalog, config.compile_options())
        if outcome.reset_query:
            q = empty_query(config.default_limit)
        for mutation in outcome.mutations:
            q = apply_mutation(q, mutation, catalog)
        if session_id is not None:
            with state.sessions_lock:
                state.sessions[session_id] = q
        return {
            "reply": outcome.reply,
            "query": query_to_obj(q),
            "triggerSearch": outcome.trigger_search,
        }

    return app


def run_query(config: ServiceConfig, q: AbstractQuery) -> tuple[SparqlQueryText, ResultTable]:
    """Compile then execute against the configured endpoint."""
    compiled = compile_query(q, config.compile_options())
    table = execute_select(config.endpoint, compiled)
    return compiled, table


def serve(config: ServiceConfig):
    """Run the HTTP service until interrupted."""
    import socket

    import uvicorn

    host, _, port_text = config.listen_address.partition(":")
    host = host or "127.0.0.1"
    try:
        port = int(port_text or "8080")
        probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
        probe.close()
    except (OSError, ValueError) as exc:
        raise BindError(f"cannot bind {config.listen_address}: {exc}") from None
    app = create_app(config)
    uvicorn.run(app, host=host, port=port, log_level="warning")
