"""A tiny SPARQL-protocol endpoint backed by the subset evaluator.

Serves GET/POST per the SPARQL 1.1 protocol over a fixed in-memory
graph. Used by the test suite and the `mock-endpoint` CLI command so
every flow works offline.
"""

from __future__ import annotations

import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from .errors import SubsetSyntaxError
from .rdf import Graph
from .sparql_eval import evaluate
from .sparql_subset import parse_sparql_subset
from .table import encode_results_json


class MockSparqlEndpoint:
    """In-process endpoint; start() returns once the port is bound.

    ``respond_status`` forces an HTTP error answer; ``delay_seconds``
    stalls every response (for timeout tests).
    """

    def __init__(
        self,
        graph: Graph,
        host: str = "127.0.0.1",
        port: int = 0,
        respond_status: int = None,
        delay_seconds: float = 0.0,
    ):
        self.graph = graph
        self.respond_status = respond_status
        self.delay_seconds = delay_seconds
        self.request_count = 0
        endpoint = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, fmt, *args):
                pass

            def _query_text(self) -> str:
                if self.command == "GET":
                    params = parse_qs(urlparse(self.path).query)
                    values = params.get("query", [])
                    return values[0] if values else ""
                length = int(self.headers.get("Content-Length", "0"))
                body = self.rfile.read(length).decode("utf-8")
                params = parse_qs(body)
                values = params.get("query", [])
                return values[0] if values else ""

            def _respond(self):
                endpoint.request_count += 1
                if endpoint.delay_seconds:
                    time.sleep(endpoint.delay_seconds)
                if endpoint.respond_status is not None:
                    self.send_response(endpoint.respond_status)
                    self.end_headers()
                    self.wfile.write(b"forced error")
                    return
                query = self._query_text()
                if not query:
                    self.send_response(400)
                    self.end_headers()
                    self.wfile.write(b"missing query parameter")
                    return
                try:
                    ast = parse_sparql_subset(query)
                except SubsetSyntaxError as exc:
                    self.send_response(400)
                    self.end_headers()
                    self.wfile.write(str(exc).encode("utf-8"))
                    return
                body = encode_results_json(evaluate(ast, endpoint.graph))
                self.send_response(200)
                self.send_header("Content-Type", "application/sparql-results+json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            do_GET = _respond
            do_POST = _respond

        self._server = ThreadingHTTPServer((host, port), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}/sparql"

    def start(self) -> "MockSparqlEndpoint":
        self._thread.start()
        return self

    def stop(self):
        self._server.shutdown()
        self._server.server_close()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc_info):
        self.stop()

    def serve_forever(self):
        self._thread.start()
        self._thread.join()
