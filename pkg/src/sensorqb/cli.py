"""Command-line interface.

Exit codes: 0 success, 1 validation/user-input error, 2 I/O or network
error.
"""

from __future__ import annotations

import json
import sys
from typing import Optional

import click

from .client import execute_select
from .compiler import compile_query
from .config import ServiceConfig, bundled_data_path, load_config, with_overrides
from .discovery import discover_sensors
from .errors import (
    ConfigError,
    DecodeError,
    DocumentSyntaxError,
    EndpointError,
    GeoWithoutCoordinates,
    NetworkError,
    OverrideShapeError,
    SchemaError,
    SensorQbError,
    SubsetSyntaxError,
    ValidationFailed,
)
from .model import AbstractQuery, apply_mutation, empty_query, parse_query
from .rdf import load_ntriples
from .sparql_eval import evaluate
from .sparql_subset import parse_sparql_subset
from .table import ResultTable

VALIDATION_ERRORS = (
    DocumentSyntaxError,
    SchemaError,
    ValidationFailed,
    GeoWithoutCoordinates,
    SubsetSyntaxError,
    OverrideShapeError,
    ConfigError,
)
IO_ERRORS = (NetworkError, EndpointError, DecodeError, OSError)


def _fail(exc: Exception, code: int):
    click.echo(f"error: {exc}", err=True)
    sys.exit(code)


def _load_service_config(config_path: Optional[str], endpoint_url: Optional[str]) -> ServiceConfig:
    config = load_config(config_path)
    return with_overrides(config, endpoint_url=endpoint_url)


def _read_document(path: str, config: ServiceConfig) -> AbstractQuery:
    with open(path, encoding="utf-8") as fh:
        return parse_query(fh.read(), default_limit=config.default_limit)


def _emit_table(table: ResultTable, fmt: str):
    if fmt == "json":
        click.echo(json.dumps(table.to_json_obj(), indent=2))
    else:
        sys.stdout.write(table.to_csv())


@click.group()
def main():
    """Build, compile, and run observation queries over SOSA endpoints."""


@main.command("compile")
@click.argument("document", type=click.Path())
@click.option("--config", "config_path", type=click.Path(), default=None, help="TOML config file.")
def compile_cmd(document, config_path):
    """Compile a query document to SPARQL on stdout."""
    try:
        config = load_config(config_path)
        q = _read_document(document, config)
        compiled = compile_query(q, config.compile_options())
    except VALIDATION_ERRORS as exc:
        _fail(exc, 1)
    except IO_ERRORS as exc:
        _fail(exc, 2)
    sys.stdout.write(compiled.text)


@main.command("run")
@click.argument("document", type=click.Path())
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--endpoint-url", default=None, help="SPARQL endpoint URL override.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--show-sparql", is_flag=True, help="Print the compiled query on stderr.")
def run_cmd(document, config_path, endpoint_url, fmt, show_sparql):
    """Compile a document and execute it against the endpoint."""
    try:
        config = _load_service_config(config_path, endpoint_url)
        q = _read_document(document, config)
        compiled = compile_query(q, config.compile_options())
        if show_sparql:
            click.echo(compiled.text, err=True, nl=False)
        table = execute_select(config.endpoint, compiled)
    except VALIDATION_ERRORS as exc:
        _fail(exc, 1)
    except IO_ERRORS as exc:
        _fail(exc, 2)
    _emit_table(table, fmt)


@main.command("eval")
@click.argument("document", type=click.Path())
@click.argument("fixture", type=click.Path(), required=False)
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
def eval_cmd(document, fixture, config_path, fmt):
    """Evaluate a document over an N-Triples file, no network.

    FIXTURE defaults to the bundled synthetic wildlife graph.
    """
    try:
        config = load_config(config_path)
        q = _read_document(document, config)
        graph = load_ntriples(fixture or bundled_data_path("fixture.nt"))
        compiled = compile_query(q, config.compile_options())
        table = evaluate(parse_sparql_subset(compiled.text), graph)
    except VALIDATION_ERRORS as exc:
        _fail(exc, 1)
    except ValueError as exc:
        _fail(exc, 1)
    except IO_ERRORS as exc:
        _fail(exc, 2)
    _emit_table(table, fmt)


@main.command("discover")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--endpoint-url", default=None)
@click.option(
    "--discovery-query",
    "discovery_query_path",
    type=click.Path(),
    default=None,
    help="File holding a discovery override query.",
)
def discover_cmd(config_path, endpoint_url, discovery_query_path):
    """Print the endpoint's sensor catalog as JSON."""
    try:
        config = _load_service_config(config_path, endpoint_url)
        override = config.discovery_query_override
        if discovery_query_path is not None:
            with open(discovery_query_path, encoding="utf-8") as fh:
                override = fh.read()
        catalog = discover_sensors(config.endpoint, override)
    except VALIDATION_ERRORS as exc:
        _fail(exc, 1)
    except IO_ERRORS as exc:
        _fail(exc, 2)
    click.echo(json.dumps(catalog.to_json_obj(), indent=2))


@main.command("chat")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--endpoint-url", default=None)
def chat_cmd(config_path, endpoint_url):
    """Interactive chat that builds and runs a query document."""
    from . import nlu

    try:
        config = _load_service_config(config_path, endpoint_url)
        catalog = discover_sensors(config.endpoint, config.discovery_query_override)
    except VALIDATION_ERRORS as exc:
        _fail(exc, 1)
    except IO_ERRORS as exc:
        _fail(exc, 2)
    q = empty_query(config.default_limit)
    click.echo("Type a question (blank line or Ctrl-D to quit).")
    while True:
        try:
            line = input("> ")
        except EOFError:
            break
        if not line.strip():
            break
        frame = nlu.classify(line, catalog)
        outcome = nlu.respond(frame, q, catalog, config.compile_options())
        if outcome.reset_query:
            q = empty_query(config.default_limit)
        for mutation in outcome.mutations:
            q = apply_mutation(q, mutation, catalog)
        click.echo(outcome.reply)
        if outcome.trigger_search:
            try:
                compiled = compile_query(q, config.compile_options())
                table = execute_select(config.endpoint, compiled)
                sys.stdout.write(table.to_csv())
            except SensorQbError as exc:
                click.echo(f"search failed: {exc}", err=True)


@main.command("serve")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--endpoint-url", default=None)
@click.option("--listen", default=None, help="host:port to bind.")
def serve_cmd(config_path, endpoint_url, listen):
    """Run the HTTP service."""
    from .errors import BindError
    from .service import serve

    try:
        config = load_config(config_path)
        config = with_overrides(config, endpoint_url=endpoint_url, listen=listen)
        serve(config)
    except VALIDATION_ERRORS as exc:
        _fail(exc, 1)
    except BindError as exc:
        _fail(exc, 2)


@main.command("mock-endpoint")
@click.option("--fixture", type=click.Path(), default=None, help="N-Triples file to serve.")
@click.option("--listen", default="127.0.0.1:3030", help="host:port to bind.")
def mock_endpoint_cmd(fixture, listen):
    """Serve an N-Triples file over the SPARQL protocol (offline demos)."""
    from .mock_endpoint import MockSparqlEndpoint

    try:
        graph = load_ntriples(fixture or bundled_data_path("fixture.nt"))
    except (OSError, ValueError) as exc:
        _fail(exc, 2)
    host, _, port_text = listen.partition(":")
    server = MockSparqlEndpoint(graph, host=host or "127.0.0.1", port=int(port_text or "3030"))
    click.echo(f"serving {len(graph)} triples at {server.url}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.stop()


if __name__ == "__main__":
    main()
