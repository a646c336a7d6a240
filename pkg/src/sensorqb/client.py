"""SPARQL protocol client: run SELECT queries over HTTP, decode results."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Union

import requests

from .errors import DecodeError, EndpointError, NetworkError
from .rdf import XSD_STRING
from .table import KIND_BLANK, KIND_IRI, KIND_LITERAL, Cell, ResultTable

RESULTS_JSON = "application/sparql-results+json"


@dataclass(frozen=True)
class EndpointConfig:
    url: str
    timeout_seconds: float = 30.0
    method: str = "POST"
    extra_headers: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        if not self.url.lower().startswith(("http://", "https://")):
            raise ValueError(f"endpoint url must be absolute http(s): {self.url!r}")
        if self.timeout_seconds <= 0:
            raise ValueError("timeout must be positive")
        if self.method not in ("GET", "POST"):
            raise ValueError("method must be GET or POST")


def parse_results_json(data: Union[bytes, str]) -> ResultTable:
    """Decode a SPARQL results-JSON document into a table.

    Variables keep the head's order; a missing binding becomes an
    unbound cell.
    """
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise DecodeError(f"results document is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise DecodeError("results document must be a JSON object")
    head = doc.get("head")
    if not isinstance(head, dict) or not isinstance(head.get("vars"), list):
        raise DecodeError("missing head.vars")
    columns = []
    for v in head["vars"]:
        if not isinstance(v, str):
            raise DecodeError("head.vars entries must be strings")
        columns.append(v)
    results = doc.get("results")
    if not isinstance(results, dict) or not isinstance(results.get("bindings"), list):
        raise DecodeError("missing results.bindings")
    rows = []
    for idx, binding in enumerate(results["bindings"]):
        if not isinstance(binding, dict):
            raise DecodeError(f"results.bindings[{idx}] must be an object")
        row = []
        for var in columns:
            term = binding.get(var)
            if term is None:
                row.append(Cell.unbound())
                continue
            row.append(_decode_term(term, f"results.bindings[{idx}].{var}"))
        rows.append(row)
    return ResultTable(columns, rows)


def _decode_term(term, where: str) -> Cell:
    if not isinstance(term, dict):
        raise DecodeError(f"{where}: binding must be an object")
    kind = term.get("type")
    value = term.get("value")
    if not isinstance(value, str):
        raise DecodeError(f"{where}: missing string value")
    if kind == "uri":
        return Cell(KIND_IRI, value)
    if kind == "bnode":
        return Cell(KIND_BLANK, value)
    if kind in ("literal", "typed-literal"):
        lang = term.get("xml:lang")
        datatype = term.get("datatype")
        if lang is not None and not isinstance(lang, str):
            raise DecodeError(f"{where}: xml:lang must be a string")
        if datatype is not None and not isinstance(datatype, str):
            raise DecodeError(f"{where}: datatype must be a string")
        return Cell(KIND_LITERAL, value, datatype or XSD_STRING, lang)
    raise DecodeError(f"{where}: unknown term type {kind!r}")


def execute_select(cfg: EndpointConfig, query) -> ResultTable:
    """Run one SELECT query per the SPARQL 1.1 protocol; no retries."""
    text = query.text if hasattr(query, "text") else str(query)
    headers = {"Accept": RESULTS_JSON}
    headers.update(dict(cfg.extra_headers))
    try:
        if cfg.method == "GET":
            response = requests.get(
                cfg.url, params={"query": text}, headers=headers, timeout=cfg.timeout_seconds
            )
        else:
            response = requests.post(
                cfg.url, data={"query": text}, headers=headers, timeout=cfg.timeout_seconds
            )
    except requests.RequestException as exc:
        raise NetworkError(f"request to {cfg.url} failed: {exc}") from None
    if response.status_code >= 400:
        raise EndpointError(response.status_code, response.text[:500])
    return parse_results_json(response.content)
