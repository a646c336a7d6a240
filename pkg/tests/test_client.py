import json
import time

import pytest

from conftest import golden_query_text
from sensorqb.client import EndpointConfig, execute_select, parse_results_json
from sensorqb.errors import DecodeError, EndpointError, NetworkError
from sensorqb.mock_endpoint import MockSparqlEndpoint
from sensorqb.rdf import Graph, XSD_INTEGER
from sensorqb.sparql_eval import evaluate
from sensorqb.sparql_subset import parse_sparql_subset
from sensorqb.table import Cell, KIND_UNBOUND, ResultTable, encode_results_json


class TestParseResultsJson:
    def test_empty_document(self):
        table = parse_results_json(b'{"head":{"vars":[]},"results":{"bindings":[]}}')
        assert table.columns == [] and table.rows == []

    def test_typed_integer_literal(self):
        doc = {
            "head": {"vars": ["n"]},
            "results": {
                "bindings": [
                    {
                        "n": {
                            "type": "literal",
                            "datatype": "http://www.w3.org/2001/XMLSchema#integer",
                            "value": "42",
                        }
                    }
                ]
            },
        }
        table = parse_results_json(json.dumps(doc))
        cell = table.rows[0][0]
        assert cell.kind == "literal" and cell.value == "42"
        assert cell.datatype == XSD_INTEGER

    def test_missing_binding_is_unbound(self):
        doc = {
            "head": {"vars": ["a", "b"]},
            "results": {
                "bindings": [
                    {"a": {"type": "uri", "value": "http://e/x"}},
                    {"a": {"type": "uri", "value": "http://e/y"}, "b": {"type": "literal", "value": "v"}},
                ]
            },
        }
        table = parse_results_json(json.dumps(doc))
        assert table.rows[0][1].kind == KIND_UNBOUND
        assert table.rows[1][1].value == "v"

    @pytest.mark.parametrize(
        "payload",
        [
            b"not json",
            b"[]",
            b'{"head":{},"results":{"bindings":[]}}',
            b'{"head":{"vars":["a"]},"results":{}}',
            b'{"head":{"vars":["a"]},"results":{"bindings":[{"a":{"type":"wat","value":"x"}}]}}',
        ],
    )
    def test_malformed_documents(self, payload):
        with pytest.raises(DecodeError):
            parse_results_json(payload)

    def test_encode_then_decode_is_identity(self, fixture_graph):
        ast = parse_sparql_subset(golden_query_text("multi-sensor"))
        table = evaluate(ast, fixture_graph)
        again = parse_results_json(encode_results_json(table))
        assert again.columns == table.columns
        assert [[c.key() for c in r] for r in again.rows] == [
            [c.key() for c in r] for r in table.rows
        ]

    def test_encode_decode_with_unbound_and_lang(self):
        table = ResultTable(
            ["a", "b"],
            [
                [Cell("literal", "bonjour", "http://www.w3.org/2001/XMLSchema#string", "fr"), Cell.unbound()],
                [Cell("blank", "b0"), Cell("iri", "http://e/x")],
            ],
        )
        again = parse_results_json(encode_results_json(table))
        assert [[c.key() for c in r] for r in again.rows] == [
            [c.key() for c in r] for r in table.rows
        ]


class TestExecuteSelect:
    def test_fig1_query_against_mock(self, mock_endpoint, fixture_graph):
        cfg = EndpointConfig(mock_endpoint.url)
        query = golden_query_text("aqeela-location")
        table = execute_select(cfg, query)
        oracle = evaluate(parse_sparql_subset(query), fixture_graph)
        assert table.columns == oracle.columns
        assert [[c.key() for c in r] for r in table.rows] == [
            [c.key() for c in r] for r in oracle.rows
        ]

    def test_get_method(self, mock_endpoint):
        cfg = EndpointConfig(mock_endpoint.url, method="GET")
        table = execute_select(cfg, golden_query_text("minimal-string"))
        assert table.columns == ["v_0_0", "t_0"]

    def test_http_500_maps_to_endpoint_error(self):
        with MockSparqlEndpoint(Graph([]), respond_status=500) as server:
            with pytest.raises(EndpointError) as excinfo:
                execute_select(EndpointConfig(server.url), "SELECT ?s WHERE { ?s ?p ?o }")
        assert excinfo.value.status == 500

    def test_timeout_yields_network_error_promptly(self):
        with MockSparqlEndpoint(Graph([]), delay_seconds=5.0) as server:
            cfg = EndpointConfig(server.url, timeout_seconds=1.0)
            started = time.monotonic()
            with pytest.raises(NetworkError):
                execute_select(cfg, "SELECT ?s WHERE { ?s ?p ?o }")
            assert time.monotonic() - started < 3.0

    def test_unreachable_host(self):
        cfg = EndpointConfig("http://127.0.0.1:9", timeout_seconds=1.0)
        with pytest.raises(NetworkError):
            execute_select(cfg, "SELECT ?s WHERE { ?s ?p ?o }")

    def test_config_guards(self):
        with pytest.raises(ValueError):
            EndpointConfig("ftp://example.org/")
        with pytest.raises(ValueError):
            EndpointConfig("http://example.org/", timeout_seconds=0)
        with pytest.raises(ValueError):
            EndpointConfig("http://example.org/", method="PUT")
