import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))

from sensorqb.client import EndpointConfig
from sensorqb.config import bundled_data_path
from sensorqb.discovery import discover_sensors
from sensorqb.mock_endpoint import MockSparqlEndpoint
from sensorqb.rdf import load_ntriples

GOLDEN_DIR = pathlib.Path(__file__).resolve().parent / "golden"


def golden_names() -> list[str]:
    return sorted(p.stem for p in GOLDEN_DIR.glob("*.json"))


def golden_document_text(name: str) -> str:
    return (GOLDEN_DIR / f"{name}.json").read_text(encoding="utf-8")


def golden_query_text(name: str) -> str:
    return (GOLDEN_DIR / f"{name}.rq").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def fixture_graph():
    return load_ntriples(bundled_data_path("fixture.nt"))


@pytest.fixture(scope="session")
def mock_endpoint(fixture_graph):
    with MockSparqlEndpoint(fixture_graph) as server:
        yield server


@pytest.fixture(scope="session")
def fixture_catalog(mock_endpoint):
    return discover_sensors(EndpointConfig(mock_endpoint.url))
