"""Sensor and observable-property discovery over SOSA graphs.

Discovery runs one catalog query (``?obs sosa:madeBySensor ?sensor``
joined with ``sosa:observedProperty``), then samples up to five values
per (sensor, property) pair to infer a datatype that drives the legal
filter set for that property.
"""

from __future__ import annotations

import re
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Callable, Optional

from .client import EndpointConfig, execute_select
from .compiler import SparqlQueryText
from .errors import OverrideShapeError
from .model import XsdType, local_name
from .rdf import (
    XSD_BOOLEAN,
    XSD_DATE,
    XSD_DATETIME,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_FLOAT,
    XSD_INTEGER,
    XSD_STRING,
    parse_datetime_lexical,
)
from .sparql_subset import parse_sparql_subset
from .table import KIND_IRI, KIND_LITERAL, Cell

SAMPLE_LIMIT = 5
CACHE_TTL_SECONDS = 300.0

_DISCOVERY_QUERY = """\
PREFIX sosa: <http://www.w3.org/ns/sosa/>
PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>
SELECT DISTINCT ?sensor ?sensorLabel ?property ?propertyLabel
WHERE {
  ?obs sosa:madeBySensor ?sensor ;
    sosa:observedProperty ?property .
  OPTIONAL {
    ?sensor rdfs:label ?sensorLabel .
  }
  OPTIONAL {
    ?property rdfs:label ?propertyLabel .
  }
}
"""


@dataclass(frozen=True)
class PropertyDescriptor:
    property_iri: str
    label: str
    datatype: XsdType
    sample_values: tuple[str, ...] = ()


@dataclass(frozen=True)
class SensorDescriptor:
    sensor_iri: str
    label: str
    properties: tuple[PropertyDescriptor, ...] = ()


@dataclass(frozen=True)
class SensorCatalog:
    sensors: tuple[SensorDescriptor, ...]
    fetched_at: str
    source_url: str

    def find_sensor(self, sensor_iri: str) -> Optional[SensorDescriptor]:
        for sensor in self.sensors:
            if sensor.sensor_iri == sensor_iri:
                return sensor
        return None

    def find_property(self, property_iri: str) -> Optional[PropertyDescriptor]:
        for sensor in self.sensors:
            for prop in sensor.properties:
                if prop.property_iri == property_iri:
                    return prop
        return None

    def to_json_obj(self) -> dict:
        return {
            "sensors": [
                {
                    "sensorIri": s.sensor_iri,
                    "label": s.label,
                    "properties": [
                        {
                            "propertyIri": p.property_iri,
                            "label": p.label,
                            "datatype": p.datatype.value,
                            "sampleValues": list(p.sample_values),
                        }
                        for p in s.properties
                    ],
                }
                for s in self.sensors
            ],
            "fetchedAt": self.fetched_at,
            "sourceUrl": self.source_url,
        }


def empty_catalog(source_url: str = "") -> SensorCatalog:
    return SensorCatalog((), _utc_now_lexical(), source_url)


def default_discovery_query() -> SparqlQueryText:
    """The built-in catalog query; byte-stable."""
    return SparqlQueryText(_DISCOVERY_QUERY)


def sample_query(sensor_iri: str, property_iri: str) -> SparqlQueryText:
    text = (
        "PREFIX sosa: <http://www.w3.org/ns/sosa/>\n"
        "SELECT ?value\n"
        "WHERE {\n"
        f"  ?obs sosa:madeBySensor <{sensor_iri}> ;\n"
        f"    sosa:observedProperty <{property_iri}> ;\n"
        "    sosa:hasSimpleResult ?value .\n"
        "}\n"
        f"LIMIT {SAMPLE_LIMIT}\n"
    )
    return SparqlQueryText(text)


_INTEGER_RE = re.compile(r"^[+-]?\d+$")
_DECIMAL_RE = re.compile(r"^[+-]?(?:\d+\.\d*|\.\d+)$")

_DECLARED_MAP = {
    XSD_INTEGER: XsdType.INTEGER,
    XSD_DECIMAL: XsdType.DECIMAL,
    XSD_DOUBLE: XsdType.DOUBLE,
    XSD_FLOAT: XsdType.DOUBLE,
    XSD_DATETIME: XsdType.DATE_TIME,
    XSD_DATE: XsdType.DATE_TIME,
    XSD_BOOLEAN: XsdType.BOOLEAN,
}


def _probe_lexical(text: str) -> XsdType:
    if _INTEGER_RE.match(text):
        return XsdType.INTEGER
    if _DECIMAL_RE.match(text):
        return XsdType.DECIMAL
    if parse_datetime_lexical(text) is not None:
        return XsdType.DATE_TIME
    if text in ("true", "false"):
        return XsdType.BOOLEAN
    return XsdType.STRING


def infer_datatype(samples: list[Cell]) -> XsdType:
    """Datatype inference from sample cells; total, never raises.

    All-IRI samples map to the IRI type; uniformly declared XSD datatypes
    map directly; untyped literals are probed lexically; anything mixed,
    unknown, or empty degrades to string.
    """
    if not samples:
        return XsdType.STRING
    if all(c.kind == KIND_IRI for c in samples):
        return XsdType.IRI
    if not all(c.kind == KIND_LITERAL for c in samples):
        return XsdType.STRING
    datatypes = {c.datatype or XSD_STRING for c in samples}
    if len(datatypes) != 1:
        return XsdType.STRING
    declared = datatypes.pop()
    if declared != XSD_STRING:
        return _DECLARED_MAP.get(declared, XsdType.STRING)
    if any(c.lang for c in samples):
        return XsdType.STRING
    probed = {_probe_lexical(c.value) for c in samples}
    if len(probed) == 1:
        return probed.pop()
    return XsdType.STRING


def _utc_now_lexical() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def discover_sensors(
    cfg: EndpointConfig,
    override: Optional[str] = None,
    now: Callable[[], str] = _utc_now_lexical,
) -> SensorCatalog:
    """Enumerate sensors and properties, then sample values per property.

    A discovery override must stay inside the subset grammar and project
    at least ?sensor and ?property.
    """
    if override is not None:
        ast = parse_sparql_subset(override)
        projected = set(ast.select_vars or ast.pattern_vars)
        missing = {"sensor", "property"} - projected
        if missing:
            raise OverrideShapeError(
                "discovery override must project " + ", ".join(f"?{v}" for v in sorted(missing))
            )
        query = SparqlQueryText(override)
    else:
        query = default_discovery_query()

    table = execute_select(cfg, query)
    index = {name: i for i, name in enumerate(table.columns)}

    sensors: dict[str, dict] = {}
    for row in table.rows:
        sensor_cell = row[index["sensor"]]
        property_cell = row[index["property"]]
        if sensor_cell.kind != KIND_IRI or property_cell.kind != KIND_IRI:
            continue
        entry = sensors.setdefault(sensor_cell.value, {"label": None, "properties": {}})
        label_cell = row[index["sensorLabel"]] if "sensorLabel" in index else None
        if entry["label"] is None and label_cell is not None and label_cell.kind == KIND_LITERAL:
            entry["label"] = label_cell.value
        plabel_cell = row[index["propertyLabel"]] if "propertyLabel" in index else None
        plabel = None
        if plabel_cell is not None and plabel_cell.kind == KIND_LITERAL:
            plabel = plabel_cell.value
        props = entry["properties"]
        if property_cell.value not in props or props[property_cell.value] is None:
            props[property_cell.value] = plabel

    descriptors = []
    for sensor_iri in sorted(sensors):
        entry = sensors[sensor_iri]
        properties = []
        for property_iri in sorted(entry["properties"]):
            samples = execute_select(cfg, sample_query(sensor_iri, property_iri))
            cells = [row[0] for row in samples.rows]
            properties.append(
                PropertyDescriptor(
                    property_iri=property_iri,
                    label=entry["properties"][property_iri] or local_name(property_iri),
                    datatype=infer_datatype(cells),
                    sample_values=tuple(c.value for c in cells[:SAMPLE_LIMIT]),
                )
            )
        properties.sort(key=lambda p: (p.label, p.property_iri))
        descriptors.append(
            SensorDescriptor(
                sensor_iri=sensor_iri,
                label=entry["label"] or local_name(sensor_iri),
                properties=tuple(properties),
            )
        )
    descriptors.sort(key=lambda s: (s.label, s.sensor_iri))
    return SensorCatalog(tuple(descriptors), now(), cfg.url)


class CatalogCache:
    """In-memory catalog with TTL; many readers, one refresher at a time."""

    def __init__(
        self,
        cfg: EndpointConfig,
        override: Optional[str] = None,
        ttl_seconds: float = CACHE_TTL_SECONDS,
        clock: Callable[[], float] = time.monotonic,
    ):
        self._cfg = cfg
        self._override = override
        self._ttl = ttl_seconds
        self._clock = clock
        self._lock = threading.Lock()
        self._catalog: Optional[SensorCatalog] = None
        self._loaded_at: float = -float("inf")
        self.last_error: Optional[Exception] = None

    def get(self, refresh: bool = False) -> SensorCatalog:
        catalog = self._catalog
        if not refresh and catalog is not None and self._clock() - self._loaded_at < self._ttl:
            return catalog
        with self._lock:
            if (
                not refresh
                and self._catalog is not None
                and self._clock() - self._loaded_at < self._ttl
            ):
                return self._catalog
            try:
                self._catalog = discover_sensors(self._cfg, self._override)
                self._loaded_at = self._clock()
                self.last_error = None
            except Exception as exc:
                self.last_error = exc
                if self._catalog is None:
                    raise
            return self._catalog
