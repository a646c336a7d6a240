"""Deterministic compilation of query documents to SPARQL 1.1 SELECT text.

Output is byte-stable: the same document always compiles to the same
query string. Every emitted query stays inside the subset grammar in
docs/sparql-subset.ebnf so the bundled evaluator can execute it.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import EmptyGeoSet, GeoWithoutCoordinates, IllegalFilter, ValidationFailed
from .model import (
    AbstractQuery,
    Contain,
    DateWindow,
    FilterSpec,
    GeoCombinator,
    GeoFilterSet,
    Match,
    PropertyBinding,
    Range,
    Regex,
    Scalar,
    XsdType,
    filter_is_legal,
    validate_query,
)
from .rdf import RDFS, SOSA, WGS84, XSD

EARTH_RADIUS_METERS = 6371000.0

DEFAULT_LAT_PROPERTY_IRI = "http://example.org/wildlife/property/latitude"
DEFAULT_LON_PROPERTY_IRI = "http://example.org/wildlife/property/longitude"

# Fixed, minimal prefix set; emitted in this order, only when used.
PREFIXES: tuple[tuple[str, str], ...] = (
    ("sosa", SOSA),
    ("xsd", XSD),
    ("geo", WGS84),
    ("rdfs", RDFS),
)

_SAFE_LOCAL_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_\-]*$")


@dataclass(frozen=True)
class CompileOptions:
    """Knobs the document itself does not carry.

    The latitude/longitude property IRIs tell the compiler which value
    bindings a geo filter applies to; defaults match the bundled fixture.
    """

    lat_property_iri: str = DEFAULT_LAT_PROPERTY_IRI
    lon_property_iri: str = DEFAULT_LON_PROPERTY_IRI


DEFAULT_OPTIONS = CompileOptions()


@dataclass(frozen=True)
class SparqlQueryText:
    text: str
    used_prefixes: tuple[tuple[str, str], ...] = ()

    def __str__(self):
        return self.text


class PrefixTracker:
    """Shortens IRIs against the fixed prefix table, recording usage."""

    def __init__(self):
        self.used: dict[str, str] = {}

    def term(self, iri: str) -> str:
        for prefix, namespace in PREFIXES:
            if iri.startswith(namespace):
                local = iri[len(namespace):]
                if _SAFE_LOCAL_RE.match(local):
                    self.used[prefix] = namespace
                    return f"{prefix}:{local}"
        return f"<{iri}>"

    def used_in_order(self) -> tuple[tuple[str, str], ...]:
        return tuple((p, ns) for p, ns in PREFIXES if p in self.used)

    def header(self) -> str:
        return "".join(f"PREFIX {p}: <{ns}>\n" for p, ns in self.used_in_order())


class VarTable:
    """Variable allocation as a pure function of document order.

    Sensor ``i``'s observation node for its ``j``-th property is
    ``?obs_i_j``, the observed value ``?v_i_j``; all of a sensor's
    properties share the time variable ``?t_i``. A single ``?sensor``
    label variable discriminates rows when several sensors are selected.
    """

    def __init__(self, q: AbstractQuery):
        self._entries: dict[tuple, str] = {}
        for i, sensor in enumerate(q.sensors):
            self._entries[(i, "time")] = f"t_{i}"
            self._entries[(i, "sensorLabel")] = "sensor"
            for j, binding in enumerate(sensor.properties):
                self._entries[(i, "observation", binding.property_iri)] = f"obs_{i}_{j}"
                self._entries[(i, "value", binding.property_iri)] = f"v_{i}_{j}"

    def obs(self, i: int, j: int) -> str:
        return f"obs_{i}_{j}"

    def value(self, i: int, j: int) -> str:
        return f"v_{i}_{j}"

    def time(self, i: int) -> str:
        return f"t_{i}"

    def sensor_label(self) -> str:
        return "sensor"

    def lookup(self, sensor_index: int, role: str, property_iri: str = None) -> str:
        key = (sensor_index, role) if property_iri is None else (sensor_index, role, property_iri)
        return self._entries[key]

    def names(self) -> set[str]:
        return set(self._entries.values())


def allocate_vars(q: AbstractQuery) -> VarTable:
    return VarTable(q)


# --- Literal and expression rendering ------------------------------------

_STRING_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
    "\b": "\\b",
    "\f": "\\f",
}


def escape_string(text: str) -> str:
    return "".join(_STRING_ESCAPES.get(ch, ch) for ch in text)


def format_number(value) -> str:
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def render_literal(value: Scalar, datatype: XsdType, prefixes: PrefixTracker) -> str:
    if datatype in (XsdType.INTEGER, XsdType.DECIMAL, XsdType.DOUBLE):
        return format_number(value)
    if datatype == XsdType.BOOLEAN:
        return "true" if value else "false"
    if datatype == XsdType.DATE_TIME:
        return f'"{value}"^^{prefixes.term(XSD + "dateTime")}'
    if datatype == XsdType.IRI:
        return prefixes.term(value)
    return f'"{escape_string(value)}"'


def render_filter(
    f: FilterSpec,
    var_name: str,
    datatype: XsdType,
    prefixes: PrefixTracker = None,
) -> str:
    """One boolean expression constraining ``?var_name``."""
    if prefixes is None:
        prefixes = PrefixTracker()
    if not filter_is_legal(f, datatype):
        raise IllegalFilter(f"{type(f).__name__} filter is illegal for datatype {datatype.value}")
    var = f"?{var_name}"
    if isinstance(f, Contain):
        return f'CONTAINS(LCASE(STR({var})), "{escape_string(f.text.lower())}")'
    if isinstance(f, Match):
        return f'STR({var}) = "{escape_string(f.text)}"'
    if isinstance(f, Regex):
        return f'REGEX(STR({var}), "{escape_string(f.pattern)}", "{f.flags}")'
    if isinstance(f, Range):
        parts = []
        if f.min is not None:
            parts.append(f"{var} >= {render_literal(f.min, datatype, prefixes)}")
        if f.max is not None:
            parts.append(f"{var} <= {render_literal(f.max, datatype, prefixes)}")
        return "(" + " && ".join(parts) + ")"
    return f"{var} = {render_literal(f.value, datatype, prefixes)}"


def _offset(var: str, center: float) -> str:
    """``(?var - c)`` with the sign folded in so no literal is negative."""
    if center < 0:
        return f"(?{var} + {format_number(-center)})"
    return f"(?{var} - {format_number(center)})"


def render_circle(circle, lat_var: str, lon_var: str) -> str:
    """Planar membership test for one circle.

    Equirectangular approximation: degree offsets scaled to meters with
    the longitude scale taken at the circle's center latitude, compared
    squared against the squared radius. Accurate to well under 1% of the
    radius for radii up to 50 km at latitudes up to 70 degrees.
    """
    k_lat = EARTH_RADIUS_METERS * math.pi / 180.0
    k_lon = k_lat * math.cos(math.radians(circle.center_lat_deg))
    lat_term = f"({_offset(lat_var, circle.center_lat_deg)} * {format_number(k_lat)})"
    lon_term = f"({_offset(lon_var, circle.center_lon_deg)} * {format_number(k_lon)})"
    rr = format_number(circle.radius_meters * circle.radius_meters)
    return f"({lat_term} * {lat_term} + {lon_term} * {lon_term} <= {rr})"


def render_geo(g: GeoFilterSet, lat_var: str, lon_var: str) -> str:
    if not g.circles:
        raise EmptyGeoSet("geo filter set has no circles")
    joiner = " || " if g.combinator == GeoCombinator.UNION else " && "
    parts = [render_circle(c, lat_var, lon_var) for c in g.circles]
    if len(parts) == 1:
        return parts[0]
    return "(" + joiner.join(parts) + ")"


def render_date_window(window: DateWindow, time_var: str, prefixes: PrefixTracker) -> str:
    parts = []
    if window.start is not None:
        parts.append(f"?{time_var} >= {render_literal(window.start, XsdType.DATE_TIME, prefixes)}")
    if window.end is not None:
        parts.append(f"?{time_var} <= {render_literal(window.end, XsdType.DATE_TIME, prefixes)}")
    return "(" + " && ".join(parts) + ")"


# --- Whole-query compilation ---------------------------------------------


def _property_block(
    vars_: VarTable, prefixes: PrefixTracker, i: int, j: int, sensor_iri: str, binding: PropertyBinding, indent: str
) -> list[str]:
    pad = indent + "  "
    return [
        f"{indent}?{vars_.obs(i, j)} sosa:madeBySensor {prefixes.term(sensor_iri)} ;",
        f"{pad}sosa:observedProperty {prefixes.term(binding.property_iri)} ;",
        f"{pad}sosa:hasSimpleResult ?{vars_.value(i, j)} ;",
        f"{pad}sosa:resultTime ?{vars_.time(i)} .",
    ]


def _find_property_index(sensor, property_iri: str):
    for j, binding in enumerate(sensor.properties):
        if binding.property_iri == property_iri:
            return j
    return None


def compile_query(q: AbstractQuery, options: CompileOptions = DEFAULT_OPTIONS) -> SparqlQueryText:
    """Compile a valid document to SPARQL SELECT text.

    Raises ValidationFailed when the document has fatal diagnostics and
    GeoWithoutCoordinates when a geo filter is present but some selected
    sensor does not bind the configured latitude/longitude properties.
    """
    diagnostics = [d for d in validate_query(q) if d.severity == "fatal"]
    if diagnostics:
        raise ValidationFailed(diagnostics)

    geo_indexes: list[tuple[int, int]] = []
    if q.geo.circles:
        for i, sensor in enumerate(q.sensors):
            lat_j = _find_property_index(sensor, options.lat_property_iri)
            lon_j = _find_property_index(sensor, options.lon_property_iri)
            if lat_j is None or lon_j is None:
                raise GeoWithoutCoordinates(
                    f"sensor {sensor.sensor_iri} does not bind the latitude/longitude properties"
                )
            geo_indexes.append((lat_j, lon_j))

    prefixes = PrefixTracker()
    prefixes.term(SOSA + "madeBySensor")  # sosa is used by every pattern group
    vars_ = allocate_vars(q)
    multi = len(q.sensors) > 1

    groups: list[list[str]] = []
    for i, sensor in enumerate(q.sensors):
        indent = "    " if multi else "  "
        lines: list[str] = []
        if multi:
            label_pred = prefixes.term(RDFS + "label")
            lines.append(f"{indent}{prefixes.term(sensor.sensor_iri)} {label_pred} ?{vars_.sensor_label()} .")
        required = [(j, b) for j, b in enumerate(sensor.properties) if not b.optional]
        optionals = [(j, b) for j, b in enumerate(sensor.properties) if b.optional]
        for j, binding in required:
            lines.extend(_property_block(vars_, prefixes, i, j, sensor.sensor_iri, binding, indent))
        for j, binding in optionals:
            lines.append(f"{indent}OPTIONAL {{")
            lines.extend(
                _property_block(vars_, prefixes, i, j, sensor.sensor_iri, binding, indent + "  ")
            )
            for f in binding.filters:
                expr = render_filter(f, vars_.value(i, j), binding.datatype, prefixes)
                lines.append(f"{indent}  FILTER({expr})")
            lines.append(f"{indent}}}")
        for j, binding in required:
            for f in binding.filters:
                expr = render_filter(f, vars_.value(i, j), binding.datatype, prefixes)
                lines.append(f"{indent}FILTER({expr})")
        if q.geo.circles:
            lat_j, lon_j = geo_indexes[i]
            expr = render_geo(q.geo, vars_.value(i, lat_j), vars_.value(i, lon_j))
            lines.append(f"{indent}FILTER({expr})")
        if q.date_window is not None:
            expr = render_date_window(q.date_window, vars_.time(i), prefixes)
            lines.append(f"{indent}FILTER({expr})")
        groups.append(lines)

    projected: list[str] = []
    if multi:
        projected.append(f"?{vars_.sensor_label()}")
    for i, sensor in enumerate(q.sensors):
        for j, binding in enumerate(sensor.properties):
            if not binding.hidden:
                projected.append(f"?{vars_.value(i, j)}")
        projected.append(f"?{vars_.time(i)}")

    body: list[str] = ["WHERE {"]
    if multi:
        for g, lines in enumerate(groups):
            if g > 0:
                body.append("  UNION")
            body.append("  {")
            body.extend(lines)
            body.append("  }")
    else:
        body.extend(groups[0])
    body.append("}")

    text = (
        prefixes.header()
        + "SELECT "
        + " ".join(projected)
        + "\n"
        + "\n".join(body)
        + "\n"
        + f"ORDER BY DESC(?{vars_.time(0)})\n"
        + f"LIMIT {q.limit}\n"
    )
    return SparqlQueryText(text, prefixes.used_in_order())
