"""Direct evaluation of query documents over in-memory graphs.

This is the differential-testing counterpart of compile + parse +
evaluate: it derives observation rows straight from the document and the
graph, applying the filter, geo, date, optional, hidden, order, and
limit rules by their definitions rather than through generated SPARQL.
Discovery order intentionally mirrors the evaluator's (sorted triples,
nested-loop joins, stable ordering) so the two routes agree row for row
even when LIMIT cuts a tie.
"""

from __future__ import annotations

import math
import re
from typing import Optional

from .compiler import DEFAULT_OPTIONS, EARTH_RADIUS_METERS, CompileOptions
from .errors import GeoWithoutCoordinates, ValidationFailed
from .model import (
    AbstractQuery,
    Contain,
    FilterSpec,
    GeoCombinator,
    GeoFilterSet,
    Match,
    Range,
    Regex,
    XsdType,
    validate_query,
)
from .rdf import (
    RDFS_LABEL,
    SOSA_HAS_SIMPLE_RESULT,
    SOSA_MADE_BY_SENSOR,
    SOSA_OBSERVED_PROPERTY,
    SOSA_RESULT_TIME,
    XSD_STRING,
    Graph,
    Iri,
    Literal,
    Term,
    boolean_value,
    datetime_value,
    numeric_value,
    order_key,
    parse_datetime_lexical,
)
from .table import Cell, ResultTable

_REGEX_FLAG_MAP = {"i": re.IGNORECASE, "s": re.DOTALL, "m": re.MULTILINE, "x": re.VERBOSE}


def _lexical_of(term: Term) -> Optional[str]:
    """STR() analogue: blank nodes have no string form."""
    if isinstance(term, Iri):
        return term.value
    if isinstance(term, Literal):
        return term.lexical
    return None


def apply_filter_direct(f: FilterSpec, term: Optional[Term], datatype: XsdType) -> bool:
    """Whether a bound value satisfies a filter; unbound never does."""
    if term is None:
        return False
    if isinstance(f, Contain):
        text = _lexical_of(term)
        return text is not None and f.text.lower() in text.lower()
    if isinstance(f, Match):
        return _lexical_of(term) == f.text
    if isinstance(f, Regex):
        text = _lexical_of(term)
        if text is None:
            return False
        flags = 0
        for ch in f.flags:
            flags |= _REGEX_FLAG_MAP[ch]
        try:
            return re.search(f.pattern, text, flags) is not None
        except re.error:
            return False
    if isinstance(f, Range):
        if datatype == XsdType.DATE_TIME:
            moment = datetime_value(term)
            if moment is None:
                return False
            if f.min is not None and moment < parse_datetime_lexical(f.min):
                return False
            if f.max is not None and moment > parse_datetime_lexical(f.max):
                return False
            return True
        number = numeric_value(term)
        if number is None:
            return False
        if f.min is not None and number < f.min:
            return False
        if f.max is not None and number > f.max:
            return False
        return True
    # Equals
    if datatype in (XsdType.INTEGER, XsdType.DECIMAL, XsdType.DOUBLE):
        number = numeric_value(term)
        return number is not None and number == f.value
    if datatype == XsdType.DATE_TIME:
        moment = datetime_value(term)
        return moment is not None and moment == parse_datetime_lexical(f.value)
    if datatype == XsdType.BOOLEAN:
        truth = boolean_value(term)
        return truth is not None and truth == f.value
    if datatype == XsdType.IRI:
        return isinstance(term, Iri) and term.value == f.value
    return (
        isinstance(term, Literal)
        and term.datatype == XSD_STRING
        and term.lang is None
        and term.lexical == f.value
    )


def circle_contains(circle, lat: float, lon: float) -> bool:
    """Same equirectangular membership test the compiler emits."""
    k_lat = EARTH_RADIUS_METERS * math.pi / 180.0
    k_lon = k_lat * math.cos(math.radians(circle.center_lat_deg))
    a = (lat - circle.center_lat_deg) * k_lat
    b = (lon - circle.center_lon_deg) * k_lon
    return a * a + b * b <= circle.radius_meters * circle.radius_meters


def geo_passes(geo: GeoFilterSet, lat_term: Optional[Term], lon_term: Optional[Term]) -> bool:
    lat = numeric_value(lat_term) if lat_term is not None else None
    lon = numeric_value(lon_term) if lon_term is not None else None
    if lat is None or lon is None:
        return False
    results = (circle_contains(c, lat, lon) for c in geo.circles)
    if geo.combinator == GeoCombinator.UNION:
        return any(results)
    return all(results)


def _date_passes(window, time_term: Optional[Term]) -> bool:
    if time_term is None:
        return False
    moment = datetime_value(time_term)
    if moment is None:
        return False
    if window.start is not None and moment < parse_datetime_lexical(window.start):
        return False
    if window.end is not None and moment > parse_datetime_lexical(window.end):
        return False
    return True


def _extend_with_property(
    solutions: list[dict], graph: Graph, sensor_iri: str, j: int, property_iri: str
) -> list[dict]:
    """Join observation records for one property, sharing the time slot.

    Enumeration order matches the evaluator's pattern order: observation
    nodes by madeBySensor, then result values, then result times, each in
    the store's sorted order.
    """
    sensor_term = Iri(sensor_iri)
    property_term = Iri(property_iri)
    out = []
    for mu in solutions:
        bound_time = mu.get("time")
        for obs in graph.subjects(SOSA_MADE_BY_SENSOR, sensor_term):
            if not graph.has(obs, SOSA_OBSERVED_PROPERTY, property_term):
                continue
            for value in graph.objects(obs, SOSA_HAS_SIMPLE_RESULT):
                if bound_time is not None:
                    if graph.has(obs, SOSA_RESULT_TIME, bound_time):
                        out.append({**mu, j: value})
                else:
                    for time_term in graph.objects(obs, SOSA_RESULT_TIME):
                        out.append({**mu, j: value, "time": time_term})
    return out


def eval_direct(
    q: AbstractQuery, graph: Graph, options: CompileOptions = DEFAULT_OPTIONS
) -> ResultTable:
    """Evaluate a document's semantics directly over a graph."""
    diagnostics = [d for d in validate_query(q) if d.severity == "fatal"]
    if diagnostics:
        raise ValidationFailed(diagnostics)

    geo_indexes: list[Optional[tuple[int, int]]] = []
    if q.geo.circles:
        for sensor in q.sensors:
            lat_j = lon_j = None
            for j, binding in enumerate(sensor.properties):
                if binding.property_iri == options.lat_property_iri:
                    lat_j = j
                if binding.property_iri == options.lon_property_iri:
                    lon_j = j
            if lat_j is None or lon_j is None:
                raise GeoWithoutCoordinates(
                    f"sensor {sensor.sensor_iri} does not bind the latitude/longitude properties"
                )
            geo_indexes.append((lat_j, lon_j))

    multi = len(q.sensors) > 1

    columns: list[str] = []
    if multi:
        columns.append("sensor")
    for i, sensor in enumerate(q.sensors):
        for j, binding in enumerate(sensor.properties):
            if not binding.hidden:
                columns.append(f"v_{i}_{j}")
        columns.append(f"t_{i}")

    all_rows: list[tuple[Optional[Term], list[Cell]]] = []
    for i, sensor in enumerate(q.sensors):
        solutions: list[dict] = [{}]
        if multi:
            labels = graph.objects(Iri(sensor.sensor_iri), RDFS_LABEL)
            solutions = [{**mu, "label": lab} for mu in solutions for lab in labels]
        required = [(j, b) for j, b in enumerate(sensor.properties) if not b.optional]
        optionals = [(j, b) for j, b in enumerate(sensor.properties) if b.optional]
        for j, binding in required:
            solutions = _extend_with_property(solutions, graph, sensor.sensor_iri, j, binding.property_iri)
        for j, binding in optionals:
            extended = []
            for mu in solutions:
                matches = _extend_with_property([mu], graph, sensor.sensor_iri, j, binding.property_iri)
                matches = [
                    m
                    for m in matches
                    if all(apply_filter_direct(f, m[j], binding.datatype) for f in binding.filters)
                ]
                extended.extend(matches if matches else [mu])
            solutions = extended
        for j, binding in required:
            for f in binding.filters:
                solutions = [
                    mu for mu in solutions if apply_filter_direct(f, mu.get(j), binding.datatype)
                ]
        if q.geo.circles:
            lat_j, lon_j = geo_indexes[i]
            solutions = [
                mu for mu in solutions if geo_passes(q.geo, mu.get(lat_j), mu.get(lon_j))
            ]
        if q.date_window is not None:
            solutions = [mu for mu in solutions if _date_passes(q.date_window, mu.get("time"))]

        for mu in solutions:
            cells: list[Cell] = []
            if multi:
                cells.append(Cell.from_term(mu["label"]))
            for k, other in enumerate(q.sensors):
                for j, binding in enumerate(other.properties):
                    if binding.hidden:
                        continue
                    term = mu.get(j) if k == i else None
                    cells.append(Cell.from_term(term) if term is not None else Cell.unbound())
                if k == i and "time" in mu:
                    cells.append(Cell.from_term(mu["time"]))
                else:
                    cells.append(Cell.unbound())
            first_time = mu.get("time") if i == 0 else None
            all_rows.append((first_time, cells))

    ordered = sorted(all_rows, key=lambda pair: order_key(pair[0]), reverse=True)
    rows = [cells for _, cells in ordered[: q.limit]]
    return ResultTable(columns, rows)
