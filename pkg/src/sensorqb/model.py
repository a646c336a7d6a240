"""The abstract observation-query document.

This module owns the canonical JSON form of the document (see
docs/schema.md), its validation rules, and the pure mutation operations
that the chat layer and the UI apply to it. Everything here is an
immutable value; all operations return new documents.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Union

from .errors import DocumentSyntaxError, InvariantViolation, SchemaError, TargetNotFound
from .rdf import parse_datetime_lexical

SCHEMA_VERSION = "1"
DEFAULT_LIMIT = 1000
MAX_RADIUS_METERS = 20_015_087.0  # half Earth circumference

Scalar = Union[int, float, bool, str]

_ABSOLUTE_IRI_RE = re.compile(r'^[A-Za-z][A-Za-z0-9+.\-]*:[^\s<>"{}|\\^`]*$')
_TIMESTAMP_RE = re.compile(r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}(\.\d+)?Z$")
_REGEX_FLAGS = set("ismx")


def is_absolute_iri(text: str) -> bool:
    return bool(_ABSOLUTE_IRI_RE.match(text))


def is_canonical_timestamp(text: str) -> bool:
    """ISO-8601 UTC with Z suffix and at least second precision."""
    return bool(_TIMESTAMP_RE.match(text))


def local_name(iri: str) -> str:
    """Fragment, or last path segment, of an IRI; display fallback."""
    if "#" in iri:
        tail = iri.rsplit("#", 1)[1]
    else:
        tail = iri.rstrip("/").rsplit("/", 1)[-1]
    return tail or iri


class XsdType(Enum):
    STRING = "string"
    INTEGER = "integer"
    DECIMAL = "decimal"
    DOUBLE = "double"
    DATE_TIME = "dateTime"
    BOOLEAN = "boolean"
    IRI = "iri"


class GeoCombinator(Enum):
    UNION = "union"
    INTERSECTION = "intersection"


# --- Filters ------------------------------------------------------------


@dataclass(frozen=True)
class Contain:
    """Case-insensitive substring match on the lexical form."""

    text: str


@dataclass(frozen=True)
class Match:
    """Case-sensitive exact equality on the lexical form."""

    text: str


@dataclass(frozen=True)
class Regex:
    pattern: str
    flags: str = ""

    def __post_init__(self):
        bad = set(self.flags) - _REGEX_FLAGS
        if bad:
            raise ValueError(f"unsupported regex flags: {''.join(sorted(bad))}")


@dataclass(frozen=True)
class Range:
    """Inclusive range; at least one bound must be present."""

    min: Optional[Scalar] = None
    max: Optional[Scalar] = None

    def __post_init__(self):
        if self.min is None and self.max is None:
            raise ValueError("range filter needs at least one bound")


@dataclass(frozen=True)
class Equals:
    value: Scalar


FilterSpec = Union[Contain, Match, Regex, Range, Equals]

# Which filter variants each datatype admits. Validation and the UI's
# filter menus are both driven by this table.
FILTER_LEGALITY: dict[XsdType, tuple[type, ...]] = {
    XsdType.STRING: (Contain, Match, Regex, Equals),
    XsdType.INTEGER: (Range, Equals),
    XsdType.DECIMAL: (Range, Equals),
    XsdType.DOUBLE: (Range, Equals),
    XsdType.DATE_TIME: (Range, Equals),
    XsdType.BOOLEAN: (Equals,),
    XsdType.IRI: (Equals, Match),
}


def filter_is_legal(f: FilterSpec, datatype: XsdType) -> bool:
    return isinstance(f, FILTER_LEGALITY[datatype])


# --- Geo and date -------------------------------------------------------


@dataclass(frozen=True)
class GeoCircle:
    center_lat_deg: float
    center_lon_deg: float
    radius_meters: float

    def __post_init__(self):
        if not -90.0 <= self.center_lat_deg <= 90.0:
            raise ValueError("latitude out of [-90, 90]")
        if not -180.0 <= self.center_lon_deg <= 180.0:
            raise ValueError("longitude out of [-180, 180]")
        if not 0.0 < self.radius_meters <= MAX_RADIUS_METERS:
            raise ValueError(f"radius must be in (0, {MAX_RADIUS_METERS}] meters")


@dataclass(frozen=True)
class GeoFilterSet:
    circles: tuple[GeoCircle, ...] = ()
    combinator: GeoCombinator = GeoCombinator.UNION


@dataclass(frozen=True)
class DateWindow:
    start: Optional[str] = None
    end: Optional[str] = None

    def __post_init__(self):
        if self.start is None and self.end is None:
            raise ValueError("date window needs at least one bound")
        for bound in (self.start, self.end):
            if bound is not None and not is_canonical_timestamp(bound):
                raise ValueError(f"timestamp {bound!r} is not ISO-8601 UTC with Z suffix")
        if self.start is not None and self.end is not None:
            if parse_datetime_lexical(self.start) > parse_datetime_lexical(self.end):
                raise ValueError("date window start is after end")


# --- Document -----------------------------------------------------------


@dataclass(frozen=True)
class PropertyBinding:
    property_iri: str
    label: str
    datatype: XsdType
    hidden: bool = False
    optional: bool = False
    filters: tuple[FilterSpec, ...] = ()


@dataclass(frozen=True)
class SensorSelection:
    sensor_iri: str
    label: str
    properties: tuple[PropertyBinding, ...] = ()


@dataclass(frozen=True)
class AbstractQuery:
    sensors: tuple[SensorSelection, ...] = ()
    geo: GeoFilterSet = field(default_factory=GeoFilterSet)
    date_window: Optional[DateWindow] = None
    limit: int = DEFAULT_LIMIT
    version: str = SCHEMA_VERSION


def empty_query(limit: int = DEFAULT_LIMIT) -> AbstractQuery:
    return AbstractQuery(limit=limit)


# --- Validation ---------------------------------------------------------

FATAL = "fatal"
WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    path: str
    message: str

    def __str__(self):
        return f"{self.severity} at {self.path}: {self.message}"


def has_fatals(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity == FATAL for d in diagnostics)


def validate_query(q: AbstractQuery) -> list[Diagnostic]:
    """Compilability diagnostics. An empty list means the document compiles."""
    out: list[Diagnostic] = []
    if not q.sensors:
        out.append(Diagnostic(FATAL, "sensors", "at least one sensor must be selected"))
    seen_sensors: set[str] = set()
    for i, sensor in enumerate(q.sensors):
        spath = f"sensors[{i}]"
        if sensor.sensor_iri in seen_sensors:
            out.append(Diagnostic(WARNING, spath, "sensor selected more than once"))
        seen_sensors.add(sensor.sensor_iri)
        if not sensor.properties:
            out.append(
                Diagnostic(FATAL, f"{spath}.properties", "sensor has no selected properties")
            )
        seen_props: set[str] = set()
        for j, binding in enumerate(sensor.properties):
            ppath = f"{spath}.properties[{j}]"
            if binding.property_iri in seen_props:
                out.append(Diagnostic(FATAL, ppath, "duplicate property for this sensor"))
            seen_props.add(binding.property_iri)
            for k, f in enumerate(binding.filters):
                fpath = f"{ppath}.filters[{k}]"
                if not filter_is_legal(f, binding.datatype):
                    out.append(
                        Diagnostic(
                            FATAL,
                            fpath,
                            f"filter {type(f).__name__} illegal for datatype "
                            f"{binding.datatype.value}",
                        )
                    )
                    continue
                out.extend(_check_filter_values(f, binding.datatype, fpath))
    return out


def _scalar_fits(value: Scalar, datatype: XsdType) -> Optional[str]:
    if datatype in (XsdType.INTEGER,):
        if isinstance(value, bool) or not isinstance(value, int):
            return "expected an integer"
    elif datatype in (XsdType.DECIMAL, XsdType.DOUBLE):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            return "expected a number"
    elif datatype == XsdType.DATE_TIME:
        if not isinstance(value, str) or not is_canonical_timestamp(value):
            return "expected an ISO-8601 UTC timestamp with Z suffix"
    elif datatype == XsdType.BOOLEAN:
        if not isinstance(value, bool):
            return "expected a boolean"
    elif datatype == XsdType.IRI:
        if not isinstance(value, str) or not is_absolute_iri(value):
            return "expected an absolute IRI"
    else:
        if not isinstance(value, str):
            return "expected a string"
    return None


def _range_order_ok(lo: Scalar, hi: Scalar, datatype: XsdType) -> bool:
    if datatype == XsdType.DATE_TIME:
        return parse_datetime_lexical(lo) <= parse_datetime_lexical(hi)
    return lo <= hi


def _check_filter_values(f: FilterSpec, datatype: XsdType, path: str) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    if isinstance(f, Regex):
        try:
            re.compile(f.pattern)
        except re.error as exc:
            out.append(Diagnostic(FATAL, path, f"invalid regex pattern: {exc}"))
    elif isinstance(f, Range):
        for name, bound in (("min", f.min), ("max", f.max)):
            if bound is None:
                continue
            problem = _scalar_fits(bound, datatype)
            if problem:
                out.append(Diagnostic(FATAL, f"{path}.{name}", problem))
                return out
        if f.min is not None and f.max is not None and not _range_order_ok(f.min, f.max, datatype):
            out.append(Diagnostic(FATAL, path, "range min is greater than max"))
    elif isinstance(f, Equals):
        problem = _scalar_fits(f.value, datatype)
        if problem:
            out.append(Diagnostic(FATAL, f"{path}.value", problem))
    return out


# --- Canonical serialization --------------------------------------------


def _filter_to_obj(f: FilterSpec) -> dict:
    if isinstance(f, Contain):
        return {"type": "contain", "text": f.text}
    if isinstance(f, Match):
        return {"type": "match", "text": f.text}
    if isinstance(f, Regex):
        return {"type": "regex", "pattern": f.pattern, "flags": f.flags}
    if isinstance(f, Range):
        obj: dict = {"type": "range"}
        if f.min is not None:
            obj["min"] = f.min
        if f.max is not None:
            obj["max"] = f.max
        return obj
    return {"type": "equals", "value": f.value}


def query_to_obj(q: AbstractQuery) -> dict:
    """Document as plain JSON data with canonical key order."""
    obj: dict = {
        "version": q.version,
        "limit": q.limit,
        "sensors": [
            {
                "sensorIri": s.sensor_iri,
                "label": s.label,
                "properties": [
                    {
                        "propertyIri": p.property_iri,
                        "label": p.label,
                        "datatype": p.datatype.value,
                        "hidden": p.hidden,
                        "optional": p.optional,
                        "filters": [_filter_to_obj(f) for f in p.filters],
                    }
                    for p in s.properties
                ],
            }
            for s in q.sensors
        ],
        "geo": {
            "circles": [
                {
                    "centerLatDeg": c.center_lat_deg,
                    "centerLonDeg": c.center_lon_deg,
                    "radiusMeters": c.radius_meters,
                }
                for c in q.geo.circles
            ],
            "combinator": q.geo.combinator.value,
        },
    }
    if q.date_window is not None:
        window: dict = {}
        if q.date_window.start is not None:
            window["start"] = q.date_window.start
        if q.date_window.end is not None:
            window["end"] = q.date_window.end
        obj["dateWindow"] = window
    return obj


def serialize_query(q: AbstractQuery) -> str:
    """Canonical text form: fixed key order, 2-space indent, trailing newline.

    Equal documents always produce identical bytes.
    """
    return json.dumps(query_to_obj(q), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


# --- Strict parsing -----------------------------------------------------


class _Reader:
    """Walks parsed JSON with path tracking and strict key checking."""

    def __init__(self, obj, path: str):
        if not isinstance(obj, dict):
            raise SchemaError(path, "expected an object")
        self.obj = obj
        self.path = path
        self.seen: set[str] = set()

    def sub(self, key: str):
        return f"{self.path}.{key}" if self.path else key

    def take(self, key: str, required: bool = True):
        self.seen.add(key)
        if key not in self.obj:
            if required:
                raise SchemaError(self.sub(key), "missing required field")
            return None
        return self.obj[key]

    def finish(self):
        unknown = set(self.obj) - self.seen
        if unknown:
            raise SchemaError(self.sub(sorted(unknown)[0]), "unknown field")


def _expect_str(value, path: str) -> str:
    if not isinstance(value, str):
        raise SchemaError(path, "expected a string")
    return value


def _expect_bool(value, path: str) -> bool:
    if not isinstance(value, bool):
        raise SchemaError(path, "expected a boolean")
    return value


def _expect_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(path, "expected an integer")
    return value


def _expect_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(path, "expected a number")
    return float(value)


def _expect_list(value, path: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(path, "expected an array")
    return value


def _expect_scalar(value, path: str) -> Scalar:
    if not isinstance(value, (str, bool, int, float)):
        raise SchemaError(path, "expected a string, number, or boolean")
    return value


def _expect_iri(value, path: str) -> str:
    text = _expect_str(value, path)
    if not is_absolute_iri(text):
        raise SchemaError(path, "expected an absolute IRI")
    return text


def _parse_filter(obj, path: str) -> FilterSpec:
    reader = _Reader(obj, path)
    kind = _expect_str(reader.take("type"), reader.sub("type"))
    try:
        if kind == "contain":
            result: FilterSpec = Contain(_expect_str(reader.take("text"), reader.sub("text")))
        elif kind == "match":
            result = Match(_expect_str(reader.take("text"), reader.sub("text")))
        elif kind == "regex":
            pattern = _expect_str(reader.take("pattern"), reader.sub("pattern"))
            raw_flags = reader.take("flags", required=False)
            flags = "" if raw_flags is None else _expect_str(raw_flags, reader.sub("flags"))
            result = Regex(pattern, flags)
        elif kind == "range":
            raw_min = reader.take("min", required=False)
            raw_max = reader.take("max", required=False)
            lo = None if raw_min is None else _expect_scalar(raw_min, reader.sub("min"))
            hi = None if raw_max is None else _expect_scalar(raw_max, reader.sub("max"))
            result = Range(lo, hi)
        elif kind == "equals":
            result = Equals(_expect_scalar(reader.take("value"), reader.sub("value")))
        else:
            raise SchemaError(reader.sub("type"), f"unknown filter type {kind!r}")
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from None
    reader.finish()
    return result


def _parse_property(obj, path: str) -> PropertyBinding:
    reader = _Reader(obj, path)
    property_iri = _expect_iri(reader.take("propertyIri"), reader.sub("propertyIri"))
    raw_label = reader.take("label", required=False)
    label = local_name(property_iri) if raw_label is None else _expect_str(raw_label, reader.sub("label"))
    raw_type = _expect_str(reader.take("datatype"), reader.sub("datatype"))
    try:
        datatype = XsdType(raw_type)
    except ValueError:
        raise SchemaError(reader.sub("datatype"), f"unknown datatype {raw_type!r}") from None
    raw_hidden = reader.take("hidden", required=False)
    hidden = False if raw_hidden is None else _expect_bool(raw_hidden, reader.sub("hidden"))
    raw_optional = reader.take("optional", required=False)
    optional = False if raw_optional is None else _expect_bool(raw_optional, reader.sub("optional"))
    raw_filters = reader.take("filters", required=False)
    filters = tuple(
        _parse_filter(f, f"{reader.sub('filters')}[{k}]")
        for k, f in enumerate(_expect_list(raw_filters, reader.sub("filters")) if raw_filters is not None else [])
    )
    reader.finish()
    return PropertyBinding(property_iri, label, datatype, hidden, optional, filters)


def _parse_sensor(obj, path: str) -> SensorSelection:
    reader = _Reader(obj, path)
    sensor_iri = _expect_iri(reader.take("sensorIri"), reader.sub("sensorIri"))
    raw_label = reader.take("label", required=False)
    label = local_name(sensor_iri) if raw_label is None else _expect_str(raw_label, reader.sub("label"))
    raw_props = _expect_list(reader.take("properties"), reader.sub("properties"))
    properties = tuple(
        _parse_property(p, f"{reader.sub('properties')}[{j}]") for j, p in enumerate(raw_props)
    )
    reader.finish()
    return SensorSelection(sensor_iri, label, properties)


def _parse_geo(obj, path: str) -> GeoFilterSet:
    reader = _Reader(obj, path)
    raw_circles = reader.take("circles", required=False)
    circles = []
    for i, raw in enumerate(_expect_list(raw_circles, reader.sub("circles")) if raw_circles is not None else []):
        cpath = f"{reader.sub('circles')}[{i}]"
        creader = _Reader(raw, cpath)
        lat = _expect_number(creader.take("centerLatDeg"), creader.sub("centerLatDeg"))
        lon = _expect_number(creader.take("centerLonDeg"), creader.sub("centerLonDeg"))
        radius = _expect_number(creader.take("radiusMeters"), creader.sub("radiusMeters"))
        creader.finish()
        try:
            circles.append(GeoCircle(lat, lon, radius))
        except ValueError as exc:
            raise SchemaError(cpath, str(exc)) from None
    raw_comb = reader.take("combinator", required=False)
    if raw_comb is None:
        combinator = GeoCombinator.UNION
    else:
        text = _expect_str(raw_comb, reader.sub("combinator"))
        try:
            combinator = GeoCombinator(text)
        except ValueError:
            raise SchemaError(reader.sub("combinator"), f"unknown combinator {text!r}") from None
    reader.finish()
    return GeoFilterSet(tuple(circles), combinator)


def _reject_nonfinite(token: str):
    raise DocumentSyntaxError(f"non-finite number {token!r} is not allowed")


def parse_query(text: Union[str, bytes], default_limit: Optional[int] = None) -> AbstractQuery:
    """Parse and strictly check a query document.

    ``default_limit`` lets API boundaries accept documents without an
    explicit limit; plain parsing requires one.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        raw = json.loads(text, parse_constant=_reject_nonfinite)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(str(exc)) from None
    return query_from_obj(raw, default_limit=default_limit)


def query_from_obj(raw, default_limit: Optional[int] = None) -> AbstractQuery:
    """Strictly check already-parsed JSON data and build the document."""
    reader = _Reader(raw, "")
    raw_version = reader.take("version", required=False)
    if raw_version is not None:
        version = _expect_str(raw_version, "version")
        if version != SCHEMA_VERSION:
            raise SchemaError("version", f"unsupported schema version {version!r}")
    raw_limit = reader.take("limit", required=default_limit is None)
    if raw_limit is None:
        limit = default_limit
    else:
        limit = _expect_int(raw_limit, "limit")
    if limit < 1:
        raise SchemaError("limit", "limit must be at least 1")
    raw_sensors = _expect_list(reader.take("sensors"), "sensors")
    sensors = tuple(_parse_sensor(s, f"sensors[{i}]") for i, s in enumerate(raw_sensors))
    raw_geo = reader.take("geo", required=False)
    geo = _parse_geo(raw_geo, "geo") if raw_geo is not None else GeoFilterSet()
    raw_window = reader.take("dateWindow", required=False)
    window = None
    if raw_window is not None:
        wreader = _Reader(raw_window, "dateWindow")
        raw_start = wreader.take("start", required=False)
        raw_end = wreader.take("end", required=False)
        start = None if raw_start is None else _expect_str(raw_start, wreader.sub("start"))
        end = None if raw_end is None else _expect_str(raw_end, wreader.sub("end"))
        wreader.finish()
        try:
            window = DateWindow(start, end)
        except ValueError as exc:
            raise SchemaError("dateWindow", str(exc)) from None
    reader.finish()
    return AbstractQuery(sensors, geo, window, limit)


# --- Mutations ----------------------------------------------------------


@dataclass(frozen=True)
class SelectSensor:
    sensor_iri: str
    property_iris: tuple[str, ...]


@dataclass(frozen=True)
class DeselectSensor:
    sensor_iri: str


@dataclass(frozen=True)
class AddFilter:
    sensor_iri: str
    property_iri: str
    filter: FilterSpec


@dataclass(frozen=True)
class ClearFilters:
    sensor_iri: str
    property_iri: str


@dataclass(frozen=True)
class SetDateWindow:
    window: DateWindow


@dataclass(frozen=True)
class ClearDateWindow:
    pass


@dataclass(frozen=True)
class AddGeoCircle:
    circle: GeoCircle


@dataclass(frozen=True)
class SetGeoCombinator:
    combinator: GeoCombinator


@dataclass(frozen=True)
class SetHidden:
    sensor_iri: str
    property_iri: str
    hidden: bool


@dataclass(frozen=True)
class SetOptional:
    sensor_iri: str
    property_iri: str
    optional: bool


@dataclass(frozen=True)
class SetLimit:
    limit: int


QueryMutation = Union[
    SelectSensor,
    DeselectSensor,
    AddFilter,
    ClearFilters,
    SetDateWindow,
    ClearDateWindow,
    AddGeoCircle,
    SetGeoCombinator,
    SetHidden,
    SetOptional,
    SetLimit,
]


def _describe_property(property_iri: str, catalog) -> PropertyBinding:
    if catalog is not None:
        found = catalog.find_property(property_iri)
        if found is not None:
            return PropertyBinding(property_iri, found.label, found.datatype)
    return PropertyBinding(property_iri, local_name(property_iri), XsdType.STRING)


def _replace_binding(q: AbstractQuery, sensor_iri: str, property_iri: str, update) -> AbstractQuery:
    for i, sensor in enumerate(q.sensors):
        if sensor.sensor_iri != sensor_iri:
            continue
        for j, binding in enumerate(sensor.properties):
            if binding.property_iri != property_iri:
                continue
            new_props = list(sensor.properties)
            new_props[j] = update(binding)
            new_sensors = list(q.sensors)
            new_sensors[i] = replace(sensor, properties=tuple(new_props))
            return replace(q, sensors=tuple(new_sensors))
        raise TargetNotFound(f"property {property_iri} is not selected for {sensor_iri}")
    raise TargetNotFound(f"sensor {sensor_iri} is not selected")


def apply_mutation(q: AbstractQuery, m: QueryMutation, catalog=None) -> AbstractQuery:
    """Apply one mutation, returning a new document.

    ``catalog`` (a discovery SensorCatalog) supplies labels and datatypes
    for newly selected sensors; without it, labels fall back to IRI local
    names and datatypes to string.

    The result is re-validated: any fatal diagnostic other than the
    empty-selection ones (which describe the legitimate pristine state)
    raises InvariantViolation.
    """
    result = _apply(q, m, catalog)
    for diag in validate_query(result):
        if diag.severity != FATAL:
            continue
        if diag.path == "sensors" or diag.path.endswith(".properties"):
            continue
        raise InvariantViolation(str(diag))
    return result


def _apply(q: AbstractQuery, m: QueryMutation, catalog) -> AbstractQuery:
    if isinstance(m, SelectSensor):
        label = local_name(m.sensor_iri)
        if catalog is not None:
            descriptor = catalog.find_sensor(m.sensor_iri)
            if descriptor is not None:
                label = descriptor.label
        selection = SensorSelection(
            m.sensor_iri,
            label,
            tuple(_describe_property(p, catalog) for p in m.property_iris),
        )
        sensors = list(q.sensors)
        for i, existing in enumerate(sensors):
            if existing.sensor_iri == m.sensor_iri:
                sensors[i] = selection
                return replace(q, sensors=tuple(sensors))
        sensors.append(selection)
        return replace(q, sensors=tuple(sensors))
    if isinstance(m, DeselectSensor):
        sensors = tuple(s for s in q.sensors if s.sensor_iri != m.sensor_iri)
        return replace(q, sensors=sensors)
    if isinstance(m, AddFilter):
        return _replace_binding(
            q, m.sensor_iri, m.property_iri, lambda b: replace(b, filters=b.filters + (m.filter,))
        )
    if isinstance(m, ClearFilters):
        return _replace_binding(q, m.sensor_iri, m.property_iri, lambda b: replace(b, filters=()))
    if isinstance(m, SetDateWindow):
        return replace(q, date_window=m.window)
    if isinstance(m, ClearDateWindow):
        return replace(q, date_window=None)
    if isinstance(m, AddGeoCircle):
        return replace(q, geo=replace(q.geo, circles=q.geo.circles + (m.circle,)))
    if isinstance(m, SetGeoCombinator):
        return replace(q, geo=replace(q.geo, combinator=m.combinator))
    if isinstance(m, SetHidden):
        return _replace_binding(
            q, m.sensor_iri, m.property_iri, lambda b: replace(b, hidden=m.hidden)
        )
    if isinstance(m, SetOptional):
        return _replace_binding(
            q, m.sensor_iri, m.property_iri, lambda b: replace(b, optional=m.optional)
        )
    if isinstance(m, SetLimit):
        if m.limit < 1:
            raise InvariantViolation("limit must be at least 1")
        return replace(q, limit=m.limit)
    raise TypeError(f"unknown mutation {type(m).__name__}")
