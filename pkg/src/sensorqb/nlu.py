"""Rule-based chat understanding: intents, entity linking, responses.

The pattern table is ordered and first-match-wins; matching is
case-insensitive and deterministic. Entity mentions are linked to
catalog sensors with normalized Levenshtein similarity. See
docs/nlu-patterns.md for the normative table.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .compiler import DEFAULT_OPTIONS, CompileOptions
from .discovery import SensorCatalog, SensorDescriptor
from .model import (
    AbstractQuery,
    AddGeoCircle,
    DateWindow,
    GeoCircle,
    QueryMutation,
    SelectSensor,
    SetDateWindow,
    SetLimit as SetLimitMutation,
    apply_mutation,
    has_fatals,
    validate_query,
)

CONFIDENCE_THRESHOLD = 0.5
ENTITY_THRESHOLD = 0.8


class Intent(Enum):
    LIST_SENSORS = "ListSensors"
    DESCRIBE_ENTITY = "DescribeEntity"
    LOCATE_ENTITY = "LocateEntity"
    SELECT_SENSOR = "SelectSensor"
    ADD_DATE_RANGE = "AddDateRange"
    ADD_GEO_NEAR = "AddGeoNear"
    SET_LIMIT = "SetLimit"
    EXECUTE_QUERY = "ExecuteQuery"
    RESET = "Reset"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class IntentFrame:
    intent: Intent
    slots: dict = field(default_factory=dict)
    confidence: float = 0.0


@dataclass(frozen=True)
class EntityMatch:
    mention: str
    sensor_iri: str
    score: float


@dataclass(frozen=True)
class ChatOutcome:
    reply: str
    mutations: tuple[QueryMutation, ...] = ()
    trigger_search: bool = False
    reset_query: bool = False


# Ordered pattern table; the first seven intents are the supported core,
# the last two are convenience extensions (docs/nlu-patterns.md).
_PATTERNS: tuple[tuple[Intent, re.Pattern], ...] = (
    (Intent.LIST_SENSORS, re.compile(r"^(what|which) .*sensors", re.IGNORECASE)),
    (Intent.DESCRIBE_ENTITY, re.compile(r"^what is (?P<entity>.+?)\??$", re.IGNORECASE)),
    (
        Intent.LOCATE_ENTITY,
        re.compile(r"^(where is|find|locate|show me) (?P<entity>.+?)\??$", re.IGNORECASE),
    ),
    (
        Intent.ADD_DATE_RANGE,
        re.compile(r"(between|from) (?P<start>.+) (and|to) (?P<end>.+)", re.IGNORECASE),
    ),
    (
        Intent.ADD_GEO_NEAR,
        re.compile(
            r"within (?P<radius>\d+(\.\d+)?) ?(?P<unit>km|m) of "
            r"(?P<lat>-?\d+(\.\d+)?),? ?(?P<lon>-?\d+(\.\d+)?)",
            re.IGNORECASE,
        ),
    ),
    (Intent.EXECUTE_QUERY, re.compile(r"^(run|search|execute|go)\b", re.IGNORECASE)),
    (Intent.RESET, re.compile(r"^(reset|clear|start over)\b", re.IGNORECASE)),
    (
        Intent.SELECT_SENSOR,
        re.compile(r"^(select|add|choose|use) (sensor )?(?P<entity>.+?)\??$", re.IGNORECASE),
    ),
    (Intent.SET_LIMIT, re.compile(r"^(set )?limit (to )?(?P<n>\d+)$", re.IGNORECASE)),
)

_DATE_ONLY_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")
_TIMESTAMP_RE = re.compile(r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z$")


def _parse_user_date(text: str, end_of_day: bool) -> Optional[str]:
    """Accepted date forms: YYYY-MM-DD or full Z-suffixed timestamps."""
    text = text.strip()
    if _TIMESTAMP_RE.match(text):
        return text
    if _DATE_ONLY_RE.match(text):
        return text + ("T23:59:59Z" if end_of_day else "T00:00:00Z")
    return None


def classify(utterance: str, catalog: SensorCatalog = None) -> IntentFrame:
    """Match an utterance against the pattern table, first match wins.

    The catalog is unused by the rule table; the parameter keeps the
    interface stable for richer classifier backends.
    """
    text = utterance.strip()
    if not text:
        return IntentFrame(Intent.UNKNOWN, {}, 0.0)
    for intent, pattern in _PATTERNS:
        m = pattern.search(text)
        if not m:
            continue
        slots = {k: v for k, v in m.groupdict().items() if v is not None}
        if intent == Intent.ADD_DATE_RANGE:
            start = _parse_user_date(slots.get("start", ""), end_of_day=False)
            end = _parse_user_date(slots.get("end", ""), end_of_day=True)
            if start is None or end is None:
                continue
            slots = {"start": slots["start"].strip(), "end": slots["end"].strip()}
        return IntentFrame(intent, slots, 1.0)
    return IntentFrame(Intent.UNKNOWN, {}, 0.0)


def levenshtein(a: str, b: str) -> int:
    if not a:
        return len(b)
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[-1]


def similarity(a: str, b: str) -> float:
    a, b = a.casefold(), b.casefold()
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def link_entity(
    mention: str, catalog: SensorCatalog, threshold: float = ENTITY_THRESHOLD
) -> Optional[EntityMatch]:
    """Best-scoring sensor for a mention, or None below the threshold.

    Ties break toward the lexicographically smallest sensor IRI.
    """
    best: Optional[EntityMatch] = None
    for sensor in catalog.sensors:
        score = similarity(mention, sensor.label)
        if best is None or score > best.score or (score == best.score and sensor.sensor_iri < best.sensor_iri):
            best = EntityMatch(mention, sensor.sensor_iri, score)
    if best is None or best.score < threshold:
        return None
    return best


def _coordinate_properties(
    sensor: SensorDescriptor, options: CompileOptions
) -> Optional[tuple[str, str]]:
    lat = lon = None
    for prop in sensor.properties:
        if prop.property_iri == options.lat_property_iri:
            lat = prop.property_iri
        elif prop.property_iri == options.lon_property_iri:
            lon = prop.property_iri
    if lat is None or lon is None:
        # fall back on display labels when the configured IRIs are absent
        for prop in sensor.properties:
            name = prop.label.casefold()
            if lat is None and name == "latitude":
                lat = prop.property_iri
            elif lon is None and name == "longitude":
                lon = prop.property_iri
    if lat is None or lon is None:
        return None
    return lat, lon


def _help_reply() -> str:
    return (
        "I can answer questions like \"What are the sensors?\", "
        "\"What is Aqeela?\" or \"Where is Aqeela?\". You can also say "
        "\"from 2020-01-01 to 2020-06-30\", \"within 25 km of 4.5, 114.5\", "
        "\"limit 50\", \"run\", or \"reset\"."
    )


def _apply_all(q: AbstractQuery, mutations, catalog) -> AbstractQuery:
    for m in mutations:
        q = apply_mutation(q, m, catalog)
    return q


def respond(
    frame: IntentFrame,
    q: AbstractQuery,
    catalog: SensorCatalog,
    options: CompileOptions = DEFAULT_OPTIONS,
) -> ChatOutcome:
    """Turn a classified utterance into a reply plus query mutations.

    Outcomes are pre-validated: applying the returned mutations in order
    never raises, and trigger_search is only set when the mutated query
    compiles.
    """
    intent = frame.intent
    if intent == Intent.LIST_SENSORS:
        if not catalog.sensors:
            return ChatOutcome("I could not find any sensors on the endpoint.")
        names = ", ".join(s.label for s in catalog.sensors)
        return ChatOutcome(f"The sensors are: {names}.")

    if intent == Intent.DESCRIBE_ENTITY:
        mention = frame.slots.get("entity", "")
        match = link_entity(mention, catalog)
        if match is None:
            return ChatOutcome(f"I don't know a sensor called \"{mention}\".")
        sensor = catalog.find_sensor(match.sensor_iri)
        props = ", ".join(f"{p.label} ({p.datatype.value})" for p in sensor.properties)
        return ChatOutcome(f"{sensor.label} is a sensor observing: {props}.")

    if intent == Intent.LOCATE_ENTITY:
        mention = frame.slots.get("entity", "")
        match = link_entity(mention, catalog)
        if match is None:
            return ChatOutcome(f"I don't know a sensor called \"{mention}\".")
        sensor = catalog.find_sensor(match.sensor_iri)
        coords = _coordinate_properties(sensor, options)
        if coords is None:
            return ChatOutcome(
                f"{sensor.label} has no latitude/longitude properties, so I cannot locate it."
            )
        mutations = (SelectSensor(sensor.sensor_iri, coords),)
        mutated = _apply_all(q, mutations, catalog)
        if has_fatals(validate_query(mutated)):
            return ChatOutcome(
                f"I selected {sensor.label} but the query is still incomplete.", mutations
            )
        return ChatOutcome(
            f"Searching for the last known locations of {sensor.label}.",
            mutations,
            trigger_search=True,
        )

    if intent == Intent.SELECT_SENSOR:
        mention = frame.slots.get("entity", "")
        match = link_entity(mention, catalog)
        if match is None:
            return ChatOutcome(f"I don't know a sensor called \"{mention}\".")
        sensor = catalog.find_sensor(match.sensor_iri)
        mutations = (
            SelectSensor(sensor.sensor_iri, tuple(p.property_iri for p in sensor.properties)),
        )
        return ChatOutcome(
            f"Selected {sensor.label} with {len(sensor.properties)} properties.", mutations
        )

    if intent == Intent.ADD_DATE_RANGE:
        start = _parse_user_date(frame.slots["start"], end_of_day=False)
        end = _parse_user_date(frame.slots["end"], end_of_day=True)
        try:
            window = DateWindow(start, end)
        except ValueError as exc:
            return ChatOutcome(f"That date range does not work: {exc}.")
        return ChatOutcome(
            f"Restricting results to {window.start} through {window.end}.",
            (SetDateWindow(window),),
        )

    if intent == Intent.ADD_GEO_NEAR:
        radius = float(frame.slots["radius"])
        if frame.slots.get("unit", "").lower() == "km":
            radius *= 1000.0
        try:
            circle = GeoCircle(float(frame.slots["lat"]), float(frame.slots["lon"]), radius)
        except ValueError as exc:
            return ChatOutcome(f"I cannot draw that circle: {exc}.")
        return ChatOutcome(
            f"Adding a nearby filter of {radius:g} m around "
            f"({circle.center_lat_deg:g}, {circle.center_lon_deg:g}).",
            (AddGeoCircle(circle),),
        )

    if intent == Intent.SET_LIMIT:
        n = int(frame.slots["n"])
        if n < 1:
            return ChatOutcome("The limit must be at least 1.")
        return ChatOutcome(f"Limiting results to {n} rows.", (SetLimitMutation(n),))

    if intent == Intent.EXECUTE_QUERY:
        if has_fatals(validate_query(q)):
            return ChatOutcome(
                "I cannot run the search yet: select at least one sensor first."
            )
        return ChatOutcome("Running your search now.", trigger_search=True)

    if intent == Intent.RESET:
        return ChatOutcome("Starting over with an empty query.", reset_query=True)

    return ChatOutcome(_help_reply())
