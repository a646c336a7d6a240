#!/usr/bin/env python3
"""Author the golden corpus (tests/golden/*.json + *.rq).

Each document is constructed here, serialized canonically, and compiled
with default options. The committed .rq files were hand-audited after
generation; regenerating must be a no-op unless the compiler contract
deliberately changes.
"""

import pathlib

from sensorqb.compiler import compile_query
from sensorqb.model import (
    AbstractQuery,
    Contain,
    DateWindow,
    Equals,
    GeoCircle,
    GeoCombinator,
    GeoFilterSet,
    Match,
    PropertyBinding,
    Range,
    Regex,
    SensorSelection,
    XsdType,
    serialize_query,
)

W = "http://example.org/wildlife/"


def prop(key, label, datatype, **kw):
    return PropertyBinding(W + "property/" + key, label, datatype, **kw)


def sensor(key, label, *properties):
    return SensorSelection(W + "sensor/" + key, label, tuple(properties))


LATITUDE = prop("latitude", "Latitude", XsdType.DOUBLE)
LONGITUDE = prop("longitude", "Longitude", XsdType.DOUBLE)
TEMPERATURE = prop("temperature", "Temperature", XsdType.DECIMAL)
SPEED = prop("speed", "Speed", XsdType.DOUBLE)

GOLDENS: dict[str, AbstractQuery] = {
    # The walkthrough scenario: one animal, a date window, one map circle,
    # coordinates hidden from the result table. Properties appear in the
    # label-sorted order discovery yields them, as the form builds them.
    "aqeela-location": AbstractQuery(
        sensors=(
            sensor(
                "aqeela",
                "Aqeela",
                prop("latitude", "Latitude", XsdType.DOUBLE, hidden=True),
                prop("longitude", "Longitude", XsdType.DOUBLE, hidden=True),
                SPEED,
                TEMPERATURE,
            ),
        ),
        geo=GeoFilterSet((GeoCircle(4.3, 114.35, 25000.0),)),
        date_window=DateWindow("2020-03-01T00:00:00Z", "2020-09-30T23:59:59Z"),
        limit=1000,
    ),
    # Exactly the document the chat flow builds for "Where is Aqeela?".
    "aqeela-chat": AbstractQuery(
        sensors=(sensor("aqeela", "Aqeela", LATITUDE, LONGITUDE),),
        limit=1000,
    ),
    "minimal-string": AbstractQuery(
        sensors=(sensor("chikaku", "Chikaku", prop("status", "Status", XsdType.STRING)),),
        limit=1000,
    ),
    "string-filters": AbstractQuery(
        sensors=(
            sensor(
                "bora",
                "Bora",
                prop(
                    "status",
                    "Status",
                    XsdType.STRING,
                    filters=(Contain("Aqe"), Match("Active"), Regex("^B.*a$", "i")),
                ),
            ),
        ),
        limit=1000,
    ),
    "numeric-range": AbstractQuery(
        sensors=(
            sensor(
                "aqeela",
                "Aqeela",
                prop("speed", "Speed", XsdType.DOUBLE, filters=(Range(1.5, 2.5),)),
                prop("temperature", "Temperature", XsdType.DECIMAL, filters=(Range(20, None),)),
            ),
        ),
        limit=1000,
    ),
    "equals-boolean-iri": AbstractQuery(
        sensors=(
            sensor(
                "chikaku",
                "Chikaku",
                prop("alive", "Alive", XsdType.BOOLEAN, filters=(Equals(True),)),
                prop(
                    "species",
                    "Species",
                    XsdType.IRI,
                    filters=(
                        Equals(W + "species/elephant"),
                        Match(W + "species/elephant"),
                    ),
                ),
            ),
        ),
        limit=1000,
    ),
    "date-range-only": AbstractQuery(
        sensors=(sensor("bora", "Bora", TEMPERATURE, SPEED),),
        date_window=DateWindow("2020-06-01T00:00:00Z", "2020-08-31T23:59:59Z"),
        limit=50,
    ),
    "geo-union": AbstractQuery(
        sensors=(sensor("aqeela", "Aqeela", LATITUDE, LONGITUDE, SPEED),),
        geo=GeoFilterSet(
            (GeoCircle(4.3, 114.42, 22000.0), GeoCircle(4.42, 114.3, 22000.0)),
            GeoCombinator.UNION,
        ),
        limit=1000,
    ),
    "geo-intersection": AbstractQuery(
        sensors=(sensor("aqeela", "Aqeela", LATITUDE, LONGITUDE, SPEED),),
        geo=GeoFilterSet(
            (GeoCircle(4.3, 114.42, 22000.0), GeoCircle(4.42, 114.3, 22000.0)),
            GeoCombinator.INTERSECTION,
        ),
        limit=1000,
    ),
    "multi-sensor": AbstractQuery(
        sensors=(
            sensor("aqeela", "Aqeela", TEMPERATURE, SPEED),
            sensor("bora", "Bora", TEMPERATURE, SPEED),
        ),
        limit=500,
    ),
    "optional-hidden": AbstractQuery(
        sensors=(
            sensor(
                "chikaku",
                "Chikaku",
                LATITUDE,
                prop("speed", "Speed", XsdType.DOUBLE, hidden=True),
                prop(
                    "temperature",
                    "Temperature",
                    XsdType.DECIMAL,
                    optional=True,
                    filters=(Range(18, 28),),
                ),
            ),
        ),
        limit=200,
    ),
    "adversarial-strings": AbstractQuery(
        sensors=(
            sensor(
                "bora",
                "Bora",
                prop(
                    "status",
                    "Status",
                    XsdType.STRING,
                    filters=(
                        Contain('she said "hi"'),
                        Match("back\\slash\nnewline\ttab"),
                        Regex('^\\d{2}" *', "im"),
                    ),
                ),
            ),
        ),
        limit=1000,
    ),
    "datetime-filters": AbstractQuery(
        sensors=(
            sensor(
                "aqeela",
                "Aqeela",
                prop(
                    "serviced",
                    "Serviced",
                    XsdType.DATE_TIME,
                    filters=(Range("2020-02-01T00:00:00Z", "2020-10-01T00:00:00Z"),),
                ),
                prop("speed", "Speed", XsdType.DOUBLE, filters=(Equals(2.13),)),
            ),
        ),
        limit=25,
    ),
}


def main():
    out_dir = pathlib.Path(__file__).resolve().parent.parent / "tests" / "golden"
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, q in GOLDENS.items():
        (out_dir / f"{name}.json").write_text(serialize_query(q), encoding="utf-8")
        (out_dir / f"{name}.rq").write_text(compile_query(q).text, encoding="utf-8")
        print(name)
    print(f"{len(GOLDENS)} golden pairs in {out_dir}")


if __name__ == "__main__":
    main()
