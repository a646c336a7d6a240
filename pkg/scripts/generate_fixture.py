#!/usr/bin/env python3
"""Regenerate the bundled synthetic wildlife graph (data/fixture.nt).

Three collared animals, four observable properties each, 17 shared
reading times per animal spread over 2020, all positions inside a one
degree square. Fully deterministic: no RNG, just trigonometric walks.

Expected counts (asserted by tests/test_fixture.py):
  3 sensors x 17 times x 4 properties = 204 observations, 816
  observation triples, plus 7 label triples = 823 lines.
"""

import math
import pathlib
from datetime import datetime, timedelta, timezone

BASE = "http://example.org/wildlife/"
SOSA = "http://www.w3.org/ns/sosa/"
RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"
XSD = "http://www.w3.org/2001/XMLSchema#"

SENSORS = [("aqeela", "Aqeela"), ("bora", "Bora"), ("chikaku", "Chikaku")]
PROPERTIES = [
    ("latitude", "Latitude", XSD + "double"),
    ("longitude", "Longitude", XSD + "double"),
    ("temperature", "Temperature", XSD + "decimal"),
    ("speed", "Speed", XSD + "double"),
]
READINGS_PER_SENSOR = 17
START = datetime(2020, 1, 1, 6, 0, 0, tzinfo=timezone.utc)

TAU = 2.0 * math.pi


def reading_values(s: int, k: int) -> dict:
    phase = TAU * k / READINGS_PER_SENSOR
    return {
        "latitude": f"{4.2 + 0.12 * s + 0.25 * math.sin(phase + s):.5f}",
        "longitude": f"{114.25 + 0.12 * s + 0.25 * math.cos(phase + 1.3 * s):.5f}",
        "temperature": f"{24.0 + 6.0 * math.sin(phase + 0.7 * s):.2f}",
        "speed": f"{1.5 + 1.2 * abs(math.sin(2.0 * phase + s)):.2f}",
    }


def main():
    lines = []
    for name, label in SENSORS:
        lines.append(f'<{BASE}sensor/{name}> <{RDFS_LABEL}> "{label}" .')
    for key, label, _ in PROPERTIES:
        lines.append(f'<{BASE}property/{key}> <{RDFS_LABEL}> "{label}" .')

    for s, (name, _) in enumerate(SENSORS):
        for k in range(READINGS_PER_SENSOR):
            when = START + timedelta(days=21 * k + 3 * s)
            stamp = when.strftime("%Y-%m-%dT%H:%M:%SZ")
            values = reading_values(s, k)
            for key, _, datatype in PROPERTIES:
                obs = f"{BASE}obs/{name}/{key}/{k}"
                lines.append(f"<{obs}> <{SOSA}madeBySensor> <{BASE}sensor/{name}> .")
                lines.append(f"<{obs}> <{SOSA}observedProperty> <{BASE}property/{key}> .")
                lines.append(f'<{obs}> <{SOSA}hasSimpleResult> "{values[key]}"^^<{datatype}> .')
                lines.append(f'<{obs}> <{SOSA}resultTime> "{stamp}"^^<{XSD}dateTime> .')

    out = pathlib.Path(__file__).resolve().parent.parent / "src" / "sensorqb" / "data" / "fixture.nt"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(lines)} triples to {out}")


if __name__ == "__main__":
    main()
