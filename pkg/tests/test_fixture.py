"""Hand-checked counts and shape of the bundled synthetic graph."""

from sensorqb.rdf import (
    RDFS_LABEL,
    SOSA_HAS_SIMPLE_RESULT,
    SOSA_MADE_BY_SENSOR,
    SOSA_OBSERVED_PROPERTY,
    SOSA_RESULT_TIME,
    Iri,
)

W = "http://example.org/wildlife/"


def test_triple_count(fixture_graph):
    assert len(fixture_graph) == 823  # 204 observations x 4 triples + 7 labels


def test_sensor_and_property_labels(fixture_graph):
    labels = {
        t.subject.value: t.object.lexical for t in fixture_graph.with_predicate(RDFS_LABEL)
    }
    assert labels[W + "sensor/aqeela"] == "Aqeela"
    assert labels[W + "sensor/bora"] == "Bora"
    assert labels[W + "sensor/chikaku"] == "Chikaku"
    assert len(labels) == 7  # 3 sensors + 4 properties


def test_observation_counts_per_sensor(fixture_graph):
    for name in ("aqeela", "bora", "chikaku"):
        observations = fixture_graph.subjects(SOSA_MADE_BY_SENSOR, Iri(f"{W}sensor/{name}"))
        assert len(observations) == 68  # 17 reading times x 4 properties


def test_every_observation_is_complete(fixture_graph):
    observations = {t.subject for t in fixture_graph.with_predicate(SOSA_MADE_BY_SENSOR)}
    assert len(observations) == 204
    for obs in observations:
        assert len(fixture_graph.objects(obs, SOSA_OBSERVED_PROPERTY)) == 1
        assert len(fixture_graph.objects(obs, SOSA_HAS_SIMPLE_RESULT)) == 1
        assert len(fixture_graph.objects(obs, SOSA_RESULT_TIME)) == 1


def test_times_span_2020(fixture_graph):
    stamps = sorted(t.object.lexical for t in fixture_graph.with_predicate(SOSA_RESULT_TIME))
    assert stamps[0].startswith("2020-01-01")
    assert stamps[-1].startswith("2020-12")
    assert all(s.endswith("Z") for s in stamps)


def test_positions_inside_one_degree_square(fixture_graph):
    lats, lons = [], []
    for t in fixture_graph.with_predicate(SOSA_OBSERVED_PROPERTY):
        prop = t.object.value
        if prop.endswith("/latitude"):
            lats.append(float(fixture_graph.objects(t.subject, SOSA_HAS_SIMPLE_RESULT)[0].lexical))
        elif prop.endswith("/longitude"):
            lons.append(float(fixture_graph.objects(t.subject, SOSA_HAS_SIMPLE_RESULT)[0].lexical))
    assert len(lats) == 51 and len(lons) == 51
    assert max(lats) - min(lats) <= 1.0
    assert max(lons) - min(lons) <= 1.0
