import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import golden_document_text, golden_names, golden_query_text
from oracles import filter_accepts, haversine_meters
from randgen import random_document
from sensorqb.compiler import (
    CompileOptions,
    allocate_vars,
    compile_query,
    render_filter,
    render_geo,
)
from sensorqb.errors import (
    EmptyGeoSet,
    GeoWithoutCoordinates,
    IllegalFilter,
    ValidationFailed,
)
from sensorqb.model import (
    AbstractQuery,
    Contain,
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
    empty_query,
    parse_query,
)
from sensorqb.rdf import Graph, Literal, Triple, Iri, XSD_STRING
from sensorqb.sparql_eval import evaluate
from sensorqb.sparql_subset import parse_sparql_subset

W = "http://example.org/wildlife/"


def make_query(n_sensors: int, n_props: int) -> AbstractQuery:
    sensors = []
    for i in range(n_sensors):
        props = tuple(
            PropertyBinding(f"{W}property/p{j}", f"p{j}", XsdType.STRING)
            for j in range(n_props)
        )
        sensors.append(SensorSelection(f"{W}sensor/s{i}", f"s{i}", props))
    return AbstractQuery(tuple(sensors))


class TestVarAllocation:
    def test_one_sensor_two_properties(self):
        vars_ = allocate_vars(make_query(1, 2))
        assert vars_.names() >= {"obs_0_0", "v_0_0", "obs_0_1", "v_0_1", "t_0"}
        assert vars_.time(0) == "t_0"
        assert vars_.lookup(0, "value", f"{W}property/p1") == "v_0_1"

    def test_two_sensors_disjoint(self):
        vars_ = allocate_vars(make_query(2, 1))
        sensor0 = {vars_.obs(0, 0), vars_.value(0, 0), vars_.time(0)}
        sensor1 = {vars_.obs(1, 0), vars_.value(1, 0), vars_.time(1)}
        assert sensor0.isdisjoint(sensor1)

    def test_permutation_follows_document_order(self):
        q = make_query(2, 1)
        flipped = AbstractQuery((q.sensors[1], q.sensors[0]), q.geo, q.date_window, q.limit)
        a, b = allocate_vars(q), allocate_vars(flipped)
        assert a.lookup(0, "observation", f"{W}property/p0") == "obs_0_0"
        assert b.lookup(0, "observation", f"{W}property/p0") == "obs_0_0"
        # sensor s1 moves from index 1 to index 0 and takes index-0 names
        assert q.sensors[1].sensor_iri == flipped.sensors[0].sensor_iri

    def test_stable_under_reinvocation(self):
        q = make_query(2, 2)
        assert allocate_vars(q).names() == allocate_vars(q).names()


class TestRenderFilter:
    def test_contain_lowercases(self):
        text = render_filter(Contain("Aqe"), "v_0_0", XsdType.STRING)
        assert text == 'CONTAINS(LCASE(STR(?v_0_0)), "aqe")'

    def test_integer_range(self):
        text = render_filter(Range(10, 20), "v", XsdType.INTEGER)
        assert text == "(?v >= 10 && ?v <= 20)"

    def test_datetime_single_bound(self):
        from sensorqb.compiler import PrefixTracker

        prefixes = PrefixTracker()
        text = render_filter(Range("2020-01-01T00:00:00Z", None), "v", XsdType.DATE_TIME, prefixes)
        assert text == '(?v >= "2020-01-01T00:00:00Z"^^xsd:dateTime)'
        assert ("xsd", "http://www.w3.org/2001/XMLSchema#") in prefixes.used_in_order()

    def test_match_and_regex(self):
        assert render_filter(Match("Bora"), "v", XsdType.STRING) == 'STR(?v) = "Bora"'
        assert (
            render_filter(Regex("^B.*a$", "i"), "v", XsdType.STRING)
            == 'REGEX(STR(?v), "^B.*a$", "i")'
        )

    def test_equals_variants(self):
        assert render_filter(Equals(True), "v", XsdType.BOOLEAN) == "?v = true"
        assert render_filter(Equals(2.5), "v", XsdType.DOUBLE) == "?v = 2.5"
        assert (
            render_filter(Equals(W + "species/elephant"), "v", XsdType.IRI)
            == f"?v = <{W}species/elephant>"
        )

    def test_illegal_filter_raises(self):
        with pytest.raises(IllegalFilter):
            render_filter(Contain("x"), "v", XsdType.DATE_TIME)


class TestRenderGeo:
    def test_one_degree_of_latitude(self):
        # haversine oracle: 1 degree of latitude is ~111195 m on this sphere
        assert haversine_meters(0, 0, 1.0, 0) == pytest.approx(111194.93, abs=0.5)
        assert haversine_meters(0, 0, 1.1, 0) > 111195.0
        text = render_geo(
            GeoFilterSet((GeoCircle(0.0, 0.0, 111195.0),)), "lat", "lon"
        )
        assert filter_accepts(text, 1.0, 0.0)
        assert not filter_accepts(text, 1.1, 0.0)

    def test_union_accepts_either(self):
        g = GeoFilterSet(
            (GeoCircle(0.0, 0.0, 50_000.0), GeoCircle(2.0, 2.0, 50_000.0)),
            GeoCombinator.UNION,
        )
        text = render_geo(g, "lat", "lon")
        assert filter_accepts(text, 0.1, 0.0)
        assert filter_accepts(text, 2.0, 2.1)
        assert not filter_accepts(text, 1.0, 1.0)

    def test_disjoint_intersection_accepts_nothing(self):
        g = GeoFilterSet(
            (GeoCircle(0.0, 0.0, 50_000.0), GeoCircle(2.0, 2.0, 50_000.0)),
            GeoCombinator.INTERSECTION,
        )
        text = render_geo(g, "lat", "lon")
        for lat in (0.0, 0.5, 1.0, 2.0):
            assert not filter_accepts(text, lat, lat)

    def test_empty_set_raises(self):
        with pytest.raises(EmptyGeoSet):
            render_geo(GeoFilterSet(), "lat", "lon")

    def test_negative_center_folds_sign(self):
        text = render_geo(GeoFilterSet((GeoCircle(-4.25, -114.5, 1000.0),)), "lat", "lon")
        assert "- -" not in text
        assert filter_accepts(text, -4.25, -114.5)


class TestCompile:
    def test_fig1_scenario_matches_golden(self):
        q = parse_query(golden_document_text("aqeela-location"))
        compiled = compile_query(q)
        assert compiled.text == golden_query_text("aqeela-location")
        assert compiled.text.count("sosa:resultTime ?t_0") == 4
        assert compiled.text.count("FILTER(") == 2
        assert "LIMIT 1000" in compiled.text

    def test_minimal_query_has_no_filters(self):
        q = parse_query(golden_document_text("minimal-string"))
        text = compile_query(q).text
        assert "FILTER" not in text
        assert text == golden_query_text("minimal-string")

    def test_hidden_property_stays_in_where(self):
        q = parse_query(golden_document_text("aqeela-location"))
        text = compile_query(q).text
        select_line = text.splitlines()[2]
        assert select_line.startswith("SELECT ")
        assert "?v_0_0" not in select_line and "?v_0_1" not in select_line
        assert "?v_0_0" in text and "?v_0_1" in text

    @pytest.mark.parametrize("name", golden_names())
    def test_golden_corpus_byte_equal(self, name):
        q = parse_query(golden_document_text(name))
        assert compile_query(q).text == golden_query_text(name)

    def test_determinism_100_runs(self):
        q = parse_query(golden_document_text("geo-intersection"))
        outputs = {compile_query(q).text for _ in range(100)}
        assert len(outputs) == 1

    def test_validation_failed_on_empty(self):
        with pytest.raises(ValidationFailed):
            compile_query(empty_query())

    def test_geo_without_coordinates(self):
        q = AbstractQuery(
            sensors=(
                SensorSelection(
                    W + "sensor/aqeela",
                    "Aqeela",
                    (PropertyBinding(W + "property/temperature", "T", XsdType.DECIMAL),),
                ),
            ),
            geo=GeoFilterSet((GeoCircle(0.0, 0.0, 10.0),)),
        )
        with pytest.raises(GeoWithoutCoordinates):
            compile_query(q)

    def test_custom_coordinate_options(self):
        q = AbstractQuery(
            sensors=(
                SensorSelection(
                    W + "sensor/aqeela",
                    "Aqeela",
                    (
                        PropertyBinding(W + "property/y", "Y", XsdType.DOUBLE),
                        PropertyBinding(W + "property/x", "X", XsdType.DOUBLE),
                    ),
                ),
            ),
            geo=GeoFilterSet((GeoCircle(0.0, 0.0, 10.0),)),
        )
        options = CompileOptions(W + "property/y", W + "property/x")
        text = compile_query(q, options).text
        assert "?v_0_0 - 0" in text or "(?v_0_0" in text

    def test_only_used_prefixes_emitted(self):
        minimal = compile_query(parse_query(golden_document_text("minimal-string"))).text
        assert "PREFIX xsd:" not in minimal and "PREFIX rdfs:" not in minimal
        multi = compile_query(parse_query(golden_document_text("multi-sensor"))).text
        assert "PREFIX rdfs:" in multi and "PREFIX xsd:" not in multi

    @given(st.integers(min_value=0, max_value=10**9))
    @settings(max_examples=150, deadline=None)
    def test_subset_closure_random_documents(self, seed):
        q = random_document(random.Random(seed))
        parse_sparql_subset(compile_query(q).text)


ADVERSARIAL = st.text(
    alphabet=st.characters(
        whitelist_categories=("L", "N", "P", "S", "Z"), whitelist_characters='"\\\n\r\t'
    ),
    max_size=25,
)


class TestEscaping:
    @given(ADVERSARIAL)
    @settings(max_examples=300, deadline=None)
    def test_adversarial_text_round_trips_through_match(self, text):
        binding = PropertyBinding(
            W + "property/status", "Status", XsdType.STRING, filters=(Match(text),)
        )
        q = AbstractQuery(
            sensors=(SensorSelection(W + "sensor/s", "S", (binding,)),), limit=10
        )
        compiled = compile_query(q)
        ast = parse_sparql_subset(compiled.text)

        obs = Iri(W + "obs/1")
        graph = Graph(
            [
                Triple(obs, Iri("http://www.w3.org/ns/sosa/madeBySensor"), Iri(W + "sensor/s")),
                Triple(
                    obs,
                    Iri("http://www.w3.org/ns/sosa/observedProperty"),
                    Iri(W + "property/status"),
                ),
                Triple(
                    obs,
                    Iri("http://www.w3.org/ns/sosa/hasSimpleResult"),
                    Literal(text, XSD_STRING),
                ),
                Triple(
                    obs,
                    Iri("http://www.w3.org/ns/sosa/resultTime"),
                    Literal("2020-01-01T00:00:00Z", "http://www.w3.org/2001/XMLSchema#dateTime"),
                ),
            ]
        )
        table = evaluate(ast, graph)
        assert len(table.rows) == 1, "exact Match must keep the matching row"
