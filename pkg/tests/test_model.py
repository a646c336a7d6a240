import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import golden_document_text
from randgen import random_document
from sensorqb.errors import (
    DocumentSyntaxError,
    InvariantViolation,
    SchemaError,
    TargetNotFound,
)
from sensorqb.model import (
    FILTER_LEGALITY,
    AbstractQuery,
    AddFilter,
    AddGeoCircle,
    ClearDateWindow,
    ClearFilters,
    Contain,
    DateWindow,
    DeselectSensor,
    Equals,
    GeoCircle,
    GeoCombinator,
    GeoFilterSet,
    Match,
    PropertyBinding,
    Range,
    Regex,
    SelectSensor,
    SensorSelection,
    SetDateWindow,
    SetGeoCombinator,
    SetHidden,
    SetLimit,
    SetOptional,
    XsdType,
    apply_mutation,
    empty_query,
    filter_is_legal,
    has_fatals,
    parse_query,
    serialize_query,
    validate_query,
)

W = "http://example.org/wildlife/"


def one_sensor_query(binding: PropertyBinding, **kw) -> AbstractQuery:
    return AbstractQuery(
        sensors=(SensorSelection(W + "sensor/aqeela", "Aqeela", (binding,)),), **kw
    )


STRING_PROP = PropertyBinding(W + "property/status", "Status", XsdType.STRING)
INT_PROP = PropertyBinding(W + "property/count", "Count", XsdType.INTEGER)
DT_PROP = PropertyBinding(W + "property/serviced", "Serviced", XsdType.DATE_TIME)


class TestValidate:
    def test_zero_sensors_is_fatal_at_sensors_path(self):
        report = validate_query(empty_query())
        assert [(d.severity, d.path) for d in report] == [("fatal", "sensors")]

    def test_inverted_integer_range_is_fatal(self):
        bad = INT_PROP.__class__(
            INT_PROP.property_iri, "Count", XsdType.INTEGER, filters=(Range(5, 2),)
        )
        report = validate_query(one_sensor_query(bad))
        assert has_fatals(report)
        assert report[0].path == "sensors[0].properties[0].filters[0]"

    def test_contain_on_datetime_is_illegal(self):
        bad = PropertyBinding(
            DT_PROP.property_iri, "Serviced", XsdType.DATE_TIME, filters=(Contain("x"),)
        )
        report = validate_query(one_sensor_query(bad))
        assert has_fatals(report)
        assert "illegal for datatype" in report[0].message

    def test_duplicate_property_is_fatal(self):
        q = AbstractQuery(
            sensors=(SensorSelection(W + "s", "S", (STRING_PROP, STRING_PROP)),)
        )
        assert has_fatals(validate_query(q))

    def test_sensor_without_properties_is_fatal(self):
        q = AbstractQuery(sensors=(SensorSelection(W + "s", "S", ()),))
        assert has_fatals(validate_query(q))

    def test_invalid_regex_is_fatal(self):
        bad = PropertyBinding(
            STRING_PROP.property_iri, "Status", XsdType.STRING, filters=(Regex("([", ""),)
        )
        assert has_fatals(validate_query(one_sensor_query(bad)))


class TestFilterLegality:
    def test_matrix_matches_table(self):
        # every variant paired with every datatype must match the table
        variants = {
            Contain: Contain("x"),
            Match: Match("x"),
            Regex: Regex("x", ""),
            Range: Range(1, 2),
            Equals: Equals("x"),
        }
        for datatype in XsdType:
            for cls, instance in variants.items():
                expected = cls in FILTER_LEGALITY[datatype]
                assert filter_is_legal(instance, datatype) is expected, (cls, datatype)

    def test_table_rows(self):
        assert FILTER_LEGALITY[XsdType.STRING] == (Contain, Match, Regex, Equals)
        for numeric in (XsdType.INTEGER, XsdType.DECIMAL, XsdType.DOUBLE):
            assert FILTER_LEGALITY[numeric] == (Range, Equals)
        assert FILTER_LEGALITY[XsdType.DATE_TIME] == (Range, Equals)
        assert FILTER_LEGALITY[XsdType.BOOLEAN] == (Equals,)
        assert FILTER_LEGALITY[XsdType.IRI] == (Equals, Match)


class TestParse:
    def test_empty_object_reports_missing_fields(self):
        with pytest.raises(SchemaError) as excinfo:
            parse_query("{}")
        assert excinfo.value.path in ("sensors", "limit")

    def test_latitude_91_rejected_at_circle_path(self):
        doc = {
            "sensors": [],
            "limit": 10,
            "geo": {
                "circles": [{"centerLatDeg": 91, "centerLonDeg": 0, "radiusMeters": 10.0}],
                "combinator": "union",
            },
        }
        with pytest.raises(SchemaError) as excinfo:
            parse_query(json.dumps(doc))
        assert excinfo.value.path == "geo.circles[0]"

    def test_fig1_fixture_parses_and_validates_clean(self):
        q = parse_query(golden_document_text("aqeela-location"))
        assert validate_query(q) == []
        assert q.date_window is not None and len(q.geo.circles) == 1
        hidden = [p.hidden for p in q.sensors[0].properties]
        assert hidden == [True, True, False, False]

    def test_unknown_field_rejected(self):
        with pytest.raises(SchemaError) as excinfo:
            parse_query('{"sensors": [], "limit": 1, "surprise": 1}')
        assert excinfo.value.path == "surprise"

    def test_malformed_json_is_syntax_error(self):
        with pytest.raises(DocumentSyntaxError):
            parse_query("{not json")

    def test_nan_rejected(self):
        with pytest.raises(DocumentSyntaxError):
            parse_query('{"sensors": [], "limit": 1, "geo": {"circles": [], "combinator": "union"}, "dateWindow": null, "x": NaN}')

    def test_bool_is_not_an_integer_limit(self):
        with pytest.raises(SchemaError):
            parse_query('{"sensors": [], "limit": true}')

    def test_default_limit_only_at_api_boundary(self):
        text = '{"sensors": []}'
        with pytest.raises(SchemaError):
            parse_query(text)
        assert parse_query(text, default_limit=1000).limit == 1000

    def test_relative_iri_rejected(self):
        doc = {"sensors": [{"sensorIri": "not-an-iri", "properties": []}], "limit": 1}
        with pytest.raises(SchemaError):
            parse_query(json.dumps(doc))

    def test_datewindow_inverted_rejected(self):
        doc = {
            "sensors": [],
            "limit": 1,
            "dateWindow": {"start": "2021-01-01T00:00:00Z", "end": "2020-01-01T00:00:00Z"},
        }
        with pytest.raises(SchemaError):
            parse_query(json.dumps(doc))


class TestSerialize:
    def test_golden_bytes(self):
        text = golden_document_text("aqeela-location")
        q = parse_query(text)
        assert serialize_query(q) == text

    def test_round_trip_of_canonicalization(self):
        # serialize(parse(t)) is a fixed point for canonical text
        for raw in (
            golden_document_text("aqeela-location"),
            golden_document_text("multi-sensor"),
            golden_document_text("adversarial-strings"),
        ):
            canonical = serialize_query(parse_query(raw))
            assert serialize_query(parse_query(canonical)) == canonical

    def test_field_order_independence(self):
        a = json.dumps({"limit": 7, "sensors": [], "version": "1"})
        b = json.dumps({"version": "1", "sensors": [], "limit": 7})
        assert serialize_query(parse_query(a)) == serialize_query(parse_query(b))

    def test_repeated_calls_are_identical(self):
        q = parse_query(golden_document_text("geo-union"))
        outputs = {serialize_query(q) for _ in range(100)}
        assert len(outputs) == 1

    @given(st.integers(min_value=0, max_value=10**9))
    @settings(max_examples=200, deadline=None)
    def test_round_trip_random_documents(self, seed):
        q = random_document(random.Random(seed))
        assert parse_query(serialize_query(q)) == q


class TestMutations:
    def test_select_sensor_constructive(self):
        q = apply_mutation(
            empty_query(), SelectSensor(W + "sensor/aqeela", (W + "property/latitude",))
        )
        assert len(q.sensors) == 1
        assert q.sensors[0].properties[0].property_iri == W + "property/latitude"

    def test_select_sensor_idempotent(self):
        m = SelectSensor(W + "sensor/aqeela", (W + "property/latitude",))
        once = apply_mutation(empty_query(), m)
        twice = apply_mutation(once, m)
        assert once == twice

    def test_add_contain_on_datetime_is_invariant_violation(self):
        q = one_sensor_query(DT_PROP)
        with pytest.raises(InvariantViolation):
            apply_mutation(q, AddFilter(q.sensors[0].sensor_iri, DT_PROP.property_iri, Contain("x")))

    def test_mutation_purity(self):
        q = one_sensor_query(INT_PROP)
        before = serialize_query(q)
        apply_mutation(q, AddFilter(q.sensors[0].sensor_iri, INT_PROP.property_iri, Range(1, 2)))
        apply_mutation(q, SetLimit(5))
        apply_mutation(q, AddGeoCircle(GeoCircle(1.0, 2.0, 100.0)))
        assert serialize_query(q) == before

    def test_target_not_found(self):
        q = one_sensor_query(INT_PROP)
        with pytest.raises(TargetNotFound):
            apply_mutation(q, SetHidden(q.sensors[0].sensor_iri, W + "property/nope", True))
        with pytest.raises(TargetNotFound):
            apply_mutation(q, ClearFilters(W + "sensor/nope", INT_PROP.property_iri))

    def test_deselect_is_idempotent_and_may_empty_the_query(self):
        q = one_sensor_query(INT_PROP)
        emptied = apply_mutation(q, DeselectSensor(q.sensors[0].sensor_iri))
        assert emptied.sensors == ()
        assert apply_mutation(emptied, DeselectSensor(q.sensors[0].sensor_iri)) == emptied

    def test_toggles_window_and_combinator(self):
        q = one_sensor_query(INT_PROP)
        s, p = q.sensors[0].sensor_iri, INT_PROP.property_iri
        q = apply_mutation(q, SetHidden(s, p, True))
        q = apply_mutation(q, SetOptional(s, p, True))
        q = apply_mutation(q, SetDateWindow(DateWindow("2020-01-01T00:00:00Z", None)))
        q = apply_mutation(q, AddGeoCircle(GeoCircle(0.0, 0.0, 5.0)))
        q = apply_mutation(q, SetGeoCombinator(GeoCombinator.INTERSECTION))
        assert q.sensors[0].properties[0].hidden and q.sensors[0].properties[0].optional
        assert q.geo.combinator is GeoCombinator.INTERSECTION
        q = apply_mutation(q, ClearDateWindow())
        assert q.date_window is None

    def test_set_limit_guards(self):
        with pytest.raises(InvariantViolation):
            apply_mutation(one_sensor_query(INT_PROP), SetLimit(0))


class TestValueTypes:
    def test_circle_bounds(self):
        with pytest.raises(ValueError):
            GeoCircle(90.5, 0.0, 10.0)
        with pytest.raises(ValueError):
            GeoCircle(0.0, -181.0, 10.0)
        with pytest.raises(ValueError):
            GeoCircle(0.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            GeoCircle(0.0, 0.0, 30_000_000.0)

    def test_date_window_needs_a_bound(self):
        with pytest.raises(ValueError):
            DateWindow(None, None)

    def test_range_needs_a_bound(self):
        with pytest.raises(ValueError):
            Range(None, None)

    def test_regex_flags_checked(self):
        with pytest.raises(ValueError):
            Regex("a", "gx")

    def test_empty_geo_set_keeps_valid_combinator(self):
        assert GeoFilterSet().combinator is GeoCombinator.UNION
