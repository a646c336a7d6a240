import functools

import pytest

from conftest import golden_query_text
from sensorqb.compiler import compile_query
from sensorqb.model import apply_mutation, empty_query, validate_query
from sensorqb.nlu import (
    ENTITY_THRESHOLD,
    ChatOutcome,
    Intent,
    classify,
    link_entity,
    respond,
    similarity,
)

# intent fixture set: deterministic rules must classify all of these
UTTERANCES = [
    ("What are the sensors?", Intent.LIST_SENSORS),
    ("what are the sensors", Intent.LIST_SENSORS),
    ("Which sensors do you have?", Intent.LIST_SENSORS),
    ("what sensors are there?", Intent.LIST_SENSORS),
    ("What is Aqeela?", Intent.DESCRIBE_ENTITY),
    ("what is bora", Intent.DESCRIBE_ENTITY),
    ("What is Chikaku?", Intent.DESCRIBE_ENTITY),
    ("Where is Aqeela?", Intent.LOCATE_ENTITY),
    ("Where is aqeela?", Intent.LOCATE_ENTITY),
    ("find Bora", Intent.LOCATE_ENTITY),
    ("locate Chikaku", Intent.LOCATE_ENTITY),
    ("show me Aqeela", Intent.LOCATE_ENTITY),
    ("Find bora?", Intent.LOCATE_ENTITY),
    ("from 2020-01-01 to 2020-03-31", Intent.ADD_DATE_RANGE),
    ("between 2020-06-01 and 2020-08-31", Intent.ADD_DATE_RANGE),
    ("show data from 2020-01-01T00:00:00Z to 2020-02-01T00:00:00Z", Intent.ADD_DATE_RANGE),
    ("within 25 km of 4.5, 114.5", Intent.ADD_GEO_NEAR),
    ("within 3000 m of 4.2 114.3", Intent.ADD_GEO_NEAR),
    ("within 10km of -4.25, -114.5", Intent.ADD_GEO_NEAR),
    ("limit 50", Intent.SET_LIMIT),
    ("set limit to 10", Intent.SET_LIMIT),
    ("Limit 5", Intent.SET_LIMIT),
    ("run", Intent.EXECUTE_QUERY),
    ("search", Intent.EXECUTE_QUERY),
    ("execute", Intent.EXECUTE_QUERY),
    ("go", Intent.EXECUTE_QUERY),
    ("run the query", Intent.EXECUTE_QUERY),
    ("reset", Intent.RESET),
    ("clear", Intent.RESET),
    ("start over", Intent.RESET),
    ("Reset please", Intent.RESET),
    ("tell me a joke", Intent.UNKNOWN),
    ("how deep is the ocean", Intent.UNKNOWN),
]


class TestClassify:
    def test_paper_utterances(self, fixture_catalog):
        frame = classify("What are the sensors?", fixture_catalog)
        assert frame.intent is Intent.LIST_SENSORS and frame.slots == {}

        frame = classify("What is Aqeela?", fixture_catalog)
        assert frame.intent is Intent.DESCRIBE_ENTITY
        assert frame.slots["entity"] == "Aqeela"

        frame = classify("Where is aqeela?", fixture_catalog)
        assert frame.intent is Intent.LOCATE_ENTITY
        assert frame.slots["entity"] == "aqeela"

    @pytest.mark.parametrize("utterance,expected", UTTERANCES)
    def test_fixture_set_classifies_fully(self, utterance, expected, fixture_catalog):
        frame = classify(utterance, fixture_catalog)
        assert frame.intent is expected, utterance

    def test_confidence_is_binary_around_threshold(self, fixture_catalog):
        assert classify("run", fixture_catalog).confidence == 1.0
        assert classify("gibberish here", fixture_catalog).confidence == 0.0

    def test_date_gate_failure_falls_through(self, fixture_catalog):
        # matches the date-range pattern shape but the slots are not dates
        frame = classify("from here to there", fixture_catalog)
        assert frame.intent is Intent.UNKNOWN

    def test_determinism(self, fixture_catalog):
        for utterance, _ in UTTERANCES[:5]:
            frames = {
                (classify(utterance, fixture_catalog).intent, tuple(sorted(classify(utterance, fixture_catalog).slots.items())))
                for _ in range(20)
            }
            assert len(frames) == 1, utterance


def brute_levenshtein(a: str, b: str) -> int:
    @functools.lru_cache(maxsize=None)
    def go(i: int, j: int) -> int:
        if i == 0:
            return j
        if j == 0:
            return i
        return min(
            go(i - 1, j) + 1,
            go(i, j - 1) + 1,
            go(i - 1, j - 1) + (0 if a[i - 1] == b[j - 1] else 1),
        )

    return go(len(a), len(b))


class TestLinkEntity:
    def test_casefold_identity(self, fixture_catalog):
        match = link_entity("aqeela", fixture_catalog)
        assert match is not None and match.score == 1.0
        assert match.sensor_iri.endswith("/aqeela")

    def test_one_typo_within_threshold(self, fixture_catalog):
        # one deletion over max length 6: 1 - 1/6
        assert brute_levenshtein("aqela", "aqeela") == 1
        match = link_entity("Aqela", fixture_catalog)
        assert match is not None
        assert match.score == pytest.approx(1 - 1 / 6)

    def test_unrelated_word_below_threshold(self, fixture_catalog):
        labels = [s.label for s in fixture_catalog.sensors]
        best = max(
            1 - brute_levenshtein("elephant", lab.casefold()) / max(len("elephant"), len(lab))
            for lab in [l.casefold() for l in labels]
        )
        assert best < ENTITY_THRESHOLD
        assert link_entity("elephant", fixture_catalog) is None

    def test_similarity_matches_brute_force(self, fixture_catalog):
        for mention in ("aqeela", "Bora", "chikaky", "zzz"):
            for sensor in fixture_catalog.sensors:
                a, b = mention.casefold(), sensor.label.casefold()
                expected = 1 - brute_levenshtein(a, b) / max(len(a), len(b))
                assert similarity(mention, sensor.label) == pytest.approx(expected)

    def test_threshold_monotonicity(self, fixture_catalog):
        # raising the threshold never changes which sensor is argmax
        for mention in ("aqeela", "Aqela", "bora", "chikaku", "boro"):
            with_low = link_entity(mention, fixture_catalog, threshold=0.0)
            with_high = link_entity(mention, fixture_catalog, threshold=ENTITY_THRESHOLD)
            if with_high is not None:
                assert with_high.sensor_iri == with_low.sensor_iri


class TestRespond:
    def test_list_sensors_contains_all_labels(self, fixture_catalog):
        frame = classify("What are the sensors?", fixture_catalog)
        outcome = respond(frame, empty_query(), fixture_catalog)
        for label in ("Aqeela", "Bora", "Chikaku"):
            assert label in outcome.reply
        assert outcome.mutations == () and not outcome.trigger_search

    def test_describe_lists_properties(self, fixture_catalog):
        frame = classify("What is Aqeela?", fixture_catalog)
        outcome = respond(frame, empty_query(), fixture_catalog)
        for label in ("Latitude", "Longitude", "Speed", "Temperature"):
            assert label in outcome.reply

    def test_describe_unknown_entity(self, fixture_catalog):
        frame = classify("What is Zzz?", fixture_catalog)
        outcome = respond(frame, empty_query(), fixture_catalog)
        assert "don't know a sensor" in outcome.reply
        assert outcome.mutations == ()

    def test_locate_flow_matches_chat_golden(self, fixture_catalog):
        frame = classify("Where is Aqeela?", fixture_catalog)
        outcome = respond(frame, empty_query(), fixture_catalog)
        assert outcome.trigger_search
        q = empty_query()
        for m in outcome.mutations:
            q = apply_mutation(q, m, fixture_catalog)
        assert validate_query(q) == []
        assert compile_query(q).text == golden_query_text("aqeela-chat")

    def test_execute_on_empty_is_apologetic(self, fixture_catalog):
        frame = classify("run", fixture_catalog)
        outcome = respond(frame, empty_query(), fixture_catalog)
        assert not outcome.trigger_search

    def test_execute_on_compilable_triggers(self, fixture_catalog):
        q = empty_query()
        locate = respond(classify("Where is Bora?", fixture_catalog), q, fixture_catalog)
        for m in locate.mutations:
            q = apply_mutation(q, m, fixture_catalog)
        outcome = respond(classify("run", fixture_catalog), q, fixture_catalog)
        assert outcome.trigger_search and outcome.mutations == ()

    def test_reset_flags_query_reset(self, fixture_catalog):
        outcome = respond(classify("reset", fixture_catalog), empty_query(), fixture_catalog)
        assert outcome.reset_query and outcome.mutations == ()

    def test_unknown_gets_help(self, fixture_catalog):
        outcome = respond(classify("what even", fixture_catalog), empty_query(), fixture_catalog)
        assert "sensors" in outcome.reply

    def test_mutation_safety_across_fixture_set(self, fixture_catalog):
        q = empty_query()
        for utterance, _ in UTTERANCES:
            outcome = respond(classify(utterance, fixture_catalog), q, fixture_catalog)
            assert isinstance(outcome, ChatOutcome)
            if outcome.reset_query:
                q = empty_query()
            for m in outcome.mutations:
                q = apply_mutation(q, m, fixture_catalog)  # must never raise

    def test_geo_and_date_and_limit_mutations(self, fixture_catalog):
        q = empty_query()
        for text in (
            "select Aqeela",
            "within 25 km of 4.3, 114.4",
            "from 2020-01-01 to 2020-06-30",
            "limit 10",
        ):
            outcome = respond(classify(text, fixture_catalog), q, fixture_catalog)
            for m in outcome.mutations:
                q = apply_mutation(q, m, fixture_catalog)
        assert len(q.geo.circles) == 1
        assert q.geo.circles[0].radius_meters == 25000.0
        assert q.date_window.start == "2020-01-01T00:00:00Z"
        assert q.date_window.end == "2020-06-30T23:59:59Z"
        assert q.limit == 10
        assert validate_query(q) == []
