"""RDF terms, an in-memory triple store, and an N-Triples reader/writer.

The store is deliberately small: it holds at most desk-scale graphs
(about 100k triples) fully in memory and offers deterministic, sorted
iteration so that query evaluation is reproducible run to run.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Iterator, NamedTuple, Optional, Union

XSD = "http://www.w3.org/2001/XMLSchema#"
SOSA = "http://www.w3.org/ns/sosa/"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
WGS84 = "http://www.w3.org/2003/01/geo/wgs84_pos#"

XSD_STRING = XSD + "string"
XSD_INTEGER = XSD + "integer"
XSD_DECIMAL = XSD + "decimal"
XSD_DOUBLE = XSD + "double"
XSD_FLOAT = XSD + "float"
XSD_BOOLEAN = XSD + "boolean"
XSD_DATETIME = XSD + "dateTime"
XSD_DATE = XSD + "date"

SOSA_MADE_BY_SENSOR = SOSA + "madeBySensor"
SOSA_OBSERVED_PROPERTY = SOSA + "observedProperty"
SOSA_HAS_SIMPLE_RESULT = SOSA + "hasSimpleResult"
SOSA_RESULT_TIME = SOSA + "resultTime"
RDFS_LABEL = RDFS + "label"

_NUMERIC_DATATYPES = {XSD_INTEGER, XSD_DECIMAL, XSD_DOUBLE, XSD_FLOAT}


@dataclass(frozen=True)
class Iri:
    value: str

    def __repr__(self):
        return f"<{self.value}>"


@dataclass(frozen=True)
class BlankNode:
    label: str

    def __repr__(self):
        return f"_:{self.label}"


@dataclass(frozen=True)
class Literal:
    lexical: str
    datatype: str = XSD_STRING
    lang: Optional[str] = None

    def __repr__(self):
        if self.lang:
            return f'"{self.lexical}"@{self.lang}'
        if self.datatype != XSD_STRING:
            return f'"{self.lexical}"^^<{self.datatype}>'
        return f'"{self.lexical}"'


Term = Union[Iri, BlankNode, Literal]


class Triple(NamedTuple):
    subject: Term
    predicate: Iri
    object: Term


def term_sort_key(term: Term) -> tuple:
    """Total order on terms: blank nodes, then IRIs, then literals."""
    if isinstance(term, BlankNode):
        return (0, term.label, "", "")
    if isinstance(term, Iri):
        return (1, term.value, "", "")
    return (2, term.lexical, term.datatype, term.lang or "")


def triple_sort_key(t: Triple) -> tuple:
    return (term_sort_key(t.subject), term_sort_key(t.predicate), term_sort_key(t.object))


def numeric_value(term: Term) -> Optional[Union[int, float]]:
    """Numeric interpretation of a literal, or None when it has none."""
    if not isinstance(term, Literal) or term.lang:
        return None
    if term.datatype not in _NUMERIC_DATATYPES:
        return None
    text = term.lexical.strip()
    try:
        if term.datatype == XSD_INTEGER:
            return int(text)
        if term.datatype == XSD_DECIMAL:
            value = float(text)
            if "e" in text.lower():
                return None
            return value
        return float(text)
    except ValueError:
        return None


_DATETIME_RE = re.compile(
    r"^(\d{4})-(\d{2})-(\d{2})"
    r"(?:T(\d{2}):(\d{2}):(\d{2})(\.\d+)?)?"
    r"(Z|[+-]\d{2}:\d{2})?$"
)


def datetime_value(term: Term) -> Optional[datetime]:
    """Chronological interpretation of an xsd:dateTime/xsd:date literal."""
    if not isinstance(term, Literal) or term.datatype not in (XSD_DATETIME, XSD_DATE):
        return None
    return parse_datetime_lexical(term.lexical)


def parse_datetime_lexical(text: str) -> Optional[datetime]:
    m = _DATETIME_RE.match(text.strip())
    if not m:
        return None
    year, month, day = int(m.group(1)), int(m.group(2)), int(m.group(3))
    hour = int(m.group(4)) if m.group(4) else 0
    minute = int(m.group(5)) if m.group(5) else 0
    second = int(m.group(6)) if m.group(6) else 0
    micro = int(float(m.group(7)) * 1_000_000) if m.group(7) else 0
    tz = timezone.utc
    offset = m.group(8)
    if offset and offset != "Z":
        sign = 1 if offset[0] == "+" else -1
        hours, minutes = int(offset[1:3]), int(offset[4:6])
        from datetime import timedelta

        tz = timezone(sign * timedelta(hours=hours, minutes=minutes))
    try:
        return datetime(year, month, day, hour, minute, second, micro, tzinfo=tz)
    except ValueError:
        return None


def boolean_value(term: Term) -> Optional[bool]:
    if not isinstance(term, Literal) or term.datatype != XSD_BOOLEAN:
        return None
    text = term.lexical.strip()
    if text in ("true", "1"):
        return True
    if text in ("false", "0"):
        return False
    return None


def order_key(value) -> tuple:
    """Total sort key over solution values for ORDER BY.

    Unbound/error sorts lowest, then blank nodes, IRIs, numbers, dateTimes,
    booleans, and remaining literals lexically. Both query evaluation and
    the direct document evaluator order with this one definition.
    """
    if value is None:
        return (0,)
    if isinstance(value, BlankNode):
        return (1, value.label)
    if isinstance(value, Iri):
        return (2, value.value)
    if isinstance(value, bool):
        return (5, int(value))
    if isinstance(value, (int, float)):
        return (3, float(value))
    if isinstance(value, str):
        return (6, value, XSD_STRING, "")
    number = numeric_value(value)
    if number is not None:
        return (3, float(number))
    moment = datetime_value(value)
    if moment is not None:
        return (4, moment.timestamp())
    truth = boolean_value(value)
    if truth is not None:
        return (5, int(truth))
    return (6, value.lexical, value.datatype, value.lang or "")


class Graph:
    """Immutable, deduplicated triple set with sorted, indexed access.

    Iteration order everywhere is the lexicographic (subject, predicate,
    object) order of the term sort keys, which pins down solution
    discovery order during evaluation.
    """

    def __init__(self, triples: Iterable[Triple]):
        self._triples = tuple(sorted(set(triples), key=triple_sort_key))
        self._by_pred: dict[str, list[Triple]] = {}
        self._subjects_by_po: dict[tuple, list[Term]] = {}
        self._objects_by_sp: dict[tuple, list[Term]] = {}
        for t in self._triples:
            self._by_pred.setdefault(t.predicate.value, []).append(t)
            self._subjects_by_po.setdefault((t.predicate.value, t.object), []).append(t.subject)
            self._objects_by_sp.setdefault((t.subject, t.predicate.value), []).append(t.object)

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def triples(self) -> tuple[Triple, ...]:
        return self._triples

    def subjects(self, predicate: str, obj: Term) -> list[Term]:
        """Subjects of ``? predicate obj``, in sorted order."""
        return self._subjects_by_po.get((predicate, obj), [])

    def objects(self, subject: Term, predicate: str) -> list[Term]:
        """Objects of ``subject predicate ?``, in sorted order."""
        return self._objects_by_sp.get((subject, predicate), [])

    def has(self, subject: Term, predicate: str, obj: Term) -> bool:
        return obj in self._objects_by_sp.get((subject, predicate), ())

    def with_predicate(self, predicate: str) -> list[Triple]:
        return self._by_pred.get(predicate, [])


# --- N-Triples ---------------------------------------------------------

_ECHAR_DECODE = {
    "t": "\t",
    "b": "\b",
    "n": "\n",
    "r": "\r",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}


class NTriplesError(ValueError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class _LineScanner:
    def __init__(self, text: str, line_no: int):
        self.text = text
        self.pos = 0
        self.line_no = line_no

    def error(self, message: str) -> NTriplesError:
        return NTriplesError(f"{message} (column {self.pos + 1})", self.line_no)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def read_iri(self) -> Iri:
        self.expect("<")
        end = self.text.find(">", self.pos)
        if end < 0:
            raise self.error("unterminated IRI")
        value = self.text[self.pos : end]
        self.pos = end + 1
        return Iri(self._unescape(value, allow_quotes=True))

    def read_blank(self) -> BlankNode:
        self.expect("_")
        self.expect(":")
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] in "_-."):
            self.pos += 1
        if self.pos == start:
            raise self.error("empty blank node label")
        return BlankNode(self.text[start : self.pos])

    def read_literal(self) -> Literal:
        self.expect('"')
        chunks = []
        while True:
            if self.at_end():
                raise self.error("unterminated literal")
            ch = self.text[self.pos]
            if ch == '"':
                self.pos += 1
                break
            if ch == "\\":
                self.pos += 1
                chunks.append(self._read_escape())
            else:
                chunks.append(ch)
                self.pos += 1
        lexical = "".join(chunks)
        if self.peek() == "@":
            self.pos += 1
            start = self.pos
            while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "-"):
                self.pos += 1
            if self.pos == start:
                raise self.error("empty language tag")
            return Literal(lexical, XSD_STRING, self.text[start : self.pos])
        if self.text.startswith("^^", self.pos):
            self.pos += 2
            return Literal(lexical, self.read_iri().value)
        return Literal(lexical)

    def _read_escape(self) -> str:
        if self.at_end():
            raise self.error("dangling escape")
        ch = self.text[self.pos]
        self.pos += 1
        if ch in _ECHAR_DECODE:
            return _ECHAR_DECODE[ch]
        if ch == "u":
            return self._read_hex(4)
        if ch == "U":
            return self._read_hex(8)
        raise self.error(f"unknown escape \\{ch}")

    def _read_hex(self, width: int) -> str:
        digits = self.text[self.pos : self.pos + width]
        if len(digits) != width:
            raise self.error("truncated unicode escape")
        try:
            code = int(digits, 16)
        except ValueError:
            raise self.error("bad unicode escape") from None
        self.pos += width
        return chr(code)

    def _unescape(self, value: str, allow_quotes: bool) -> str:
        if "\\" not in value:
            return value
        scanner = _LineScanner(value, self.line_no)
        chunks = []
        while not scanner.at_end():
            ch = scanner.text[scanner.pos]
            if ch == "\\":
                scanner.pos += 1
                chunks.append(scanner._read_escape())
            else:
                chunks.append(ch)
                scanner.pos += 1
        return "".join(chunks)


def parse_ntriples(text: str) -> list[Triple]:
    """Parse N-Triples text (UTF-8 decoded, one triple per line)."""
    triples = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        scanner = _LineScanner(raw, line_no)
        scanner.skip_ws()
        subject = _read_subject(scanner)
        scanner.skip_ws()
        if scanner.peek() != "<":
            raise scanner.error("predicate must be an IRI")
        predicate = scanner.read_iri()
        scanner.skip_ws()
        obj = _read_object(scanner)
        scanner.skip_ws()
        scanner.expect(".")
        scanner.skip_ws()
        if not scanner.at_end() and scanner.peek() != "#":
            raise scanner.error("trailing content after '.'")
        triples.append(Triple(subject, predicate, obj))
    return triples


def _read_subject(scanner: _LineScanner) -> Term:
    ch = scanner.peek()
    if ch == "<":
        return scanner.read_iri()
    if ch == "_":
        return scanner.read_blank()
    raise scanner.error("subject must be an IRI or blank node")


def _read_object(scanner: _LineScanner) -> Term:
    ch = scanner.peek()
    if ch == "<":
        return scanner.read_iri()
    if ch == "_":
        return scanner.read_blank()
    if ch == '"':
        return scanner.read_literal()
    raise scanner.error("object must be an IRI, blank node, or literal")


def load_ntriples(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return Graph(parse_ntriples(fh.read()))


_ECHAR_ENCODE = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def _escape_lexical(text: str) -> str:
    return "".join(_ECHAR_ENCODE.get(ch, ch) for ch in text)


def format_term(term: Term) -> str:
    if isinstance(term, Iri):
        return f"<{term.value}>"
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    body = f'"{_escape_lexical(term.lexical)}"'
    if term.lang:
        return f"{body}@{term.lang}"
    if term.datatype != XSD_STRING:
        return f"{body}^^<{term.datatype}>"
    return body


def serialize_ntriples(triples: Iterable[Triple]) -> str:
    lines = [
        f"{format_term(t.subject)} {format_term(t.predicate)} {format_term(t.object)} ."
        for t in triples
    ]
    return "\n".join(lines) + ("\n" if lines else "")
