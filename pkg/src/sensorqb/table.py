"""Tabular SELECT results with typed cells, plus the results-JSON codec."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Optional

from .rdf import XSD_STRING, BlankNode, Iri, Literal, Term

KIND_IRI = "iri"
KIND_LITERAL = "literal"
KIND_BLANK = "blank"
KIND_UNBOUND = "unbound"


@dataclass(frozen=True)
class Cell:
    kind: str
    value: str = ""
    datatype: Optional[str] = None
    lang: Optional[str] = None

    @staticmethod
    def unbound() -> "Cell":
        return Cell(KIND_UNBOUND)

    @staticmethod
    def from_term(term: Term) -> "Cell":
        if isinstance(term, Iri):
            return Cell(KIND_IRI, term.value)
        if isinstance(term, BlankNode):
            return Cell(KIND_BLANK, term.label)
        return Cell(KIND_LITERAL, term.lexical, term.datatype, term.lang)

    def to_term(self) -> Optional[Term]:
        if self.kind == KIND_IRI:
            return Iri(self.value)
        if self.kind == KIND_BLANK:
            return BlankNode(self.value)
        if self.kind == KIND_LITERAL:
            return Literal(self.value, self.datatype or XSD_STRING, self.lang)
        return None

    def key(self) -> tuple:
        return (self.kind, self.value, self.datatype or "", self.lang or "")


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[list[Cell]] = field(default_factory=list)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError("row width does not match column count")

    def row_multiset(self) -> dict[tuple, int]:
        """Rows as a multiset of cell keys, for order-insensitive comparison."""
        counts: dict[tuple, int] = {}
        for row in self.rows:
            key = tuple(cell.key() for cell in row)
            counts[key] = counts.get(key, 0) + 1
        return counts

    def to_json_obj(self) -> dict:
        return {
            "columns": list(self.columns),
            "rows": [[_cell_to_json(cell) for cell in row] for row in self.rows],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([cell.value for cell in row])
        return buf.getvalue()


def _cell_to_json(cell: Cell) -> dict:
    obj: dict = {"kind": cell.kind}
    if cell.kind != KIND_UNBOUND:
        obj["value"] = cell.value
    if cell.datatype is not None:
        obj["datatype"] = cell.datatype
    if cell.lang is not None:
        obj["lang"] = cell.lang
    return obj


def table_from_json_obj(obj: dict) -> ResultTable:
    rows = []
    for raw_row in obj["rows"]:
        row = []
        for raw in raw_row:
            row.append(
                Cell(
                    raw["kind"],
                    raw.get("value", ""),
                    raw.get("datatype"),
                    raw.get("lang"),
                )
            )
        rows.append(row)
    return ResultTable(list(obj["columns"]), rows)


def encode_results_json(table: ResultTable) -> bytes:
    """Encode a table in the standard SPARQL results-JSON shape."""
    bindings = []
    for row in table.rows:
        binding: dict = {}
        for var, cell in zip(table.columns, row):
            if cell.kind == KIND_UNBOUND:
                continue
            if cell.kind == KIND_IRI:
                term = {"type": "uri", "value": cell.value}
            elif cell.kind == KIND_BLANK:
                term = {"type": "bnode", "value": cell.value}
            else:
                term = {"type": "literal", "value": cell.value}
                if cell.lang:
                    term["xml:lang"] = cell.lang
                elif cell.datatype and cell.datatype != XSD_STRING:
                    term["datatype"] = cell.datatype
            binding[var] = term
        bindings.append(binding)
    doc = {"head": {"vars": list(table.columns)}, "results": {"bindings": bindings}}
    return json.dumps(doc).encode("utf-8")
