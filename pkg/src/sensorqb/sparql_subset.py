"""Parser for the supported SPARQL SELECT subset.

The subset is exactly the language the compiler emits plus the discovery
queries: prefix declarations, SELECT (optionally DISTINCT), basic graph
patterns with predicate-object lists, OPTIONAL, UNION, FILTER expressions
(boolean connectives, comparisons, + - * arithmetic, unary minus,
CONTAINS/LCASE/STR/REGEX, typed literals), ORDER BY and LIMIT. Anything
outside the subset is a SubsetSyntaxError, never silently skipped. The
grammar is written out in docs/sparql-subset.ebnf.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from .errors import SubsetSyntaxError
from .rdf import (
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    Iri,
    Literal,
    Term,
)

# --- AST ------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class TriplePattern:
    subject: Union[Var, Term]
    predicate: Union[Var, Iri]
    object: Union[Var, Term]


@dataclass(frozen=True)
class TriplesBlock:
    patterns: tuple[TriplePattern, ...]


@dataclass(frozen=True)
class FilterExpr:
    expr: "Expr"


@dataclass(frozen=True)
class GroupPattern:
    elements: tuple = ()


@dataclass(frozen=True)
class OptionalBlock:
    group: GroupPattern


@dataclass(frozen=True)
class UnionBlock:
    branches: tuple[GroupPattern, ...]


@dataclass(frozen=True)
class OrExpr:
    terms: tuple


@dataclass(frozen=True)
class AndExpr:
    terms: tuple


@dataclass(frozen=True)
class Comparison:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Arith:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class FuncCall:
    name: str
    args: tuple


@dataclass(frozen=True)
class Const:
    term: Term


Expr = Union[OrExpr, AndExpr, Comparison, Arith, Neg, FuncCall, Const, Var]


@dataclass(frozen=True)
class QueryAst:
    prefixes: tuple[tuple[str, str], ...]
    distinct: bool
    select_vars: Optional[tuple[str, ...]]  # None means SELECT *
    pattern_vars: tuple[str, ...]  # first-appearance order in WHERE patterns
    where: GroupPattern
    order: Optional[tuple[str, "Expr"]]  # ("ASC" | "DESC", key expression)
    limit: Optional[int]


# --- Lexer ----------------------------------------------------------------

_KEYWORDS = {
    "PREFIX", "SELECT", "DISTINCT", "WHERE", "OPTIONAL", "UNION", "FILTER",
    "ORDER", "BY", "ASC", "DESC", "LIMIT", "TRUE", "FALSE",
    "CONTAINS", "LCASE", "STR", "REGEX",
}

_TOKEN_RES = [
    ("IRIREF", re.compile(r'<([^<>"{}|^`\\\x00-\x20]*)>')),
    ("VAR", re.compile(r"\?([A-Za-z_][A-Za-z0-9_]*)")),
    ("NUMBER", re.compile(r"(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?")),
    ("STRING", re.compile(r'"((?:[^"\\\n]|\\.)*)"')),
    (
        "PNAME",
        re.compile(
            r"(?:[A-Za-z_][A-Za-z0-9_\-]*)?:"
            r"(?:[A-Za-z0-9_](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?)?"
        ),
    ),
    ("WORD", re.compile(r"[A-Za-z_][A-Za-z0-9_]*")),
    ("PUNCT", re.compile(r"\^\^|&&|\|\||!=|<=|>=|[{}();,.=<>+\-*]")),
]

_ESCAPE_MAP = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


@dataclass(frozen=True)
class _Token:
    kind: str
    value: str
    line: int
    col: int


def _decode_string(raw: str, line: int, col: int) -> str:
    out = []
    i = 0
    while i < len(raw):
        ch = raw[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        i += 1
        esc = raw[i]
        if esc in _ESCAPE_MAP:
            out.append(_ESCAPE_MAP[esc])
            i += 1
        elif esc == "u" or esc == "U":
            width = 4 if esc == "u" else 8
            digits = raw[i + 1 : i + 1 + width]
            if len(digits) != width:
                raise SubsetSyntaxError("truncated unicode escape", line, col)
            try:
                out.append(chr(int(digits, 16)))
            except ValueError:
                raise SubsetSyntaxError("bad unicode escape", line, col) from None
            i += 1 + width
        else:
            raise SubsetSyntaxError(f"unknown string escape \\{esc}", line, col)
    return "".join(out)


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    size = len(text)
    while pos < size:
        ch = text[pos]
        if ch == "\n":
            line += 1
            col = 1
            pos += 1
            continue
        if ch in " \t\r":
            pos += 1
            col += 1
            continue
        if ch == "#":
            end = text.find("\n", pos)
            pos = size if end < 0 else end
            continue
        matched = None
        for kind, pattern in _TOKEN_RES:
            m = pattern.match(text, pos)
            if m:
                matched = (kind, m)
                break
        if matched is None:
            raise SubsetSyntaxError("unexpected character", line, col, ch)
        kind, m = matched
        raw = m.group(0)
        if kind == "IRIREF":
            tokens.append(_Token("IRIREF", m.group(1), line, col))
        elif kind == "VAR":
            tokens.append(_Token("VAR", m.group(1), line, col))
        elif kind == "STRING":
            tokens.append(_Token("STRING", _decode_string(m.group(1), line, col), line, col))
        elif kind == "WORD":
            upper = raw.upper()
            if upper in _KEYWORDS:
                tokens.append(_Token("KEYWORD", upper, line, col))
            elif raw == "a":
                tokens.append(_Token("KEYWORD", "a", line, col))
            else:
                raise SubsetSyntaxError("unsupported construct", line, col, raw)
        else:
            tokens.append(_Token(kind, raw, line, col))
        pos = m.end()
        col += len(raw)
    tokens.append(_Token("EOF", "", line, col))
    return tokens


# --- Parser ---------------------------------------------------------------

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"


class _Parser:
    def __init__(self, tokens: list[_Token], prefixes: Optional[dict[str, str]] = None):
        self.tokens = tokens
        self.pos = 0
        self.prefixes: dict[str, str] = dict(prefixes or {})
        self.prefix_order: list[tuple[str, str]] = list((prefixes or {}).items())
        self.pattern_vars: list[str] = []

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok: Optional[_Token] = None) -> SubsetSyntaxError:
        tok = tok or self.peek()
        return SubsetSyntaxError(message, tok.line, tok.col, tok.value)

    def expect_punct(self, value: str) -> _Token:
        tok = self.peek()
        if tok.kind != "PUNCT" or tok.value != value:
            raise self.error(f"expected {value!r}")
        return self.next()

    def expect_keyword(self, word: str) -> _Token:
        tok = self.peek()
        if tok.kind != "KEYWORD" or tok.value != word:
            raise self.error(f"expected {word}")
        return self.next()

    def at_punct(self, value: str) -> bool:
        tok = self.peek()
        return tok.kind == "PUNCT" and tok.value == value

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "KEYWORD" and tok.value == word

    # -- query structure --

    def parse_query(self) -> QueryAst:
        while self.at_keyword("PREFIX"):
            self.next()
            name_tok = self.peek()
            if name_tok.kind != "PNAME" or not name_tok.value.endswith(":"):
                raise self.error("expected a prefix name ending in ':'")
            prefix = self.next().value[:-1]
            iri_tok = self.peek()
            if iri_tok.kind != "IRIREF":
                raise self.error("expected the prefix namespace IRI")
            namespace = self.next().value
            self.prefixes[prefix] = namespace
            self.prefix_order.append((prefix, namespace))
        self.expect_keyword("SELECT")
        distinct = False
        if self.at_keyword("DISTINCT"):
            self.next()
            distinct = True
        select_vars: Optional[tuple[str, ...]]
        if self.at_punct("*"):
            self.next()
            select_vars = None
        else:
            names = []
            while self.peek().kind == "VAR":
                names.append(self.next().value)
            if not names:
                raise self.error("expected projection variables or *")
            select_vars = tuple(names)
        self.expect_keyword("WHERE")
        where = self.parse_group()
        order = None
        if self.at_keyword("ORDER"):
            self.next()
            self.expect_keyword("BY")
            direction = "ASC"
            if self.at_keyword("ASC") or self.at_keyword("DESC"):
                direction = self.next().value
                self.expect_punct("(")
                key = self.parse_expr()
                self.expect_punct(")")
            elif self.peek().kind == "VAR":
                key = Var(self.next().value)
            else:
                raise self.error("expected ASC(...), DESC(...), or a variable")
            order = (direction, key)
        limit = None
        if self.at_keyword("LIMIT"):
            self.next()
            tok = self.peek()
            if tok.kind != "NUMBER" or not tok.value.isdigit():
                raise self.error("expected a nonnegative integer after LIMIT")
            limit = int(self.next().value)
        if self.peek().kind != "EOF":
            raise self.error("unsupported construct after query body")
        return QueryAst(
            prefixes=tuple(self.prefix_order),
            distinct=distinct,
            select_vars=select_vars,
            pattern_vars=tuple(self.pattern_vars),
            where=where,
            order=order,
            limit=limit,
        )

    def parse_group(self) -> GroupPattern:
        self.expect_punct("{")
        elements: list = []
        while not self.at_punct("}"):
            if self.peek().kind == "EOF":
                raise self.error("unterminated group")
            if self.at_keyword("OPTIONAL"):
                self.next()
                elements.append(OptionalBlock(self.parse_group()))
            elif self.at_keyword("FILTER"):
                self.next()
                self.expect_punct("(")
                expr = self.parse_expr()
                self.expect_punct(")")
                elements.append(FilterExpr(expr))
            elif self.at_punct("{"):
                branches = [self.parse_group()]
                while self.at_keyword("UNION"):
                    self.next()
                    branches.append(self.parse_group())
                if len(branches) == 1:
                    elements.append(UnionBlock((branches[0],)))
                else:
                    elements.append(UnionBlock(tuple(branches)))
            else:
                elements.append(self.parse_triples_block())
        self.expect_punct("}")
        return GroupPattern(tuple(elements))

    def parse_triples_block(self) -> TriplesBlock:
        patterns: list[TriplePattern] = []
        while True:
            subject = self.parse_term(allow_literal=False)
            patterns.extend(self.parse_property_list(subject))
            if self.at_punct("."):
                self.next()
            else:
                break
            tok = self.peek()
            if tok.kind in ("VAR", "IRIREF") or (tok.kind == "PNAME"):
                continue
            break
        return TriplesBlock(tuple(patterns))

    def parse_property_list(self, subject) -> list[TriplePattern]:
        patterns = []
        while True:
            predicate = self.parse_verb()
            while True:
                obj = self.parse_term(allow_literal=True)
                patterns.append(TriplePattern(subject, predicate, obj))
                if self.at_punct(","):
                    self.next()
                    continue
                break
            if self.at_punct(";"):
                self.next()
                if self.at_punct("."):
                    break
                continue
            break
        return patterns

    def parse_verb(self):
        tok = self.peek()
        if tok.kind == "KEYWORD" and tok.value == "a":
            self.next()
            return Iri(RDF_TYPE)
        term = self.parse_term(allow_literal=False)
        return term

    def resolve_pname(self, tok: _Token) -> Iri:
        prefix, _, local = tok.value.partition(":")
        if prefix not in self.prefixes:
            raise SubsetSyntaxError(f"undeclared prefix {prefix!r}", tok.line, tok.col, tok.value)
        return Iri(self.prefixes[prefix] + local)

    def note_var(self, name: str):
        if name not in self.pattern_vars:
            self.pattern_vars.append(name)

    def parse_term(self, allow_literal: bool):
        tok = self.peek()
        if tok.kind == "VAR":
            self.next()
            self.note_var(tok.value)
            return Var(tok.value)
        if tok.kind == "IRIREF":
            self.next()
            return Iri(tok.value)
        if tok.kind == "PNAME":
            self.next()
            return self.resolve_pname(tok)
        if allow_literal:
            if tok.kind == "STRING":
                self.next()
                return self.finish_literal(tok.value)
            if tok.kind == "NUMBER":
                self.next()
                return _number_literal(tok.value)
            if tok.kind == "KEYWORD" and tok.value in ("TRUE", "FALSE"):
                self.next()
                return Literal(tok.value.lower(), XSD_BOOLEAN)
        raise self.error("expected an IRI, prefixed name, or variable")

    def finish_literal(self, lexical: str) -> Literal:
        if self.at_punct("^^"):
            self.next()
            tok = self.peek()
            if tok.kind == "IRIREF":
                self.next()
                return Literal(lexical, tok.value)
            if tok.kind == "PNAME":
                self.next()
                return Literal(lexical, self.resolve_pname(tok).value)
            raise self.error("expected a datatype IRI after ^^")
        return Literal(lexical)

    # -- expressions --

    def parse_expr(self) -> Expr:
        terms = [self.parse_and()]
        while self.at_punct("||"):
            self.next()
            terms.append(self.parse_and())
        if len(terms) == 1:
            return terms[0]
        return OrExpr(tuple(terms))

    def parse_and(self) -> Expr:
        terms = [self.parse_relational()]
        while self.at_punct("&&"):
            self.next()
            terms.append(self.parse_relational())
        if len(terms) == 1:
            return terms[0]
        return AndExpr(tuple(terms))

    def parse_relational(self) -> Expr:
        left = self.parse_additive()
        tok = self.peek()
        if tok.kind == "PUNCT" and tok.value in ("=", "!=", "<", ">", "<=", ">="):
            op = self.next().value
            right = self.parse_additive()
            return Comparison(op, left, right)
        return left

    def parse_additive(self) -> Expr:
        left = self.parse_multiplicative()
        while True:
            tok = self.peek()
            if tok.kind == "PUNCT" and tok.value in ("+", "-"):
                op = self.next().value
                left = Arith(op, left, self.parse_multiplicative())
            else:
                return left

    def parse_multiplicative(self) -> Expr:
        left = self.parse_unary()
        while self.at_punct("*"):
            self.next()
            left = Arith("*", left, self.parse_unary())
        return left

    def parse_unary(self) -> Expr:
        if self.at_punct("-"):
            self.next()
            return Neg(self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "PUNCT" and tok.value == "(":
            self.next()
            expr = self.parse_expr()
            self.expect_punct(")")
            return expr
        if tok.kind == "KEYWORD" and tok.value in ("CONTAINS", "LCASE", "STR", "REGEX"):
            name = self.next().value
            self.expect_punct("(")
            args = [self.parse_expr()]
            while self.at_punct(","):
                self.next()
                args.append(self.parse_expr())
            self.expect_punct(")")
            arity = {"CONTAINS": (2, 2), "LCASE": (1, 1), "STR": (1, 1), "REGEX": (2, 3)}[name]
            if not arity[0] <= len(args) <= arity[1]:
                raise SubsetSyntaxError(
                    f"{name} takes {arity[0]}-{arity[1]} arguments", tok.line, tok.col, name
                )
            return FuncCall(name, tuple(args))
        if tok.kind == "VAR":
            self.next()
            return Var(tok.value)
        if tok.kind == "STRING":
            self.next()
            return Const(self.finish_literal(tok.value))
        if tok.kind == "NUMBER":
            self.next()
            return Const(_number_literal(tok.value))
        if tok.kind == "KEYWORD" and tok.value in ("TRUE", "FALSE"):
            self.next()
            return Const(Literal(tok.value.lower(), XSD_BOOLEAN))
        if tok.kind == "IRIREF":
            self.next()
            return Const(Iri(tok.value))
        if tok.kind == "PNAME":
            self.next()
            return Const(self.resolve_pname(tok))
        raise self.error("expected an expression")


def _number_literal(raw: str) -> Literal:
    lowered = raw.lower()
    if "e" in lowered:
        return Literal(raw, XSD_DOUBLE)
    if "." in raw:
        return Literal(raw, XSD_DECIMAL)
    return Literal(raw, XSD_INTEGER)


def parse_sparql_subset(text: str) -> QueryAst:
    """Parse SELECT text in the supported subset, or raise SubsetSyntaxError."""
    return _Parser(_tokenize(text)).parse_query()


_DEFAULT_EXPR_PREFIXES = {
    "xsd": "http://www.w3.org/2001/XMLSchema#",
}


def parse_expression(text: str) -> Expr:
    """Parse a standalone filter expression (test and tooling helper)."""
    parser = _Parser(_tokenize(text), prefixes=_DEFAULT_EXPR_PREFIXES)
    expr = parser.parse_expr()
    if parser.peek().kind != "EOF":
        raise parser.error("unexpected trailing content")
    return expr
