"""Evaluator for parsed subset queries over in-memory graphs.

Implements standard SELECT semantics on the subset: backtracking joins
over basic graph patterns, left-join for OPTIONAL, bag union for UNION,
and error-as-false filters. Evaluation is deterministic: triples are
visited in the store's sorted order and ORDER BY uses a stable sort, so
equal inputs always produce the identical table, row order included.
"""

from __future__ import annotations

import math
import re
from typing import Iterator, Optional, Union

from .rdf import (
    BlankNode,
    Graph,
    Iri,
    Literal,
    Term,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_FLOAT,
    XSD_INTEGER,
    XSD_STRING,
    boolean_value,
    datetime_value,
    numeric_value,
    order_key,
)
from .sparql_subset import (
    AndExpr,
    Arith,
    Comparison,
    Const,
    Expr,
    FilterExpr,
    FuncCall,
    GroupPattern,
    Neg,
    OptionalBlock,
    OrExpr,
    QueryAst,
    TriplePattern,
    TriplesBlock,
    UnionBlock,
    Var,
)
from .table import Cell, ResultTable

Solution = dict[str, Term]


class _ErrorType:
    """Expression type-error sentinel (SPARQL 'error' value)."""

    def __repr__(self):
        return "<eval-error>"


ERROR = _ErrorType()

Value = Union[Term, int, float, bool, str, _ErrorType]


# --- Expression evaluation -------------------------------------------------


def _as_number(value: Value):
    if isinstance(value, bool) or value is ERROR:
        return None
    if isinstance(value, (int, float)):
        return value
    if isinstance(value, Literal):
        return numeric_value(value)
    return None


def _as_datetime(value: Value):
    if isinstance(value, Literal):
        return datetime_value(value)
    return None


def _as_boolean(value: Value):
    if isinstance(value, bool):
        return value
    if isinstance(value, Literal):
        return boolean_value(value)
    return None


def _as_plain_text(value: Value):
    """String value for comparison: plain strings and xsd:string literals."""
    if isinstance(value, str):
        return value
    if isinstance(value, Literal) and value.datatype == XSD_STRING and not value.lang:
        return value.lexical
    return None


def _as_text(value: Value):
    """String value for the string functions; language tags are allowed."""
    if isinstance(value, str):
        return value
    if isinstance(value, Literal) and value.datatype == XSD_STRING:
        return value.lexical
    return None


def _str_function(value: Value):
    if isinstance(value, Iri):
        return value.value
    if isinstance(value, Literal):
        return value.lexical
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return ERROR


_REGEX_FLAG_MAP = {"i": re.IGNORECASE, "s": re.DOTALL, "m": re.MULTILINE, "x": re.VERBOSE}


def _compare(op: str, left: Value, right: Value):
    if left is ERROR or right is ERROR:
        return ERROR
    ln, rn = _as_number(left), _as_number(right)
    if ln is not None and rn is not None:
        return _apply_order_op(op, ln, rn)
    ld, rd = _as_datetime(left), _as_datetime(right)
    if ld is not None and rd is not None:
        return _apply_order_op(op, ld, rd)
    lb, rb = _as_boolean(left), _as_boolean(right)
    if lb is not None and rb is not None:
        return _apply_order_op(op, int(lb), int(rb))
    ls, rs = _as_plain_text(left), _as_plain_text(right)
    if ls is not None and rs is not None:
        return _apply_order_op(op, ls, rs)
    if op in ("=", "!="):
        if isinstance(left, Iri) and isinstance(right, Iri):
            return (left == right) if op == "=" else (left != right)
        if isinstance(left, BlankNode) and isinstance(right, BlankNode):
            return (left == right) if op == "=" else (left != right)
        if isinstance(left, Literal) and isinstance(right, Literal):
            if left == right:
                return op == "="
            return ERROR
        return op == "!="
    return ERROR


def _apply_order_op(op: str, left, right):
    if op == "=":
        return left == right
    if op == "!=":
        return left != right
    if op == "<":
        return left < right
    if op == ">":
        return left > right
    if op == "<=":
        return left <= right
    return left >= right


def effective_boolean(value: Value):
    if value is ERROR:
        return ERROR
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float)):
        return value != 0 and not (isinstance(value, float) and math.isnan(value))
    if isinstance(value, str):
        return len(value) > 0
    if isinstance(value, Literal):
        if value.datatype == XSD_BOOLEAN:
            return bool(boolean_value(value))
        if value.datatype in (XSD_INTEGER, XSD_DECIMAL, XSD_DOUBLE, XSD_FLOAT):
            number = numeric_value(value)
            if number is None:
                return False
            return number != 0 and not (isinstance(number, float) and math.isnan(number))
        if value.datatype == XSD_STRING and not value.lang:
            return len(value.lexical) > 0
    return ERROR


def eval_expression(expr: Expr, solution: Solution) -> Value:
    if isinstance(expr, Var):
        return solution.get(expr.name, ERROR)
    if isinstance(expr, Const):
        return expr.term
    if isinstance(expr, OrExpr):
        saw_error = False
        for term in expr.terms:
            truth = effective_boolean(eval_expression(term, solution))
            if truth is True:
                return True
            if truth is ERROR:
                saw_error = True
        return ERROR if saw_error else False
    if isinstance(expr, AndExpr):
        saw_error = False
        for term in expr.terms:
            truth = effective_boolean(eval_expression(term, solution))
            if truth is False:
                return False
            if truth is ERROR:
                saw_error = True
        return ERROR if saw_error else True
    if isinstance(expr, Comparison):
        return _compare(expr.op, eval_expression(expr.left, solution), eval_expression(expr.right, solution))
    if isinstance(expr, Arith):
        ln = _as_number(eval_expression(expr.left, solution))
        rn = _as_number(eval_expression(expr.right, solution))
        if ln is None or rn is None:
            return ERROR
        if expr.op == "+":
            return ln + rn
        if expr.op == "-":
            return ln - rn
        return ln * rn
    if isinstance(expr, Neg):
        value = _as_number(eval_expression(expr.operand, solution))
        return ERROR if value is None else -value
    if isinstance(expr, FuncCall):
        return _eval_function(expr, solution)
    raise TypeError(f"unknown expression node {type(expr).__name__}")


def _eval_function(expr: FuncCall, solution: Solution) -> Value:
    args = [eval_expression(a, solution) for a in expr.args]
    if any(a is ERROR for a in args):
        return ERROR
    if expr.name == "STR":
        return _str_function(args[0])
    if expr.name == "LCASE":
        text = _as_text(args[0])
        return ERROR if text is None else text.lower()
    if expr.name == "CONTAINS":
        hay, needle = _as_text(args[0]), _as_text(args[1])
        if hay is None or needle is None:
            return ERROR
        return needle in hay
    # REGEX
    text = _as_text(args[0])
    pattern = _as_text(args[1])
    flags_text = _as_text(args[2]) if len(args) == 3 else ""
    if text is None or pattern is None or flags_text is None:
        return ERROR
    flags = 0
    for ch in flags_text:
        if ch not in _REGEX_FLAG_MAP:
            return ERROR
        flags |= _REGEX_FLAG_MAP[ch]
    try:
        return re.search(pattern, text, flags) is not None
    except re.error:
        return ERROR


def filter_passes(expr: Expr, solution: Solution) -> bool:
    """Error-as-false filter semantics."""
    return effective_boolean(eval_expression(expr, solution)) is True


# --- Pattern matching ------------------------------------------------------


def _resolve(node, solution: Solution):
    if isinstance(node, Var):
        return solution.get(node.name)
    return node


def _unify(solution: Solution, pattern: TriplePattern, triple) -> Optional[Solution]:
    out = solution
    for node, value in (
        (pattern.subject, triple.subject),
        (pattern.predicate, triple.predicate),
        (pattern.object, triple.object),
    ):
        if isinstance(node, Var):
            bound = out.get(node.name)
            if bound is None:
                if out is solution:
                    out = dict(solution)
                out[node.name] = value
            elif bound != value:
                return None
        elif node != value:
            return None
    return out


def _candidate_triples(pattern: TriplePattern, solution: Solution, graph: Graph) -> Iterator:
    from .rdf import Triple

    s = _resolve(pattern.subject, solution)
    p = _resolve(pattern.predicate, solution)
    o = _resolve(pattern.object, solution)
    if isinstance(p, Iri):
        if s is not None:
            for obj in graph.objects(s, p.value):
                yield Triple(s, p, obj)
        elif o is not None:
            for subj in graph.subjects(p.value, o):
                yield Triple(subj, p, o)
        else:
            yield from graph.with_predicate(p.value)
    else:
        yield from graph.triples()


def _extend(solutions: list[Solution], pattern: TriplePattern, graph: Graph) -> list[Solution]:
    out = []
    for solution in solutions:
        for triple in _candidate_triples(pattern, solution, graph):
            merged = _unify(solution, pattern, triple)
            if merged is not None:
                out.append(merged)
    return out


def eval_group(group: GroupPattern, graph: Graph, initial: list[Solution]) -> list[Solution]:
    solutions = initial
    filters = []
    for element in group.elements:
        if isinstance(element, TriplesBlock):
            for pattern in element.patterns:
                solutions = _extend(solutions, pattern, graph)
        elif isinstance(element, OptionalBlock):
            extended = []
            for solution in solutions:
                matches = eval_group(element.group, graph, [solution])
                extended.extend(matches if matches else [solution])
            solutions = extended
        elif isinstance(element, UnionBlock):
            combined = []
            for branch in element.branches:
                combined.extend(eval_group(branch, graph, solutions))
            solutions = combined
        elif isinstance(element, FilterExpr):
            filters.append(element.expr)
        else:
            raise TypeError(f"unknown group element {type(element).__name__}")
    if filters:
        solutions = [s for s in solutions if all(filter_passes(f, s) for f in filters)]
    return solutions


def _order_value(expr: Expr, solution: Solution):
    value = eval_expression(expr, solution)
    if value is ERROR:
        return None
    return value


def evaluate(ast: QueryAst, graph: Graph) -> ResultTable:
    """Evaluate a parsed subset query over a graph; total for parsed input."""
    solutions = eval_group(ast.where, graph, [{}])
    if ast.order is not None:
        direction, key_expr = ast.order
        solutions = sorted(
            solutions,
            key=lambda s: order_key(_order_value(key_expr, s)),
            reverse=direction == "DESC",
        )
    columns = list(ast.select_vars) if ast.select_vars is not None else list(ast.pattern_vars)
    rows = []
    for solution in solutions:
        rows.append(
            [Cell.from_term(solution[v]) if v in solution else Cell.unbound() for v in columns]
        )
    if ast.distinct:
        seen = set()
        unique = []
        for row in rows:
            key = tuple(cell.key() for cell in row)
            if key not in seen:
                seen.add(key)
                unique.append(row)
        rows = unique
    if ast.limit is not None:
        rows = rows[: ast.limit]
    return ResultTable(columns, rows)
