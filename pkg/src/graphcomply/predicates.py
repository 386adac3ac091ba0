"""Predicate expressions used as the right-hand side of property constraints.

Concrete syntax::

    pred    := or
    or      := and { "or" and }
    and     := unary { "and" unary }
    unary   := "not" unary | "(" pred ")" | atom
    atom    := "=" literal | "!=" literal | "<" number | "<=" number
             | ">" number | ">=" number | "in" "{" literal { "," literal } "}"
             | "matches" string | "exists"
    literal := string | number | "true" | "false" | "{" { ident "=" literal ";" } "}"

Evaluation is total: a comparison whose operand has the wrong type is
simply false.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal
from functools import lru_cache
from typing import Callable, Union

from graphcomply.lexer import ParseError, TokenStream
from graphcomply.model import (
    ClassGraph,
    ObjectGraph,
    ObjectNode,
    Property,
    PropertyBag,
    Value,
    is_number,
    value_key,
    value_kind,
)

__all__ = [
    "And", "Eq", "Exists", "Ge", "Gt", "In", "InstanceOfRef", "Le", "Lt", "Matches",
    "Neq", "Not", "Or", "PredicateExpr", "EvalContext", "RegexDialectError",
    "eval_predicate", "parse_predicate", "print_predicate", "literal_equal",
]


def _lit(v: Value) -> tuple:
    return value_key(v)


# AST nodes compare structurally through ``ast_key`` so that Int 13 and
# Dec 13.0 (or True and 1) never compare equal inside an expression.
class _Node:
    __slots__ = ()

    def __eq__(self, other: object) -> bool:
        return isinstance(other, _Node) and ast_key(self) == ast_key(other)

    def __hash__(self) -> int:
        return hash(ast_key(self))

    def __str__(self) -> str:
        return print_predicate(self)


@dataclass(frozen=True, eq=False)
class Eq(_Node):
    value: Value


@dataclass(frozen=True, eq=False)
class Neq(_Node):
    value: Value


@dataclass(frozen=True, eq=False)
class Lt(_Node):
    bound: int | Decimal


@dataclass(frozen=True, eq=False)
class Le(_Node):
    bound: int | Decimal


@dataclass(frozen=True, eq=False)
class Gt(_Node):
    bound: int | Decimal


@dataclass(frozen=True, eq=False)
class Ge(_Node):
    bound: int | Decimal


@dataclass(frozen=True, eq=False)
class In(_Node):
    values: tuple


@dataclass(frozen=True, eq=False)
class Matches(_Node):
    pattern: str

    def __post_init__(self) -> None:
        compile_pattern(self.pattern)


@dataclass(frozen=True, eq=False)
class Exists(_Node):
    pass


@dataclass(frozen=True, eq=False)
class InstanceOfRef(_Node):
    """Endpoint predicate: the value is a node that is an instance of ``class_id``."""

    class_id: str


@dataclass(frozen=True, eq=False)
class And(_Node):
    items: tuple


@dataclass(frozen=True, eq=False)
class Or(_Node):
    items: tuple


@dataclass(frozen=True, eq=False)
class Not(_Node):
    item: _Node


PredicateExpr = Union[Eq, Neq, Lt, Le, Gt, Ge, In, Matches, Exists, InstanceOfRef, And, Or, Not]

_COMPARISONS = {Lt: "<", Le: "<=", Gt: ">", Ge: ">="}


def ast_key(p: _Node) -> tuple:
    if isinstance(p, (Eq, Neq)):
        return (type(p).__name__, _lit(p.value))
    if isinstance(p, (Lt, Le, Gt, Ge)):
        return (type(p).__name__, _lit(p.bound))
    if isinstance(p, In):
        return ("In", tuple(_lit(v) for v in p.values))
    if isinstance(p, Matches):
        return ("Matches", p.pattern)
    if isinstance(p, Exists):
        return ("Exists",)
    if isinstance(p, InstanceOfRef):
        return ("InstanceOfRef", p.class_id)
    if isinstance(p, (And, Or)):
        return (type(p).__name__, tuple(ast_key(i) for i in p.items))
    if isinstance(p, Not):
        return ("Not", ast_key(p.item))
    raise TypeError(f"not a predicate: {p!r}")


# -- regex dialect ----------------------------------------------------------

class RegexDialectError(ValueError):
    pass


# Backreferences and lookaround are outside the dialect.
_FORBIDDEN_REGEX = re.compile(r"\\[1-9]|\\g|\(\?P=|\(\?<?[=!]|\(\?\(")


@lru_cache(maxsize=256)
def compile_pattern(pattern: str) -> re.Pattern:
    """Compile a ``matches`` pattern; the whole value must match."""
    # Skip escaped backslashes so `\\1` (literal backslash, then 1) is allowed.
    scrubbed = pattern.replace("\\\\", "")
    bad = _FORBIDDEN_REGEX.search(scrubbed)
    if bad:
        raise RegexDialectError(f"unsupported regex construct {bad.group()!r}")
    try:
        return re.compile(pattern)
    except re.error as exc:
        raise RegexDialectError(f"invalid regex: {exc}") from None


# -- evaluation -------------------------------------------------------------

@dataclass(frozen=True)
class EvalContext:
    """What predicates need beyond the value itself.

    Only ``InstanceOfRef`` looks at the context: ``instance_of`` decides
    whether an endpoint node belongs to a class of ``schema``.
    """

    schema: ClassGraph | None = None
    graph: ObjectGraph | None = None
    instance_of: Callable[[ObjectNode, str], bool] | None = None


def _comparable(a: object, b: object) -> bool:
    if isinstance(a, ObjectNode) or isinstance(b, ObjectNode):
        return False
    ka, kb = value_kind(a), value_kind(b)
    if ka in ("int", "dec"):
        return kb in ("int", "dec")
    return ka == kb


def literal_equal(a: Value, b: Value) -> bool:
    """Equality used by ``=``, ``!=`` and ``in``.

    Numbers compare on the number line regardless of int/decimal; objects
    compare structurally; different literal types are never equal.
    """
    if not _comparable(a, b):
        return False
    if is_number(a):
        return a == b
    if isinstance(a, PropertyBag):
        return value_key(a) == value_key(b)
    return a == b


def eval_predicate(p: PredicateExpr, v: object, ctx: EvalContext | None = None) -> bool:
    """Evaluate ``p`` against ``v``; never raises for well-formed ``p``."""
    if isinstance(p, Exists):
        return True
    if isinstance(p, And):
        return all(eval_predicate(i, v, ctx) for i in p.items)
    if isinstance(p, Or):
        return any(eval_predicate(i, v, ctx) for i in p.items)
    if isinstance(p, Not):
        return not eval_predicate(p.item, v, ctx)
    if isinstance(p, InstanceOfRef):
        if not isinstance(v, ObjectNode) or ctx is None or ctx.instance_of is None:
            return False
        return bool(ctx.instance_of(v, p.class_id))
    if isinstance(v, ObjectNode):
        return False
    if isinstance(p, Eq):
        return literal_equal(p.value, v)
    if isinstance(p, Neq):
        return _comparable(p.value, v) and not literal_equal(p.value, v)
    if isinstance(p, In):
        return any(literal_equal(x, v) for x in p.values)
    if isinstance(p, Matches):
        return isinstance(v, str) and compile_pattern(p.pattern).fullmatch(v) is not None
    if isinstance(p, (Lt, Le, Gt, Ge)):
        if not is_number(v):
            return False
        if isinstance(p, Lt):
            return v < p.bound
        if isinstance(p, Le):
            return v <= p.bound
        if isinstance(p, Gt):
            return v > p.bound
        return v >= p.bound
    raise TypeError(f"not a predicate: {p!r}")


# -- printing ---------------------------------------------------------------

def print_string(s: str) -> str:
    import json

    return json.dumps(s, ensure_ascii=False)


def print_literal(v: Value) -> str:
    kind = value_kind(v)
    if kind == "bool":
        return "true" if v else "false"
    if kind in ("int", "dec"):
        return str(v)
    if kind == "text":
        return print_string(v)  # type: ignore[arg-type]
    props = v.properties  # type: ignore[union-attr]
    if not props:
        return "{ }"
    inner = " ".join(f"{p.name} = {print_literal(p.value)};" for p in props)
    return "{ " + inner + " }"


_PRECEDENCE = {Or: 1, And: 2, Not: 3}


def print_predicate(p: PredicateExpr) -> str:
    return _print(p, 0)


def _print(p: _Node, parent: int) -> str:
    prec = _PRECEDENCE.get(type(p), 4)
    if isinstance(p, (And, Or)):
        sep = " and " if isinstance(p, And) else " or "
        # Nested same-operator groups keep their parentheses so the tree
        # shape survives a round-trip.
        text = sep.join(_print(i, prec + 1) for i in p.items)
    elif isinstance(p, Not):
        text = "not " + _print(p.item, prec)
    elif isinstance(p, Eq):
        text = "= " + print_literal(p.value)
    elif isinstance(p, Neq):
        text = "!= " + print_literal(p.value)
    elif type(p) in _COMPARISONS:
        text = f"{_COMPARISONS[type(p)]} {p.bound}"
    elif isinstance(p, In):
        text = "in { " + ", ".join(print_literal(v) for v in p.values) + " }"
    elif isinstance(p, Matches):
        text = "matches " + print_string(p.pattern)
    elif isinstance(p, Exists):
        text = "exists"
    elif isinstance(p, InstanceOfRef):
        # Not part of the user grammar; printed for diagnostics only.
        text = f"instanceOf {p.class_id}"
    else:
        raise TypeError(f"not a predicate: {p!r}")
    if prec < parent:
        return f"({text})"
    return text


# -- parsing ----------------------------------------------------------------

_ATOM_STARTS = ("=", "!=", "<", "<=", ">", ">=", "in", "matches", "exists")
_UNARY_STARTS = _ATOM_STARTS + ("not", "(")


class PredicateParser:
    """Recursive-descent parser over a shared token stream.

    The graph DSL embeds predicates after ``name:``; it hands its stream to
    this parser and resumes at the first token that cannot continue a
    predicate.
    """

    def __init__(self, stream: TokenStream):
        self.ts = stream

    def parse(self) -> PredicateExpr:
        return self._or()

    def _or(self) -> PredicateExpr:
        items = [self._and()]
        while self.ts.accept("or"):
            items.append(self._and())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def _and(self) -> PredicateExpr:
        items = [self._unary()]
        while self.ts.accept("and"):
            items.append(self._unary())
        return items[0] if len(items) == 1 else And(tuple(items))

    def _unary(self) -> PredicateExpr:
        ts = self.ts
        if ts.accept("not"):
            return Not(self._unary())
        if ts.accept("("):
            inner = self._or()
            ts.expect(")")
            return inner
        return self._atom()

    def _atom(self) -> PredicateExpr:
        ts = self.ts
        tok = ts.peek()
        if not ts.at(*_ATOM_STARTS):
            raise ts.error(f"unexpected {tok.describe()}", [repr(t) for t in _UNARY_STARTS])
        op = ts.next().text
        if op == "exists":
            return Exists()
        if op == "=":
            return Eq(self.literal())
        if op == "!=":
            return Neq(self.literal())
        if op in ("<", "<=", ">", ">="):
            bound = self._number()
            return {"<": Lt, "<=": Le, ">": Gt, ">=": Ge}[op](bound)
        if op == "in":
            ts.expect("{")
            values = [self.literal()]
            while ts.accept(","):
                values.append(self.literal())
            ts.expect("}")
            return In(tuple(values))
        # matches
        pat = ts.peek()
        if pat.kind != "string":
            raise ts.error(f"unexpected {pat.describe()}", ["string"])
        ts.next()
        try:
            return Matches(pat.value)  # type: ignore[arg-type]
        except RegexDialectError as exc:
            raise ParseError(str(exc), pat.span) from None

    def _number(self):
        tok = self.ts.peek()
        if tok.kind != "number":
            raise self.ts.error(f"unexpected {tok.describe()}", ["number"])
        self.ts.next()
        return tok.value

    def literal(self) -> Value:
        return parse_literal(self.ts)


_LITERAL_EXPECTED = ["string", "number", "'true'", "'false'", "'{'"]


def parse_literal(ts: TokenStream, on_property: Callable | None = None) -> Value:
    """Parse ``string | number | true | false | { name = literal; ... }``.

    ``on_property(name_token, property)`` lets the graph DSL observe nested
    properties (for reserved-name diagnostics); by default a reserved name
    is a hard parse error.
    """
    tok = ts.peek()
    if tok.kind in ("string", "number"):
        ts.next()
        return tok.value  # type: ignore[return-value]
    if tok.kind == "ident" and tok.text in ("true", "false"):
        ts.next()
        return tok.text == "true"
    if ts.accept("{"):
        props = []
        while not ts.at("}"):
            name = ts.expect_ident("property name")
            ts.expect("=")
            value = parse_literal(ts, on_property)
            ts.expect(";")
            props.append(_make_property(name, value, on_property))
        ts.expect("}")
        return PropertyBag(tuple(p for p in props if p is not None))
    raise ts.error(f"unexpected {tok.describe()}", _LITERAL_EXPECTED)


def _make_property(name_tok, value, on_property):
    from graphcomply.model import GraphModelError

    if on_property is not None:
        return on_property(name_tok, value)
    try:
        return Property(name_tok.text, value)
    except GraphModelError as exc:
        raise ParseError(str(exc), name_tok.span) from None


def parse_predicate(source: str, file: str = "<predicate>") -> PredicateExpr:
    ts = TokenStream.from_source(source, file)
    expr = PredicateParser(ts).parse()
    tok = ts.peek()
    if tok.kind != "eof":
        raise ts.error(f"unexpected {tok.describe()}", ["'and'", "'or'", "end of input"])
    return expr
