"""Text formats: the graph/schema DSL and the JSON compliance report.

Object graphs (``.og``)::

    graph fig1 {
      node Romeo { name = "Romeo"; house = "Montague"; }
      arc hasKilled: Romeo -> Tybalt { killing = "sword"; }
    }

Class graphs (``.cg``)::

    schema fig2 {
      class MrMontague { house: = "Montague"; sex: = "male"; }
      arc hasKilled: MrMontague -> Capulet { killing: exists; }
    }

``#`` starts a line comment.  Nested object values are written as inline
``{ name = value; ... }`` blocks.  Printing is canonical: ids sorted, two
spaces of indentation, one property per line.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Generic, TypeVar

from graphcomply.compliance import CandidatePair, ComplianceMode, ComplianceReport, Conflict
from graphcomply.lexer import ParseError, SourceSpan, Token, TokenStream, tokenize
from graphcomply.model import (
    RESERVED_NAMES,
    ClassArc,
    ClassGraph,
    ClassNode,
    GraphModelError,
    ObjectArc,
    ObjectGraph,
    ObjectNode,
    Property,
    PropertyBag,
    PropertyConstraint,
)
from graphcomply.predicates import PredicateParser, parse_literal, print_literal, print_predicate

T = TypeVar("T")


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    message: str
    span: SourceSpan
    code: str = "error"

    def __str__(self) -> str:
        return f"{self.span}: {self.severity}: {self.message}"


@dataclass
class ParseDiagnostics:
    items: list[Diagnostic] = field(default_factory=list)

    def error(self, code: str, message: str, span: SourceSpan) -> None:
        self.items.append(Diagnostic("error", message, span, code))

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.items if d.severity == "error"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def __iter__(self):
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)


@dataclass
class ParseResult(Generic[T]):
    value: T | None
    diagnostics: ParseDiagnostics

    @property
    def ok(self) -> bool:
        return self.value is not None and self.diagnostics.ok


# -- parsing ----------------------------------------------------------------

@dataclass
class _Decl:
    kind: str  # "node", "class" or "arc"
    id_tok: Token
    members: list
    src_tok: Token | None = None
    dst_tok: Token | None = None


class _DocumentParser:
    def __init__(self, source: str, file: str, diags: ParseDiagnostics):
        self.ts = TokenStream(tokenize(source, file))
        self.diags = diags

    def _property(self, name_tok: Token, value) -> Property | None:
        if name_tok.text in RESERVED_NAMES:
            self.diags.error(
                "ReservedPropertyName",
                f"property name {name_tok.text!r} is reserved for arc endpoints",
                name_tok.span,
            )
            return None
        return Property(name_tok.text, value)

    def _bag_body(self) -> list[Property]:
        ts = self.ts
        ts.expect("{")
        props = []
        while not ts.at("}"):
            if ts.peek().kind == "eof":
                raise ts.error("unexpected end of input", ["property name", "'}'"])
            name = ts.expect_ident("property name")
            ts.expect("=")
            value = parse_literal(ts, self._property)
            ts.expect(";")
            prop = self._property(name, value)
            if prop is not None:
                props.append(prop)
        ts.expect("}")
        return props

    def _constraint_body(self) -> list[PropertyConstraint]:
        ts = self.ts
        ts.expect("{")
        out = []
        while not ts.at("}"):
            if ts.peek().kind == "eof":
                raise ts.error("unexpected end of input", ["constraint name", "'}'"])
            name = ts.expect_ident("constraint name")
            ts.expect(":")
            pred = PredicateParser(ts).parse()
            if not ts.at(";"):
                raise ts.error(f"unexpected {ts.peek().describe()}", ["';'", "'and'", "'or'"])
            ts.next()
            if name.text in RESERVED_NAMES:
                self.diags.error(
                    "ReservedPropertyName",
                    f"constraint name {name.text!r} is reserved for arc endpoints",
                    name.span,
                )
                continue
            out.append(PropertyConstraint(name.text, pred))
        ts.expect("}")
        return out

    def document(self, header: str, vertex_kw: str, body: Callable[[], list]) -> tuple[Token, list[_Decl]]:
        ts = self.ts
        ts.expect(header)
        name = ts.expect_ident(f"{header} name")
        ts.expect("{")
        decls: list[_Decl] = []
        while not ts.at("}"):
            tok = ts.peek()
            if ts.accept(vertex_kw):
                ident = ts.expect_ident(f"{vertex_kw} id")
                decls.append(_Decl(vertex_kw, ident, body()))
            elif ts.accept("arc"):
                ident = ts.expect_ident("arc id")
                ts.expect(":")
                src = ts.expect_ident(f"source {vertex_kw} id")
                ts.expect("->")
                dst = ts.expect_ident(f"destination {vertex_kw} id")
                decls.append(_Decl("arc", ident, body(), src, dst))
            else:
                raise ts.error(f"unexpected {tok.describe()}", [repr(vertex_kw), "'arc'", "'}'"])
        ts.expect("}")
        if ts.peek().kind != "eof":
            raise ts.error(f"unexpected {ts.peek().describe()}", ["end of input"])
        return name, decls


def _check_structure(decls: list[_Decl], vertex_kw: str, diags: ParseDiagnostics) -> None:
    seen: dict[str, _Decl] = {}
    for d in decls:
        if d.id_tok.text in seen:
            first = seen[d.id_tok.text].id_tok.span
            diags.error(
                "DuplicateId",
                f"duplicate id {d.id_tok.text!r} (first declared at line {first.start_line})",
                d.id_tok.span,
            )
        else:
            seen[d.id_tok.text] = d
    vertices = {d.id_tok.text for d in decls if d.kind == vertex_kw}
    for d in decls:
        if d.kind != "arc":
            continue
        for end in (d.src_tok, d.dst_tok):
            if end.text not in vertices:
                diags.error(
                    "DanglingEndpoint",
                    f"arc {d.id_tok.text!r} refers to unknown {vertex_kw} {end.text!r}",
                    d.id_tok.span.to(end.span),
                )


def _parse(source: str, file: str, header: str, vertex_kw: str, build) -> ParseResult:
    diags = ParseDiagnostics()
    try:
        parser = _DocumentParser(source, file, diags)
        body = parser._bag_body if header == "graph" else parser._constraint_body
        name, decls = parser.document(header, vertex_kw, body)
    except ParseError as exc:
        diags.error("SyntaxError", exc.message, exc.span)
        return ParseResult(None, diags)
    _check_structure(decls, vertex_kw, diags)
    if not diags.ok:
        return ParseResult(None, diags)
    try:
        value = build(name.text, decls)
    except GraphModelError as exc:  # pragma: no cover - pre-checked above
        diags.error(type(exc).__name__, str(exc), name.span)
        return ParseResult(None, diags)
    return ParseResult(value, diags)


def _build_object_graph(name: str, decls: list[_Decl]) -> ObjectGraph:
    nodes = [ObjectNode(d.id_tok.text, PropertyBag(tuple(d.members))) for d in decls if d.kind == "node"]
    arcs = [
        ObjectArc(d.id_tok.text, d.src_tok.text, d.dst_tok.text, PropertyBag(tuple(d.members)))
        for d in decls
        if d.kind == "arc"
    ]
    return ObjectGraph(tuple(nodes), tuple(arcs), name=name)


def _build_class_graph(name: str, decls: list[_Decl]) -> ClassGraph:
    classes = [ClassNode(d.id_tok.text, tuple(d.members)) for d in decls if d.kind == "class"]
    arcs = [
        ClassArc(d.id_tok.text, d.src_tok.text, d.dst_tok.text, tuple(d.members))
        for d in decls
        if d.kind == "arc"
    ]
    return ClassGraph(tuple(classes), tuple(arcs), name=name)


def parse_object_graph(source: str, file: str = "<graph>") -> ParseResult[ObjectGraph]:
    return _parse(source, file, "graph", "node", _build_object_graph)


def parse_class_graph(source: str, file: str = "<schema>") -> ParseResult[ClassGraph]:
    return _parse(source, file, "schema", "class", _build_class_graph)


# -- printing ---------------------------------------------------------------

def _block(head: str, lines: list[str]) -> list[str]:
    if not lines:
        return [f"  {head} {{}}"]
    return [f"  {head} {{"] + [f"    {line}" for line in lines] + ["  }"]


def print_object_graph(g: ObjectGraph) -> str:
    out = [f"graph {g.name} {{"]
    for n in g.nodes:
        out += _block(f"node {n.id}", [f"{p.name} = {print_literal(p.value)};" for p in n.bag])
    for a in g.arcs:
        out += _block(
            f"arc {a.id}: {a.src} -> {a.dst}",
            [f"{p.name} = {print_literal(p.value)};" for p in a.bag],
        )
    out.append("}")
    return "\n".join(out) + "\n"


def print_class_graph(s: ClassGraph) -> str:
    out = [f"schema {s.name} {{"]
    for c in s.classes:
        out += _block(f"class {c.id}", [f"{pc.name}: {print_predicate(pc.predicate)};" for pc in c.constraints])
    for a in s.class_arcs:
        out += _block(
            f"arc {a.id}: {a.src} -> {a.dst}",
            [f"{pc.name}: {print_predicate(pc.predicate)};" for pc in a.constraints],
        )
    out.append("}")
    return "\n".join(out) + "\n"


# -- reports ----------------------------------------------------------------

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": [
        "mode", "compliant", "witness", "coveredClasses", "uncoveredClasses",
        "uncoveredNodes", "conflicts", "rawCompliant", "undecided",
    ],
    "properties": {
        "mode": {"enum": ["partial", "normal", "full"]},
        "compliant": {"type": "boolean"},
        "rawCompliant": {"type": "boolean"},
        "undecided": {"type": "boolean"},
        "witness": {"type": "array", "items": {"$ref": "#/$defs/pair"}},
        "coveredClasses": {"type": "array", "items": {"type": "string"}},
        "uncoveredClasses": {"type": "array", "items": {"type": "string"}},
        "uncoveredNodes": {"type": "array", "items": {"type": "string"}},
        "conflicts": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["classArc", "srcPair", "dstPair", "reason"],
                "properties": {
                    "classArc": {"type": "string"},
                    "srcPair": {"$ref": "#/$defs/pair"},
                    "dstPair": {"$ref": "#/$defs/pair"},
                    "reason": {"type": "string"},
                },
            },
        },
    },
    "$defs": {
        "pair": {
            "type": "object",
            "additionalProperties": False,
            "required": ["node", "class"],
            "properties": {"node": {"type": "string"}, "class": {"type": "string"}},
        }
    },
}


def _pair(p: CandidatePair) -> dict:
    return {"node": p.node, "class": p.class_id}


def report_to_dict(r: ComplianceReport) -> dict:
    return {
        "mode": r.mode.value,
        "compliant": r.compliant,
        "rawCompliant": r.raw_compliant,
        "undecided": r.undecided,
        "witness": [_pair(p) for p in r.witness],
        "coveredClasses": list(r.covered_classes),
        "uncoveredClasses": list(r.uncovered_classes),
        "uncoveredNodes": list(r.uncovered_nodes),
        "conflicts": [
            {
                "classArc": c.class_arc,
                "srcPair": _pair(c.src_pair),
                "dstPair": _pair(c.dst_pair),
                "reason": c.reason,
            }
            for c in r.conflicts
        ],
    }


def emit_report(r: ComplianceReport) -> str:
    return json.dumps(report_to_dict(r), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def load_report(text: str) -> ComplianceReport:
    d = json.loads(text)

    def pair(x: dict) -> CandidatePair:
        return CandidatePair(x["node"], x["class"])

    return ComplianceReport(
        mode=ComplianceMode(d["mode"]),
        compliant=d["compliant"],
        witness=tuple(pair(p) for p in d["witness"]),
        covered_classes=tuple(d["coveredClasses"]),
        uncovered_classes=tuple(d["uncoveredClasses"]),
        uncovered_nodes=tuple(d["uncoveredNodes"]),
        conflicts=tuple(
            Conflict(c["classArc"], pair(c["srcPair"]), pair(c["dstPair"]), c["reason"]) for c in d["conflicts"]
        ),
        raw_compliant=d["rawCompliant"],
        undecided=d["undecided"],
    )
