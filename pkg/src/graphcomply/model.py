"""Immutable data model for object-based and class-based graphs.

Object-based graphs hold nodes and arcs that are bags of properties; arcs
additionally point at a source and a destination node.  Class-based graphs
mirror that shape at the schema level: classes and class arcs are bags of
named predicates (property constraints).

Every container sorts its members by a canonical key so that enumeration,
printing and reports are stable across runs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import Decimal
from typing import TYPE_CHECKING, Iterable, Union

if TYPE_CHECKING:
    from graphcomply.predicates import PredicateExpr

RESERVED_NAMES = frozenset({"src", "dst"})
IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

Value = Union[str, int, Decimal, bool, "PropertyBag"]


class GraphModelError(ValueError):
    """Base class for graph construction errors.

    ``ident`` names the offending node, arc, class or property so that
    callers holding source positions can point at it.
    """

    def __init__(self, message: str, ident: str | None = None):
        super().__init__(message)
        self.ident = ident


class DanglingEndpoint(GraphModelError):
    pass


class DuplicateId(GraphModelError):
    pass


class ReservedPropertyName(GraphModelError):
    pass


class InvalidIdentifier(GraphModelError):
    pass


class InvalidValue(GraphModelError):
    pass


class UnknownId(GraphModelError, LookupError):
    pass


def check_identifier(name: str, what: str = "identifier") -> str:
    if not isinstance(name, str) or not IDENTIFIER.match(name):
        raise InvalidIdentifier(f"invalid {what}: {name!r}", name if isinstance(name, str) else None)
    return name


# -- values -----------------------------------------------------------------

def is_number(v: object) -> bool:
    return (isinstance(v, int) and not isinstance(v, bool)) or isinstance(v, Decimal)


def value_kind(v: object) -> str:
    """Literal type tag: ``text``, ``int``, ``dec``, ``bool`` or ``obj``."""
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, int):
        return "int"
    if isinstance(v, Decimal):
        return "dec"
    if isinstance(v, str):
        return "text"
    if isinstance(v, PropertyBag):
        return "obj"
    raise InvalidValue(f"unsupported value type: {type(v).__name__}")


def check_value(v: object) -> None:
    kind = value_kind(v)
    if kind == "dec" and not v.is_finite():  # type: ignore[union-attr]
        raise InvalidValue(f"decimal values must be finite, got {v}")


_KIND_RANK = {"bool": 0, "int": 1, "dec": 1, "text": 2, "obj": 3}


def value_key(v: Value) -> tuple:
    """Structural key: equal keys mean structurally identical values.

    Unlike ``==``, the key keeps ``True`` apart from ``1`` and ``13`` apart
    from ``13.0``; it also orders values of mixed types.
    """
    kind = value_kind(v)
    if kind == "obj":
        return (3, "obj", tuple(p.key for p in v.properties))  # type: ignore[union-attr]
    if kind == "dec":
        return (1, "dec", v)
    if kind == "int":
        return (1, "int", v)
    return (_KIND_RANK[kind], kind, v)


# -- properties -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Property:
    name: str
    value: Value

    def __post_init__(self) -> None:
        check_identifier(self.name, "property name")
        if self.name in RESERVED_NAMES:
            raise ReservedPropertyName(
                f"property name {self.name!r} is reserved for arc endpoints", self.name
            )
        check_value(self.value)

    @property
    def key(self) -> tuple:
        return (self.name, value_key(self.value))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Property) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __lt__(self, other: Property) -> bool:
        return self.key < other.key


@dataclass(frozen=True)
class PropertyBag:
    """A finite multiset of properties; exact duplicates collapse.

    Several properties may share a name as long as their values differ.
    Stored sorted by (name, value).
    """

    properties: tuple[Property, ...] = ()

    def __post_init__(self) -> None:
        props = self.properties
        for p in props:
            if not isinstance(p, Property):
                raise TypeError(f"expected Property, got {type(p).__name__}")
        object.__setattr__(self, "properties", tuple(sorted(set(props))))

    @classmethod
    def of(cls, *pairs: tuple[str, Value], **named: Value) -> PropertyBag:
        props = [Property(n, v) for n, v in pairs]
        props += [Property(n, v) for n, v in named.items()]
        return cls(tuple(props))

    def __iter__(self):
        return iter(self.properties)

    def __len__(self) -> int:
        return len(self.properties)

    def named(self, name: str) -> list[Property]:
        return [p for p in self.properties if p.name == name]

    def names(self) -> set[str]:
        return {p.name for p in self.properties}


# -- object-based graph -----------------------------------------------------

@dataclass(frozen=True)
class ObjectNode:
    id: str
    bag: PropertyBag = PropertyBag()

    def __post_init__(self) -> None:
        check_identifier(self.id, "node id")


@dataclass(frozen=True)
class ObjectArc:
    id: str
    src: str
    dst: str
    bag: PropertyBag = PropertyBag()

    def __post_init__(self) -> None:
        check_identifier(self.id, "arc id")
        check_identifier(self.src, "node id")
        check_identifier(self.dst, "node id")


def _index(items: Iterable, what: str) -> dict:
    index: dict = {}
    for item in items:
        if item.id in index:
            raise DuplicateId(f"duplicate {what} id {item.id!r}", item.id)
        index[item.id] = item
    return index


class _GraphBase:
    """Shared id lookups and adjacency for both graph flavours."""

    _vertex_word = "node"

    def _build_indexes(self, vertices, edges) -> None:
        vindex = _index(vertices, self._vertex_word)
        eindex = _index(edges, "arc")
        shared = vindex.keys() & eindex.keys()
        if shared:
            ident = min(shared)
            raise DuplicateId(f"id {ident!r} names both a {self._vertex_word} and an arc", ident)
        for e in edges:
            for end in (e.src, e.dst):
                if end not in vindex:
                    raise DanglingEndpoint(
                        f"arc {e.id!r} refers to unknown {self._vertex_word} {end!r}", e.id
                    )
        outgoing: dict[str, list] = {k: [] for k in vindex}
        incoming: dict[str, list] = {k: [] for k in vindex}
        for e in edges:
            outgoing[e.src].append(e)
            incoming[e.dst].append(e)
        object.__setattr__(self, "_vindex", vindex)
        object.__setattr__(self, "_eindex", eindex)
        object.__setattr__(self, "_out", {k: tuple(v) for k, v in outgoing.items()})
        object.__setattr__(self, "_in", {k: tuple(v) for k, v in incoming.items()})

    def _vertex(self, ident: str):
        try:
            return self._vindex[ident]
        except KeyError:
            raise UnknownId(f"unknown {self._vertex_word} {ident!r}", ident) from None

    def arc(self, ident: str):
        try:
            return self._eindex[ident]
        except KeyError:
            raise UnknownId(f"unknown arc {ident!r}", ident) from None

    def has_vertex(self, ident: str) -> bool:
        return ident in self._vindex

    def has_arc(self, ident: str) -> bool:
        return ident in self._eindex

    def arcs_from(self, ident: str) -> tuple:
        """Arcs whose source is ``ident``, sorted by arc id (loops included)."""
        self._vertex(ident)
        return self._out[ident]

    def arcs_to(self, ident: str) -> tuple:
        """Arcs whose destination is ``ident``, sorted by arc id (loops included)."""
        self._vertex(ident)
        return self._in[ident]


def _sorted_by_id(items: Iterable) -> tuple:
    items = tuple(items)
    return tuple(sorted(items, key=lambda x: x.id))


@dataclass(frozen=True)
class ObjectGraph(_GraphBase):
    nodes: tuple[ObjectNode, ...] = ()
    arcs: tuple[ObjectArc, ...] = ()
    name: str = field(default="g", compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", _sorted_by_id(self.nodes))
        object.__setattr__(self, "arcs", _sorted_by_id(self.arcs))
        self._build_indexes(self.nodes, self.arcs)

    def node(self, ident: str) -> ObjectNode:
        return self._vertex(ident)

    has_node = _GraphBase.has_vertex


@dataclass(frozen=True)
class PropertyConstraint:
    name: str
    predicate: PredicateExpr

    def __post_init__(self) -> None:
        check_identifier(self.name, "constraint name")
        if self.name in RESERVED_NAMES:
            raise ReservedPropertyName(
                f"constraint name {self.name!r} is reserved for arc endpoints", self.name
            )

    @property
    def key(self) -> tuple:
        from graphcomply.predicates import print_predicate

        return (self.name, print_predicate(self.predicate))


def _sorted_constraints(constraints: Iterable[PropertyConstraint]) -> tuple:
    constraints = tuple(constraints)
    for c in constraints:
        if not isinstance(c, PropertyConstraint):
            raise TypeError(f"expected PropertyConstraint, got {type(c).__name__}")
    return tuple(sorted(constraints, key=lambda c: c.key))


@dataclass(frozen=True)
class ClassNode:
    id: str
    constraints: tuple[PropertyConstraint, ...] = ()

    def __post_init__(self) -> None:
        check_identifier(self.id, "class id")
        object.__setattr__(self, "constraints", _sorted_constraints(self.constraints))


@dataclass(frozen=True)
class ClassArc:
    id: str
    src: str
    dst: str
    constraints: tuple[PropertyConstraint, ...] = ()

    def __post_init__(self) -> None:
        check_identifier(self.id, "class arc id")
        check_identifier(self.src, "class id")
        check_identifier(self.dst, "class id")
        object.__setattr__(self, "constraints", _sorted_constraints(self.constraints))


@dataclass(frozen=True)
class ClassGraph(_GraphBase):
    classes: tuple[ClassNode, ...] = ()
    class_arcs: tuple[ClassArc, ...] = ()
    name: str = field(default="s", compare=False)

    _vertex_word = "class"

    def __post_init__(self) -> None:
        object.__setattr__(self, "classes", _sorted_by_id(self.classes))
        object.__setattr__(self, "class_arcs", _sorted_by_id(self.class_arcs))
        self._build_indexes(self.classes, self.class_arcs)

    def class_(self, ident: str) -> ClassNode:
        return self._vertex(ident)

    has_class = _GraphBase.has_vertex


def build_object_graph(nodes: Iterable[ObjectNode], arcs: Iterable[ObjectArc], name: str = "g") -> ObjectGraph:
    return ObjectGraph(tuple(nodes), tuple(arcs), name=name)


def build_class_graph(classes: Iterable[ClassNode], class_arcs: Iterable[ClassArc], name: str = "s") -> ClassGraph:
    return ClassGraph(tuple(classes), tuple(class_arcs), name=name)


def arcs_from(g: ObjectGraph | ClassGraph, ident: str) -> tuple:
    return g.arcs_from(ident)


def arcs_to(g: ObjectGraph | ClassGraph, ident: str) -> tuple:
    return g.arcs_to(ident)
