"""Local relations between graph elements and schema elements.

``instance_of`` is the generic "every constraint is met by some property"
test.  For arcs it also sees the two endpoint entries: the arc's ``src`` and
``dst`` nodes are checked against instanceOf predicates naming the class
arc's endpoint classes.  The membership variants split that test apart:
strict membership looks at the arc's own properties only, left/right add one
endpoint, full adds both.
"""

from __future__ import annotations

from enum import Enum
from typing import Iterable, Union

from graphcomply.model import (
    ClassArc,
    ClassGraph,
    ClassNode,
    ObjectArc,
    ObjectGraph,
    ObjectNode,
    Property,
    PropertyConstraint,
)
from graphcomply.predicates import EvalContext, InstanceOfRef, eval_predicate, print_predicate

Entity = Union[ObjectNode, ObjectArc]
ClassEntity = Union[ClassNode, ClassArc]


class MembershipKind(Enum):
    NODE_STRICT = "node-strict"
    ARC_STRICT = "arc-strict"
    ARC_LEFT = "arc-left"
    ARC_RIGHT = "arc-right"
    ARC_FULL = "arc-full"
    NODE_RELATIONAL = "node-relational"

    @property
    def for_arcs(self) -> bool:
        return self.name.startswith("ARC_")


def make_context(graph: ObjectGraph | None, schema: ClassGraph | None, memo: bool = True) -> EvalContext:
    """Context whose instanceOf callback resolves class ids in ``schema``.

    With ``memo`` the node/class verdicts are cached; the cache only stores
    results of a pure function, so answers are the same either way.
    """
    cache: dict[tuple[ObjectNode, str], bool] = {}

    def node_instance_of(node: ObjectNode, class_id: str) -> bool:
        if schema is None or not schema.has_class(class_id):
            return False
        if not memo:
            return instance_of(node, schema.class_(class_id), ctx)
        key = (node, class_id)
        if key not in cache:
            cache[key] = instance_of(node, schema.class_(class_id), ctx)
        return cache[key]

    ctx = EvalContext(schema=schema, graph=graph, instance_of=node_instance_of)
    return ctx


def satisfies(p: Property, pc: PropertyConstraint, ctx: EvalContext | None = None) -> bool:
    return p.name == pc.name and eval_predicate(pc.predicate, p.value, ctx)


def _all_met(entries: Iterable[tuple[str, object]], constraints: Iterable[tuple[str, object]], ctx) -> bool:
    entries = list(entries)
    return all(
        any(name == cname and eval_predicate(pred, value, ctx) for name, value in entries)
        for cname, pred in constraints
    )


def _entries(o: Entity, ctx: EvalContext | None) -> list[tuple[str, object]]:
    entries: list[tuple[str, object]] = [(p.name, p.value) for p in o.bag]
    if isinstance(o, ObjectArc):
        graph = ctx.graph if ctx is not None else None
        if graph is not None and graph.has_node(o.src) and graph.has_node(o.dst):
            entries.append(("src", graph.node(o.src)))
            entries.append(("dst", graph.node(o.dst)))
    return entries


def _constraint_entries(c: ClassEntity) -> list[tuple[str, object]]:
    out: list[tuple[str, object]] = [(pc.name, pc.predicate) for pc in c.constraints]
    if isinstance(c, ClassArc):
        out.append(("src", InstanceOfRef(c.src)))
        out.append(("dst", InstanceOfRef(c.dst)))
    return out


def instance_of(o: Entity, c: ClassEntity, ctx: EvalContext | None = None) -> bool:
    """True iff every constraint of ``c`` is satisfied by some entry of ``o``.

    Arc endpoints take part as ``src``/``dst`` entries, which needs
    ``ctx.graph`` to resolve node ids and ``ctx.instance_of`` to judge them.
    """
    return _all_met(_entries(o, ctx), _constraint_entries(c), ctx)


def node_strict_member(n: ObjectNode, c: ClassNode, ctx: EvalContext | None = None) -> bool:
    return instance_of(n, c, ctx)


def arc_strict_member(a: ObjectArc, ca: ClassArc, ctx: EvalContext | None = None) -> bool:
    return all(any(satisfies(p, pc, ctx) for p in a.bag) for pc in ca.constraints)


def _endpoint_member(node_id: str, class_id: str, ctx: EvalContext) -> bool:
    graph, schema = ctx.graph, ctx.schema
    if graph is None or schema is None:
        raise ValueError("endpoint membership needs a context with graph and schema")
    return node_strict_member(graph.node(node_id), schema.class_(class_id), ctx)


def arc_left_member(a: ObjectArc, ca: ClassArc, ctx: EvalContext) -> bool:
    return arc_strict_member(a, ca, ctx) and _endpoint_member(a.src, ca.src, ctx)


def arc_right_member(a: ObjectArc, ca: ClassArc, ctx: EvalContext) -> bool:
    return arc_strict_member(a, ca, ctx) and _endpoint_member(a.dst, ca.dst, ctx)


def arc_full_member(a: ObjectArc, ca: ClassArc, ctx: EvalContext) -> bool:
    return arc_left_member(a, ca, ctx) and arc_right_member(a, ca, ctx)


def node_relational_member(
    n: ObjectNode,
    c: ClassNode,
    g: ObjectGraph,
    s: ClassGraph,
    ctx: EvalContext | None = None,
) -> bool:
    return relational_failure(n, c, g, s, ctx) is None


def relational_failure(
    n: ObjectNode,
    c: ClassNode,
    g: ObjectGraph,
    s: ClassGraph,
    ctx: EvalContext | None = None,
) -> str | None:
    """First unmet relational-membership condition, or None when all hold.

    Every class arc leaving ``c`` needs an arc leaving ``n`` that is a left
    member of it; every class arc entering ``c`` needs an arc entering ``n``
    that is a right member.  A loop class arc counts for both.
    """
    if ctx is None or ctx.graph is not g or ctx.schema is not s:
        ctx = make_context(g, s)
    if not node_strict_member(n, c, ctx):
        return f"{n.id} is not a strict member of {c.id}"
    for ca in s.arcs_from(c.id):
        if not any(arc_left_member(a, ca, ctx) for a in g.arcs_from(n.id)):
            return f"no arc leaving {n.id} is a left member of class arc {ca.id}"
    for ca in s.arcs_to(c.id):
        if not any(arc_right_member(a, ca, ctx) for a in g.arcs_to(n.id)):
            return f"no arc entering {n.id} is a right member of class arc {ca.id}"
    return None


def _unmet_constraint(o: Entity, c: ClassEntity, ctx) -> str | None:
    entries = [(p.name, p.value) for p in o.bag]
    for pc in c.constraints:
        if not any(name == pc.name and eval_predicate(pc.predicate, v, ctx) for name, v in entries):
            return f"no property of {o.id} satisfies {pc.name}: {print_predicate(pc.predicate)}"
    return None


def explain(kind: MembershipKind, o: Entity, c: ClassEntity, g: ObjectGraph, s: ClassGraph) -> str | None:
    """Reason why ``o`` is not a ``kind`` member of ``c``; None if it is."""
    ctx = make_context(g, s)
    if kind is MembershipKind.NODE_STRICT:
        return _unmet_constraint(o, c, ctx)
    if kind is MembershipKind.NODE_RELATIONAL:
        return relational_failure(o, c, g, s, ctx)  # type: ignore[arg-type]
    reason = _unmet_constraint(o, c, ctx)
    if reason is not None:
        return reason
    assert isinstance(o, ObjectArc) and isinstance(c, ClassArc)
    if kind in (MembershipKind.ARC_LEFT, MembershipKind.ARC_FULL):
        if not _endpoint_member(o.src, c.src, ctx):
            return f"source {o.src} is not a strict member of {c.src}"
    if kind in (MembershipKind.ARC_RIGHT, MembershipKind.ARC_FULL):
        if not _endpoint_member(o.dst, c.dst, ctx):
            return f"destination {o.dst} is not a strict member of {c.dst}"
    return None


def is_member(kind: MembershipKind, o: Entity, c: ClassEntity, g: ObjectGraph, s: ClassGraph) -> bool:
    ctx = make_context(g, s)
    if kind is MembershipKind.NODE_STRICT:
        return node_strict_member(o, c, ctx)  # type: ignore[arg-type]
    if kind is MembershipKind.NODE_RELATIONAL:
        return node_relational_member(o, c, g, s, ctx)  # type: ignore[arg-type]
    check = {
        MembershipKind.ARC_STRICT: arc_strict_member,
        MembershipKind.ARC_LEFT: arc_left_member,
        MembershipKind.ARC_RIGHT: arc_right_member,
        MembershipKind.ARC_FULL: arc_full_member,
    }[kind]
    return check(o, c, ctx)  # type: ignore[arg-type]
