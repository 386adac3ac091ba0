from decimal import Decimal

import pytest
from hypothesis import given, settings, strategies as st

from graphcomply.model import (
    ClassArc,
    ClassGraph,
    ClassNode,
    DanglingEndpoint,
    DuplicateId,
    InvalidIdentifier,
    InvalidValue,
    ObjectArc,
    ObjectGraph,
    ObjectNode,
    Property,
    PropertyBag,
    PropertyConstraint,
    ReservedPropertyName,
    UnknownId,
    arcs_from,
    arcs_to,
    build_class_graph,
    build_object_graph,
)
from graphcomply.predicates import Exists

from generators import object_graphs


def test_fig1_shape(fig1):
    assert [n.id for n in fig1.nodes] == ["Juliet", "Romeo", "Tybalt"]
    assert len(fig1.arcs) == 6


def test_empty_graph():
    g = build_object_graph([], [])
    assert g.nodes == () and g.arcs == ()


def test_dangling_endpoint():
    with pytest.raises(DanglingEndpoint) as info:
        build_object_graph([ObjectNode("Romeo")], [ObjectArc("x", "Romeo", "Ghost")])
    assert info.value.ident == "x"


def test_duplicate_ids():
    with pytest.raises(DuplicateId):
        build_object_graph([ObjectNode("A"), ObjectNode("A")], [])
    with pytest.raises(DuplicateId):
        build_object_graph([ObjectNode("A")], [ObjectArc("A", "A", "A")])


@pytest.mark.parametrize("name", ["src", "dst"])
def test_reserved_names(name):
    with pytest.raises(ReservedPropertyName):
        Property(name, 1)
    with pytest.raises(ReservedPropertyName):
        Property("inner", PropertyBag.of((name, 1)))
    with pytest.raises(ReservedPropertyName):
        PropertyConstraint(name, Exists())


def test_invalid_values_and_names():
    with pytest.raises(InvalidValue):
        Property("x", Decimal("NaN"))
    with pytest.raises(InvalidValue):
        Property("x", 1.5)
    with pytest.raises(InvalidIdentifier):
        Property("", 1)
    with pytest.raises(InvalidIdentifier):
        ObjectNode("9lives")


def test_bag_collapses_exact_duplicates_only():
    bag = PropertyBag.of(("a", 1), ("a", 1), ("a", 2), ("a", True), ("a", Decimal("1.0")))
    assert len(bag) == 4
    kinds = sorted(type(p.value).__name__ for p in bag.named("a"))
    assert kinds == ["Decimal", "bool", "int", "int"]
    assert PropertyBag.of(("a", 1), ("b", 2)) == PropertyBag.of(("b", 2), ("a", 1))


def test_self_loops_and_parallel_arcs_allowed():
    g = build_object_graph(
        [ObjectNode("A"), ObjectNode("B")],
        [ObjectArc("l", "A", "A"), ObjectArc("p1", "A", "B"), ObjectArc("p2", "A", "B")],
    )
    assert [a.id for a in g.arcs_from("A")] == ["l", "p1", "p2"]
    assert [a.id for a in g.arcs_to("A")] == ["l"]


def test_class_graph_fixtures(fig2, fig4):
    assert len(fig2.classes) == 3 and len(fig2.class_arcs) == 5
    assert len(fig4.classes) == 2 and len(fig4.class_arcs) == 3


def test_class_graph_dangling():
    with pytest.raises(DanglingEndpoint):
        build_class_graph([ClassNode("A")], [ClassArc("x", "Missing", "A")])


def test_arcs_from_to_fig1(fig1):
    assert [a.id for a in arcs_from(fig1, "Romeo")] == ["commitSuicide", "feelingsRomeoJuliet", "hasKilled"]
    assert [a.id for a in arcs_to(fig1, "Romeo")] == ["commitSuicide", "feelingsJulietRomeo"]
    with pytest.raises(UnknownId):
        arcs_from(ObjectGraph(), "x")
    with pytest.raises(UnknownId):
        arcs_to(ObjectGraph(), "x")


def test_graphs_are_immutable(fig1):
    with pytest.raises(AttributeError):
        fig1.nodes = ()
    with pytest.raises(AttributeError):
        fig1.node("Romeo").bag = PropertyBag()


@given(object_graphs())
@settings(max_examples=100)
def test_structural_round_trip(g):
    assert build_object_graph(g.nodes, g.arcs) == g


@given(object_graphs())
@settings(max_examples=100)
def test_arcs_partition(g):
    for a in g.arcs:
        assert [x.id for x in g.arcs_from(a.src)].count(a.id) == 1
        assert [x.id for x in g.arcs_to(a.dst)].count(a.id) == 1
    assert sum(len(g.arcs_from(n.id)) for n in g.nodes) == len(g.arcs)
    assert sum(len(g.arcs_to(n.id)) for n in g.nodes) == len(g.arcs)


_MUTATIONS = ["dangle", "duplicate_node", "duplicate_arc", "reserved"]


@given(object_graphs(), st.sampled_from(_MUTATIONS), st.data())
@settings(max_examples=100)
def test_mutations_rejected_with_specific_error(g, mutation, data):
    nodes, arcs = list(g.nodes), list(g.arcs)
    if mutation == "dangle":
        arcs.append(ObjectArc("zzFreshArc", "zzGhostNode", "zzGhostNode"))
        expected = DanglingEndpoint
    elif mutation == "duplicate_node":
        if not nodes:
            nodes.append(ObjectNode("dup"))
        nodes.append(ObjectNode(data.draw(st.sampled_from(nodes)).id))
        expected = DuplicateId
    elif mutation == "duplicate_arc":
        if not arcs:
            nodes.append(ObjectNode("zzN"))
            arcs.append(ObjectArc("zzA", "zzN", "zzN"))
        arcs.append(data.draw(st.sampled_from(arcs)))
        expected = DuplicateId
    else:
        with pytest.raises(ReservedPropertyName):
            ObjectNode("zzR", PropertyBag.of(("src", 1)))
        return
    with pytest.raises(expected):
        build_object_graph(nodes, arcs)
