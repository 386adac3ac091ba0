from decimal import Decimal

import pytest
from hypothesis import given, settings, strategies as st

from graphcomply.lexer import ParseError
from graphcomply.model import ObjectNode, PropertyBag
from graphcomply.predicates import (
    And, Eq, EvalContext, Exists, Ge, Gt, In, InstanceOfRef, Le, Lt, Matches, Neq, Not, Or,
    RegexDialectError, eval_predicate, literal_equal, parse_predicate, print_predicate,
)

from generators import predicates, values


@pytest.mark.parametrize(
    "source, expected",
    [
        ('= "Montague"', Eq("Montague")),
        ("exists", Exists()),
        (">= 13 and < 18", And((Ge(13), Lt(18)))),
        ("!= false", Neq(False)),
        ("<= -2.5", Le(Decimal("-2.5"))),
        ('in { 1, "x", true }', In((1, "x", True))),
        ('matches "[A-Z].*"', Matches("[A-Z].*")),
        ("not exists or = 1", Or((Not(Exists()), Eq(1)))),
        ("not (exists or = 1)", Not(Or((Exists(), Eq(1))))),
        ("= 1 or = 2 and = 3", Or((Eq(1), And((Eq(2), Eq(3)))))),
        ('= { city = "Verona"; zip = 37100; }', Eq(PropertyBag.of(city="Verona", zip=37100))),
        ("= { }", Eq(PropertyBag())),
        ("> 1e3", Gt(Decimal("1e3"))),
    ],
)
def test_parse(source, expected):
    assert parse_predicate(source) == expected


def test_parse_print_parse_fixpoint():
    p = parse_predicate(">= 13 and < 18")
    assert print_predicate(p) == ">= 13 and < 18"
    assert parse_predicate(print_predicate(p)) == p


def test_int_and_decimal_literals_stay_distinct():
    assert parse_predicate("= 13") != parse_predicate("= 13.0")
    assert parse_predicate("= 1") != parse_predicate("= true")


@pytest.mark.parametrize(
    "source, line, col",
    [
        ("=", 1, 2),
        ("exists and", 1, 11),
        ("= 1 = 2", 1, 5),
        ("in { }", 1, 6),
        ("(exists", 1, 8),
        ("< \"x\"", 1, 3),
        ("exists\n  oops", 2, 3),
        ("= \"unterminated", 1, 3),
        ("@", 1, 1),
    ],
)
def test_syntax_errors_carry_positions(source, line, col):
    with pytest.raises(ParseError) as info:
        parse_predicate(source)
    assert (info.value.line, info.value.column) == (line, col)


def test_syntax_error_lists_expected_tokens():
    with pytest.raises(ParseError) as info:
        parse_predicate("=")
    assert "string" in info.value.expected and "number" in info.value.expected


@pytest.mark.parametrize("pattern", ["(a)\\1", "(?P<x>a)(?P=x)", "a(?=b)", "(?<!a)b", "("])
def test_regex_dialect(pattern):
    with pytest.raises(RegexDialectError):
        Matches(pattern)
    with pytest.raises(ParseError):
        parse_predicate(f'matches "{pattern}"'.replace("\\", "\\\\"))


def test_matches_is_anchored():
    p = Matches("b+")
    assert eval_predicate(p, "bbb")
    assert not eval_predicate(p, "abbb")
    assert not eval_predicate(p, 5)


def test_eval_examples():
    assert eval_predicate(Eq("Capulet"), "Capulet")
    assert not eval_predicate(Eq("Capulet"), "Montague")
    for v in ["x", 0, Decimal("1.5"), True, PropertyBag.of(a=1)]:
        assert eval_predicate(Exists(), v)


def test_range_against_brute_force():
    p = parse_predicate(">= 13 and < 18")
    for i in range(21):
        assert eval_predicate(p, i) == (13 <= i < 18), i
    assert eval_predicate(p, 13) and not eval_predicate(p, 12)


def test_type_mismatch_is_false():
    assert not eval_predicate(Lt(5), "3")
    assert not eval_predicate(Eq(1), True)
    assert not eval_predicate(Eq(True), 1)
    assert not eval_predicate(Neq("a"), 5)
    assert not eval_predicate(Ge(0), False)
    assert not eval_predicate(Eq("x"), ObjectNode("n"))


def test_numeric_equality_crosses_int_and_decimal():
    assert eval_predicate(Eq(13), Decimal("13.0"))
    assert eval_predicate(Eq(Decimal("13.0")), 13)
    assert eval_predicate(In((Decimal("2.50"),)), Decimal("2.5"))
    assert eval_predicate(Lt(Decimal("13.5")), 13)


def test_object_equality_is_structural():
    a = PropertyBag.of(x=1, y="q")
    assert eval_predicate(Eq(a), PropertyBag.of(y="q", x=1))
    assert not eval_predicate(Eq(a), PropertyBag.of(x=1))
    assert eval_predicate(Neq(a), PropertyBag.of(x=2, y="q"))


def test_instance_of_ref_uses_context():
    calls = []

    def oracle(node, class_id):
        calls.append((node.id, class_id))
        return class_id == "C"

    ctx = EvalContext(instance_of=oracle)
    assert eval_predicate(InstanceOfRef("C"), ObjectNode("n"), ctx)
    assert not eval_predicate(InstanceOfRef("D"), ObjectNode("n"), ctx)
    assert not eval_predicate(InstanceOfRef("C"), "n", ctx)
    assert not eval_predicate(InstanceOfRef("C"), ObjectNode("n"))
    assert calls == [("n", "C"), ("n", "D")]


@given(predicates, values)
@settings(max_examples=300)
def test_totality(p, v):
    assert eval_predicate(p, v) in (True, False)


@given(predicates, predicates, values)
@settings(max_examples=200)
def test_de_morgan(a, b, v):
    assert eval_predicate(Not(And((a, b))), v) == eval_predicate(Or((Not(a), Not(b))), v)
    assert eval_predicate(Not(Or((a, b))), v) == eval_predicate(And((Not(a), Not(b))), v)


@given(values, values)
@settings(max_examples=300)
def test_eq_neq_complement_for_same_type(x, v):
    from graphcomply.model import value_kind

    kinds = {value_kind(x), value_kind(v)}
    if len(kinds) == 1 or kinds == {"int", "dec"}:
        assert eval_predicate(Eq(x), v) == (not eval_predicate(Neq(x), v))
    else:
        assert not eval_predicate(Eq(x), v) and not eval_predicate(Neq(x), v)


@given(predicates)
@settings(max_examples=300)
def test_print_parse_round_trip(p):
    assert parse_predicate(print_predicate(p)) == p


@given(values)
def test_literal_equal_reflexive(v):
    assert literal_equal(v, v)


@given(st.integers(-50, 50), st.integers(-50, 50))
def test_comparisons_match_python(bound, v):
    assert eval_predicate(Lt(bound), v) == (v < bound)
    assert eval_predicate(Le(bound), v) == (v <= bound)
    assert eval_predicate(Gt(bound), v) == (v > bound)
    assert eval_predicate(Ge(bound), v) == (v >= bound)
