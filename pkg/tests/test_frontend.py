from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pardce.frontend import GrammarRestrictionError, ParseError, ProgramSyntaxError, parse, pretty
from pardce.syntax import (
    AddrAssign,
    And,
    Assign,
    BFalse,
    BTrue,
    BinOp,
    Deref,
    Eq,
    Leq,
    LoadAssign,
    Not,
    Num,
    Par,
    ParFor,
    ParIf,
    Ref,
    Seq,
    Skip,
    StoreAssign,
    While,
    fv_aexpr,
    fv_bexpr,
    vars_of,
    walk,
)
from tests.strategies import generated, stmts


def test_free_variables():
    assert fv_aexpr(Num(7)) == frozenset()
    assert fv_aexpr(BinOp("+", Ref("x"), Ref("y"))) == {"x", "y"}
    assert fv_aexpr(Deref("y")) == {"y"}
    assert fv_bexpr(Eq(Ref("x"), Num(2))) == {"x"}
    assert fv_bexpr(And(Leq(Ref("x"), Ref("y")), Not(BFalse()))) == {"x", "y"}
    assert vars_of(Skip()) == frozenset()
    assert vars_of(AddrAssign("x", "y")) == {"x", "y"}


def test_atomic_statements():
    assert parse("skip") == Skip()
    assert parse("x := & y") == AddrAssign("x", "y")
    assert parse("x := *y") == LoadAssign("x", "y")
    assert parse("*x := 6") == StoreAssign("x", Num(6))
    assert parse("x := 1 + 2 * y") == Assign("x", BinOp("+", Num(1), BinOp("*", Num(2), Ref("y"))))


def test_motivating_shape(motivating):
    leaves = [s for _, s in walk(motivating) if not isinstance(s, (Seq, Par))]
    assert len(leaves) == 7
    pars = [s for _, s in walk(motivating) if isinstance(s, Par)]
    assert len(pars) == 1 and len(pars[0].threads) == 2
    assert vars_of(motivating) == {"x", "y"}


def test_pretty_examples():
    assert pretty(Skip(), compact=True) == "skip"
    assert pretty(Skip()) == "skip\n"
    assert pretty(StoreAssign("x", Num(6)), compact=True) == "*x := 6"
    assert pretty(While(Eq(Ref("x"), Num(0)), Skip()), compact=True) == "while x = 0 do { skip }"


def test_motivating_pretty_is_stable(motivating_text, motivating):
    assert parse(pretty(motivating)) == motivating
    assert pretty(parse(pretty(motivating))) == pretty(motivating)


def test_unicode_aliases():
    assert parse("x ⩴ 2 × y") == parse("x := 2 * y")
    assert parse("while ¬(x ≤ 1) ∧ true do { skip }") == parse(
        "while not (x <= 1) and true do { skip }"
    )


def test_comments_and_whitespace():
    assert parse("# leading\nx := 1 # trailing\n;\n\n y := 2") == Seq(
        Assign("x", Num(1)), Assign("y", Num(2))
    )


@pytest.mark.parametrize(
    "text",
    ["x := 1 + &y", "x := *y + 1", "x := &y * 2", "x := *y - 3"],
)
def test_grammar_restriction(text):
    with pytest.raises(GrammarRestrictionError):
        parse(text)


@pytest.mark.parametrize(
    ("text", "line", "column"),
    [
        ("x := ", 1, 6),
        ("while x do { skip }", 1, 9),
        ("par { }", 1, 7),
        ("skip;\nskip skip", 2, 6),
        ("if true then { skip }", 1, 22),
    ],
)
def test_syntax_errors_are_located(text, line, column):
    with pytest.raises(ProgramSyntaxError) as info:
        parse(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_par_forms():
    assert parse("par { { x := 1 }, { x := 2 } }") == Par((Assign("x", Num(1)), Assign("x", Num(2))))
    assert parse("par-for { skip }") == ParFor(Skip())
    assert parse("par-if { (x = 1, y := 2), (true, skip) }") == ParIf(
        ((Eq(Ref("x"), Num(1)), Assign("y", Num(2))), (BTrue(), Skip()))
    )


@given(stmts)
def test_round_trip(s):
    assert parse(pretty(s)) == s
    assert parse(pretty(s, compact=True)) == s


@given(generated)
def test_round_trip_generated(s):
    assert parse(pretty(s)) == s


@given(st.text(alphabet="xy01:=&*+-;{}() \nparifwhletnsko<,", max_size=40))
def test_parse_is_total(text):
    # every input either parses or raises a located ParseError
    try:
        s = parse(text)
    except ParseError as err:
        assert err.line >= 1 and err.column >= 1
    else:
        assert parse(pretty(s)) == s
