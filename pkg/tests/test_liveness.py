from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pardce.frontend import parse
from pardce.lattice import Pts
from pardce.liveness import atomic_pre, live_pre, store_rule
from pardce.pointsto import analyze
from pardce.syntax import Assign, BinOp, Num, Ref, vars_of, walk
from pardce.testkit import GenConfig, matched, semantic_live_set, similar_pair, states_of
from pardce.semantics import ABORT, FUEL_EXHAUSTED, run
from tests.strategies import generated

BOT = Pts.bottom(("x", "y", "z"))


def live_before(text: str, after, pre: Pts | None = None) -> frozenset[str]:
    s = parse(text)
    pann = analyze(s, pre or Pts.bottom(vars_of(s) | set(after)))
    return live_pre(s, pann, after).pre().live


def test_assignment_rules():
    assert atomic_pre(Assign("x", Num(8)), BOT, frozenset({"y"})) == {"y"}
    assert atomic_pre(Assign("x", BinOp("+", Ref("y"), Num(1))), BOT, frozenset({"x"})) == {"y"}


def test_address_assignment_kills():
    assert live_before("x := &y", {"x", "y"}) == {"y"}


def test_load_keeps_pointer_and_targets():
    assert live_before("x := &z; w := *x", {"w"}) == {"z"}
    # dead load still reads its pointer
    assert live_before("w := *x", set()) == {"x"}


def test_store_rule_choice():
    assert store_rule(frozenset({"y"}), frozenset({"x"})) == "1"
    assert store_rule(frozenset({"y"}), frozenset({"y"})) == "2s"
    assert store_rule(frozenset({"y", "z"}), frozenset({"y"})) == "2"


def test_strong_store_kills_its_target():
    assert live_before("x := &y; *x := 1", {"y"}) == frozenset()


def test_weak_store_keeps_targets_live():
    # x may point at y or z, so the store may miss y and y's old value can survive
    text = "if w = 0 then { x := &y } else { x := &z }; *x := 1"
    s = parse(text)
    ann = live_pre(s, analyze(s, Pts.bottom(vars_of(s))), {"y"})
    assert ann.nodes[(1,)].pre == {"x", "y"}
    assert "y" in ann.pre().live


def test_motivating_dead_points(motivating):
    ann = live_pre(motivating, analyze(motivating, Pts.bottom(("x", "y"))), {"x", "y"})
    assert ann.pre().live == frozenset()
    # the store on line 2 and the assignments on lines 5 and 8
    assert "y" not in ann.nodes[(1, 0)].post
    assert "y" not in ann.nodes[(1, 1, 0, 1, 0)].post
    assert "x" not in ann.nodes[(1, 1, 1, 0)].post


def test_while_keeps_guard_and_carried_variables():
    assert live_before("while i <= 2 do { y := y + 1; i := i + 1 }", {"y"}) == {"i", "y"}
    assert live_before("while i <= 2 do { y := 3; i := i + 1 }", {"y"}) == {"i", "y"}
    assert live_before("while i <= 2 do { y := 3; i := i + 1 }", set()) == {"i"}


def test_par_threads_see_each_other():
    # y is read by the second thread, and the first may run after it
    assert "x" in live_before("par { { x := 1 }, { y := x } }", {"y"})
    # conservative: the second thread passes x through, so x counts as live
    assert live_before("par { { x := 1 }, { y := 2 } }", {"x"}) == {"x"}


def test_par_for_closure():
    assert live_before("par-for { y := x; x := z }", {"y"}) >= {"x", "z"}


def test_unknown_live_variable():
    s = parse("skip")
    with pytest.raises(ValueError):
        live_pre(s, analyze(s, Pts.bottom(())), {"q"})


@given(generated, st.randoms(use_true_random=False))
def test_similar_states_stay_similar(s, rng):
    universe = vars_of(s)
    live = frozenset(x for x in sorted(universe) if rng.random() < 0.5)
    ann = live_pre(s, analyze(s, Pts.bottom(universe)), live)
    bounds = GenConfig().bounds
    for _ in range(3):
        g, g_star = similar_pair(universe, ann.pre(), rng)
        outs, outs_star = run(s, g, bounds), run(s, g_star, bounds)
        if ABORT in outs_star or FUEL_EXHAUSTED in outs | outs_star:
            continue
        assert matched(outs, outs_star, ann.post())


def test_semantic_liveness_is_covered(motivating):
    rng = random.Random(0)
    ann = live_pre(motivating, analyze(motivating, Pts.bottom(("x", "y"))), {"x", "y"})
    for path, _ in walk(motivating):
        found = semantic_live_set(motivating, path, {"x", "y"}, GenConfig().bounds, ann.pts.pre(path), rng)
        assert found <= ann.nodes[path].pre
    assert states_of(run(motivating, {}))
