from __future__ import annotations

import random

from hypothesis import assume, given
from hypothesis import strategies as st

from pardce.frontend import parse
from pardce.lattice import Pts, models, pts_join, pts_leq
from pardce.pointsto import addr_of_expr, analyze
from pardce.semantics import State, eval_aexpr, run
from pardce.syntax import Addr, AddrOf, BinOp, Deref, Num, Par, Ref, vars_of
from pardce.testkit import GenConfig, sample_state
from tests.strategies import aexprs, generated, pts_over

U = ("x", "y", "z", "w")
BOT = Pts.bottom(U)


def post_of(text: str, pre: Pts | None = None) -> Pts:
    s = parse(text)
    return analyze(s, pre or Pts.bottom(vars_of(s))).post()


def test_addr_of_expr_examples():
    p = BOT.update("x", {"y"})
    assert addr_of_expr(Num(3), p) == frozenset()
    assert addr_of_expr(Ref("x"), p) == {"y"}
    assert addr_of_expr(BinOp("+", Ref("x"), Ref("y")), p) == frozenset()
    assert addr_of_expr(AddrOf("z"), p) == {"z"}


def test_address_assignment():
    assert post_of("x := &y") == Pts.bottom(("x", "y")).update("x", {"y"})


def test_skip_is_identity():
    p = BOT.update("x", {"y", "z"})
    assert analyze(parse("skip"), p).post() == p


def test_par_joins_both_writers():
    assert post_of("par { { x := &y }, { x := &z } }")["x"] == {"y", "z"}


def test_par_sees_other_threads():
    # whichever order runs, w may end up holding what x held after the other thread
    post = post_of("par { { x := &y }, { w := x } }")
    assert post["w"] == {"y"}


def test_strong_and_weak_store():
    strong = post_of("x := &y; y := &z; v := &w; *x := v")
    assert strong["y"] == {"w"}
    weak = post_of("if x = 0 then { p := &y } else { p := &z }; y := &w; v := &x; *p := v")
    assert weak["y"] == {"w", "x"} and weak["z"] == {"x"}


def test_vacuous_store_and_load_are_bottom():
    assert post_of("y := &z; *x := 1") == Pts.bottom(("x", "y", "z"))
    assert post_of("y := &z; w := *x") == Pts.bottom(("w", "x", "y", "z"))


def test_load():
    assert post_of("x := &y; y := &z; w := *x")["w"] == {"z"}


def test_while_records_invariant():
    ann = analyze(parse("while x <= 1 do { y := x; x := &z }"), Pts.bottom(("x", "y", "z")))
    inv = ann.root.extra["invariant"]
    assert inv["y"] == {"z"} and inv["x"] == {"z"}
    assert ann.post() == inv


def test_motivating_types(motivating):
    ann = analyze(motivating, Pts.bottom(("x", "y")))
    assert ann.post() == Pts({"x": set(), "y": set()})
    assert ann.pre((1, 0)) == Pts({"x": {"y"}, "y": set()})


@given(aexprs, pts_over(U), st.randoms(use_true_random=False))
def test_addresses_are_predicted(e, pts, rng):
    g = sample_state(U, rng, pts)
    v = eval_aexpr(e, g)
    if isinstance(v, Addr):
        assert v.var in addr_of_expr(e, pts)


@given(pts_over(U), st.randoms(use_true_random=False))
def test_load_predicts_addresses(pts, rng):
    g = sample_state(U, rng, pts)
    v = eval_aexpr(Deref("x"), g)
    if isinstance(v, Addr):
        assert v.var in addr_of_expr(Deref("x"), pts)


@given(generated, st.randoms(use_true_random=False))
def test_monotone(s, rng):
    universe = vars_of(s)
    a = Pts({x: [z for z in sorted(universe) if rng.random() < 0.2] for x in universe})
    b = pts_join(a, Pts({x: [z for z in sorted(universe) if rng.random() < 0.2] for x in universe}))
    assert pts_leq(analyze(s, a).post(), analyze(s, b).post())


@given(generated, st.randoms(use_true_random=False))
def test_final_states_are_typed(s, rng):
    pre = Pts.bottom(vars_of(s))
    post = analyze(s, pre).post()
    for _ in range(3):
        for out in run(s, sample_state(pre.universe, rng, pre), GenConfig().bounds):
            if isinstance(out, State):
                assert models(out, post)


@given(st.lists(generated, min_size=2, max_size=3), st.randoms(use_true_random=False))
def test_par_thread_order_is_irrelevant(threads, rng):
    universe = frozenset().union(*map(vars_of, threads))
    assume(universe)
    pre = Pts({x: [z for z in sorted(universe) if rng.random() < 0.2] for x in universe})
    perm = list(threads)
    random.Random(rng.random()).shuffle(perm)
    assert analyze(Par(tuple(threads)), pre).post() == analyze(Par(tuple(perm)), pre).post()
