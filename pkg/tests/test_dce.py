from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pardce.dce import AnnotationMismatch, eliminate, optimize
from pardce.frontend import parse, pretty
from pardce.lattice import Pts
from pardce.liveness import live_pre
from pardce.pointsto import analyze
from pardce.semantics import ABORT, FUEL_EXHAUSTED, run
from pardce.syntax import Assign, Num, Seq, Skip, skeleton, vars_of, walk
from pardce.testkit import GenConfig, matched, similar_pair
from tests.conftest import DATA
from tests.strategies import generated


def test_dead_assignment_becomes_skip():
    assert optimize(Assign("x", Num(8)), {"y"}).optimized == Skip()
    assert optimize(Skip(), {"x"}).optimized == Skip()


def test_overwritten_assignment():
    s = Seq(Assign("x", Num(1)), Assign("x", Num(2)))
    result = optimize(s, {"x"})
    assert result.optimized == Seq(Skip(), Assign("x", Num(2)))
    for x0 in range(-2, 3):
        assert matched(run(s, {"x": x0}), run(result.optimized, {"x": x0}), result.annotation.post())


def test_motivating(motivating):
    result = optimize(motivating, {"x", "y"})
    assert pretty(result.optimized) == (DATA / "motivating_optimized.par").read_text()
    assert result.eliminated == [(1, 0), (1, 1, 0, 1, 0), (1, 1, 1, 0)]


def test_live_store_survives():
    s = parse("x := &y; *x := 1")
    assert optimize(s, {"y"}).optimized == s


def test_par_if_bodies_are_rewritten():
    s = parse("par-if { (x = 0, y := 1), (true, z := 2) }")
    assert optimize(s, {"z"}).optimized == parse("par-if { (x = 0, skip), (true, z := 2) }")


def test_mismatched_annotation():
    a, b = parse("x := 1"), parse("y := 1")
    ann = live_pre(a, analyze(a, Pts.bottom(("x",))), set())
    with pytest.raises(AnnotationMismatch):
        eliminate(b, ann)


def test_live_variables_outside_the_program():
    assert optimize(parse("x := 1"), {"q"}).optimized == Skip()


@given(generated, st.randoms(use_true_random=False))
def test_shape_is_preserved(s, rng):
    live = {x for x in sorted(vars_of(s)) if rng.random() < 0.5}
    result = optimize(s, live)
    assert skeleton(result.optimized) == skeleton(s)
    assert set(result.eliminated) <= {p for p, _ in walk(s)}


@given(generated, st.randoms(use_true_random=False))
def test_observably_equivalent(s, rng):
    universe = vars_of(s)
    live = {x for x in sorted(universe) if rng.random() < 0.5}
    result = optimize(s, live)
    bounds = GenConfig().bounds
    for _ in range(3):
        g, g_star = similar_pair(universe, result.annotation.pre(), rng)
        outs, outs_opt = run(s, g, bounds), run(result.optimized, g_star, bounds)
        if FUEL_EXHAUSTED in outs | outs_opt:
            continue
        assert matched(outs, outs_opt, result.annotation.post())
        if ABORT not in outs:
            assert matched(outs_opt, outs, result.annotation.post())
