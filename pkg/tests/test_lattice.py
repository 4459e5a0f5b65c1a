from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pardce.lattice import LiveType, Pts, UniverseMismatch, live_leq, models, models_l, pts_join, pts_leq, similar
from pardce.semantics import State
from pardce.syntax import Addr
from tests.strategies import pts_over

U = ("x", "y", "z")
BOT = Pts.bottom(U)
types = pts_over(U)


def test_order_examples():
    p = BOT.update("x", {"y"})
    assert pts_leq(BOT, p)
    assert pts_leq(p, BOT.update("x", {"y", "z"}))
    assert not pts_leq(p, BOT.update("x", {"z"}))


def test_join_examples():
    assert pts_join(BOT.update("x", {"y"}), BOT.update("x", {"z"})) == BOT.update("x", {"y", "z"})


def test_universes_must_agree():
    with pytest.raises(UniverseMismatch):
        pts_join(BOT, Pts.bottom(("x",)))
    with pytest.raises(UniverseMismatch):
        BOT.update("q", {"x"})


def test_models_examples():
    g = State({"x": Addr("y"), "y": 0, "z": 3})
    assert models(g, BOT.update("x", {"y"}))
    assert not models(g, BOT)
    assert models(State({"x": 3, "y": 0, "z": 0}), BOT)


def test_models_l_examples():
    g = State({"x": Addr("y"), "y": 0, "z": 0})
    assert models_l(g, (), BOT)
    assert not models_l(g, {"x"}, BOT)
    assert models_l(g, {"y"}, BOT)


def test_live_order():
    assert live_leq(LiveType(BOT, {"x", "y"}), LiveType(BOT, {"x"}))
    assert not live_leq(LiveType(BOT, {"x"}), LiveType(BOT, {"x", "y"}))


def test_similar():
    g = State({"x": 1, "y": 0, "z": 0})
    t = LiveType(BOT, {"x"})
    assert similar(g, g, t)
    assert similar(g.set("z", 1), g.set("z", 2), t) == similar(g, g, t)
    assert not similar(g.set("x", 1), g.set("x", 2), t)


@given(types, types, types)
def test_join_is_least_upper_bound(a, b, c):
    j = pts_join(a, b)
    assert pts_leq(a, j) and pts_leq(b, j)
    assert pts_join(a, a) == a
    assert j == pts_join(b, a)
    if pts_leq(a, c) and pts_leq(b, c):
        assert pts_leq(j, c)


@given(types, types)
def test_order_is_antisymmetric(a, b):
    if pts_leq(a, b) and pts_leq(b, a):
        assert a == b and hash(a) == hash(b)


@given(types, st.sets(st.sampled_from(U)))
def test_live_type_serializes_sorted(p, live):
    t = LiveType(p, live)
    assert t.to_json()["live"] == sorted(live)
    assert list(t.to_json()["pts"]) == sorted(U)
