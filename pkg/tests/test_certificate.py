from __future__ import annotations

import dataclasses
import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pardce.certificate import (
    RULES,
    Derivation,
    Judgement,
    MalformedCertificate,
    check,
    derivation_from_json,
    derivation_to_json,
    dump_certificate,
    emit,
    emit_live,
    emit_pts,
    load_certificate,
    read_certificate,
    weaken,
    write_certificate,
)
from pardce.dce import optimize
from pardce.frontend import parse
from pardce.lattice import LiveType, Pts
from pardce.liveness import live_pre
from pardce.pointsto import analyze
from pardce.syntax import Skip, vars_of
from tests.mutations import CATALOG, positions, replace
from tests.strategies import generated


def pts_cert(text: str):
    s = parse(text)
    return s, emit_pts(analyze(s, Pts.bottom(vars_of(s))))


def test_addr_round_trip():
    s, d = pts_cert("x := &y")
    assert d.rule == "addr-p"
    assert check(d, s)


def test_altered_post_is_rejected():
    s, d = pts_cert("x := &y")
    bad = dataclasses.replace(
        d, conclusion=dataclasses.replace(d.conclusion, post=Pts({"x": {"z"}, "y": set()}))
    )
    verdict = check(bad, s)
    assert not verdict
    assert verdict.rule == "addr-p" and "reject" in str(verdict)


def test_consequence_may_weaken_the_post():
    s = parse("x := &y; skip")
    universe = ("x", "y", "z")
    ann = analyze(s, Pts.bottom(universe))
    d = emit_pts(ann)
    wider = Pts({"x": {"y", "z"}, "y": set(), "z": set()})
    assert check(weaken(d, d.conclusion.pre, wider), s)


def test_consequence_may_not_strengthen():
    s, d = pts_cert("x := &y")
    narrower = Pts.bottom(("x", "y"))
    assert not check(weaken(d, d.conclusion.pre, narrower), s)


def test_skip_is_a_single_node():
    s, d = pts_cert("skip")
    assert d.size() == 1 and d.rule == "skip-p"
    assert check(d, s)


def test_while_has_invariant_and_consequence():
    s, d = pts_cert("while x <= 1 do { y := x; x := &z }")
    rules = [n.rule for n in d.walk()]
    assert rules[0] == "csq-p" and "whl-p" in rules
    whl = next(n for n in d.walk() if n.rule == "whl-p")
    assert whl.conclusion.pre == whl.conclusion.post == whl.side["invariant"]
    assert check(d, s)


def test_motivating_dce_leaves(motivating):
    result = optimize(motivating, {"x", "y"})
    d = result.derivation
    assert check(d, motivating)
    skips = {
        n.conclusion.path
        for n in d.walk()
        if n.conclusion.transformed == Skip() and n.rule.endswith("-1")
    }
    assert skips == set(result.eliminated)
    assert d.conclusion.transformed == result.optimized


def test_rule_names_are_known(motivating):
    result = optimize(motivating, {"x", "y"})
    for d in (emit_pts(result.annotation.pts), emit_live(result.annotation), emit(result)):
        # live and dce trees embed points-to premises
        assert all(n.rule in RULES[n.conclusion.kind] for n in d.walk())


def test_wrong_program_is_rejected(motivating):
    d = optimize(motivating, {"x", "y"}).derivation
    assert not check(d, parse("x := 1"))


def test_dump_is_canonical(motivating, tmp_path):
    d = optimize(motivating, {"x", "y"}).derivation
    text = dump_certificate(d, motivating)
    assert text == dump_certificate(load_certificate(text, motivating), motivating)
    obj = json.loads(text)
    assert obj["version"] == "1" and obj["kind"] == "dce"
    write_certificate(tmp_path / "c.json", d, motivating)
    assert read_certificate(tmp_path / "c.json", motivating) == d


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "[]",
        '{"version": "0"}',
        '{"version": "1", "kind": "pts", "derivation": {"rule": "skip-p"}}',
        '{"version": "1", "kind": "pts", "derivation": {"rule": "skip-p", "conclusion": {"kind": "zzz"}}}',
    ],
)
def test_malformed(text):
    with pytest.raises(MalformedCertificate):
        load_certificate(text)


def test_hash_mismatch_is_malformed(motivating):
    text = dump_certificate(optimize(motivating, {"x"}).derivation, motivating)
    with pytest.raises(MalformedCertificate):
        load_certificate(text, parse("skip"))


def test_kind_mismatch_is_malformed():
    s, d = pts_cert("skip")
    obj = json.loads(dump_certificate(d, s))
    obj["kind"] = "live"
    with pytest.raises(MalformedCertificate):
        load_certificate(json.dumps(obj))


def test_transformed_only_on_dce_nodes():
    s, d = pts_cert("skip")
    bad = dataclasses.replace(d, conclusion=dataclasses.replace(d.conclusion, transformed=Skip()))
    with pytest.raises(MalformedCertificate):
        check(bad, s)


def test_unknown_rule():
    s, d = pts_cert("skip")
    assert not check(dataclasses.replace(d, rule="magic-p"), s)


def test_judgement_must_sit_at_the_root():
    s, d = pts_cert("skip")
    moved = Derivation(d.rule, dataclasses.replace(d.conclusion, path=(0,)))
    assert not check(moved, s)


def test_weak_store_cannot_pass_as_strong():
    s = parse("if w = 0 then { x := &y } else { x := &z }; *x := 1")
    ann = live_pre(s, analyze(s, Pts.bottom(vars_of(s))), {"y"})
    d = emit_live(ann)
    assert check(d, s)
    site = next(n for n in d.walk() if n.rule == "store-l-2")
    strong = dataclasses.replace(site, rule="store-l-2s")
    c = site.conclusion
    strong = dataclasses.replace(
        strong,
        conclusion=Judgement(c.kind, c.path, LiveType(c.pre.pts, c.pre.live - {"y"}), c.post),
    )
    pos = next(p for p, n in positions(d) if n is site)
    assert not check(replace(d, pos, strong), s)


@given(generated, st.integers(0, 2), st.randoms(use_true_random=False))
def test_round_trip_and_mutants(s, which, rng):
    live = {x for x in sorted(vars_of(s)) if rng.random() < 0.5}
    result = optimize(s, live)
    d = (emit_pts(result.annotation.pts), emit_live(result.annotation), result.derivation)[which]
    assert derivation_from_json(derivation_to_json(d)) == d
    assert check(d, s)
    for mutate in CATALOG.values():
        mutant = mutate(d, s, random.Random(rng.random()))
        if mutant is not None:
            assert not check(mutant, s)
