"""Hypothesis strategies for syntax trees and points-to types."""

from __future__ import annotations

from hypothesis import strategies as st

from pardce.lattice import Pts
from pardce.syntax import (
    AddrAssign,
    And,
    Assign,
    BFalse,
    BinOp,
    BTrue,
    Eq,
    If,
    Leq,
    LoadAssign,
    Not,
    Num,
    Or,
    Par,
    ParFor,
    ParIf,
    Ref,
    Seq,
    Skip,
    StoreAssign,
    While,
)
from pardce.testkit import GenConfig, gen_program

NAMES = ("x", "y", "z", "w")
names = st.sampled_from(NAMES)

aexprs = st.recursive(
    st.one_of(st.builds(Num, st.integers(-20, 20)), st.builds(Ref, names)),
    lambda sub: st.builds(BinOp, st.sampled_from(("+", "-", "*")), sub, sub),
    max_leaves=6,
)

bexprs = st.recursive(
    st.one_of(
        st.just(BTrue()),
        st.just(BFalse()),
        st.builds(Eq, aexprs, aexprs),
        st.builds(Leq, aexprs, aexprs),
    ),
    lambda sub: st.one_of(st.builds(Not, sub), st.builds(And, sub, sub), st.builds(Or, sub, sub)),
    max_leaves=4,
)

atomics = st.one_of(
    st.just(Skip()),
    st.builds(Assign, names, aexprs),
    st.builds(AddrAssign, names, names),
    st.builds(StoreAssign, names, aexprs),
    st.builds(LoadAssign, names, names),
)


def _compound(sub):
    threads = st.lists(sub, min_size=1, max_size=3).map(tuple)
    return st.one_of(
        st.builds(Seq, sub, sub),
        st.builds(If, bexprs, sub, sub),
        st.builds(While, bexprs, sub),
        st.builds(Par, threads),
        st.builds(ParIf, st.lists(st.tuples(bexprs, sub), min_size=1, max_size=3).map(tuple)),
        st.builds(ParFor, sub),
    )


stmts = st.recursive(atomics, _compound, max_leaves=10)

generated = st.integers(0, 10**6).map(lambda seed: gen_program(GenConfig(), seed))


def pts_over(universe) -> st.SearchStrategy[Pts]:
    universe = sorted(universe)
    subsets = st.frozensets(st.sampled_from(universe)) if universe else st.just(frozenset())
    return st.fixed_dictionaries({x: subsets for x in universe}).map(Pts)
