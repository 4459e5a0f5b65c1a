"""Backward live-variables analysis over a fixed points-to annotation.

The live set before a store ``*x := e`` whose target is known exactly
(``pts(x) = {z}``) drops ``z``: the store certainly overwrites it or aborts.
That is the ``store-l-2s`` rule of the certificate catalog.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .lattice import LiveType, Pts
from .pointsto import FixpointRecord, PtsAnnotation
from .syntax import (
    DESUGAR,
    AddrAssign,
    Assign,
    If,
    LoadAssign,
    Par,
    ParFor,
    ParIf,
    Path,
    Seq,
    Skip,
    Stmt,
    StoreAssign,
    While,
    desugar_parif,
    fv_aexpr,
    fv_bexpr,
)


@dataclass
class LiveNode:
    pre: frozenset[str]
    post: frozenset[str]
    extra: dict = field(default_factory=dict)


def store_rule(pts_x: frozenset[str], post: frozenset[str]) -> str:
    """Which store rule applies: ``"1"`` (target dead), ``"2s"`` (strong) or ``"2"``."""
    if not pts_x & post:
        return "1"
    return "2s" if len(pts_x) == 1 else "2"


def atomic_pre(s: Stmt, pre_pts: Pts, post: frozenset[str]) -> frozenset[str]:
    """Live set before an atomic statement given the live set after it."""
    match s:
        case Skip():
            return post
        case Assign(x, e):
            return (post - {x}) | fv_aexpr(e) if x in post else post
        case AddrAssign(x, _):
            return post - {x}
        case LoadAssign(x, y):
            if x not in post:
                return post | {y}
            return (post - {x}) | {y} | pre_pts[y]
        case StoreAssign(x, e):
            targets = pre_pts[x]
            rule = store_rule(targets, post)
            if rule == "1":
                return post | {x}
            if rule == "2s":
                return (post - targets) | fv_aexpr(e) | {x}
            return post | fv_aexpr(e) | {x}
    raise TypeError(f"not an atomic statement: {s!r}")


@dataclass
class LiveAnnotation:
    pts: PtsAnnotation
    nodes: dict[Path, LiveNode]
    fixpoints: list[FixpointRecord]

    @property
    def program(self) -> Stmt:
        return self.pts.program

    def pre(self, path: Path = ()) -> LiveType:
        return LiveType(self.pts.nodes[path].pre, self.nodes[path].pre)

    def post(self, path: Path = ()) -> LiveType:
        return LiveType(self.pts.nodes[path].post, self.nodes[path].post)


class _Liveness:
    def __init__(self, ann: PtsAnnotation):
        self.ann = ann
        self.nodes: dict[Path, LiveNode] = {}
        self.fixpoints: list[FixpointRecord] = []

    def record_fixpoint(self, construct: str, path: Path, increases: int) -> None:
        n = len(self.ann.universe)
        self.fixpoints.append(FixpointRecord("live", construct, path, n, increases))

    def pre(self, s: Stmt, path: Path, post: frozenset[str]) -> frozenset[str]:
        extra: dict = {}
        match s:
            case Skip() | Assign() | AddrAssign() | LoadAssign() | StoreAssign():
                out = atomic_pre(s, self.ann.nodes[path].pre, post)
            case Seq(a, b):
                out = self.pre(a, path + (0,), self.pre(b, path + (1,), post))
            case If(c, t, f):
                out = self.pre(t, path + (0,), post) | self.pre(f, path + (1,), post) | fv_bexpr(c)
            case While(c, body):
                # `exit` is the least set containing `post` that is stable under
                # one more trip round the loop
                exit_live, increases = post, 0
                while True:
                    head = exit_live | fv_bexpr(c)
                    before = self.pre(body, path + (0,), head)
                    if before <= exit_live:
                        break
                    exit_live, increases = exit_live | before, increases + 1
                self.record_fixpoint("while", path, increases)
                extra["exit"] = exit_live
                out = head
            case Par(threads):
                # Same scheme as the points-to analysis: every thread runs
                # before post + W, W the union of all thread pre-sets.
                union, increases = frozenset(), 0
                while True:
                    before = [
                        self.pre(t, path + (i,), post | union) for i, t in enumerate(threads)
                    ]
                    grown = union.union(*before)
                    if grown == union:
                        break
                    union, increases = grown, increases + 1
                self.record_fixpoint("par", path, increases)
                extra["threads"] = before
                out = frozenset().union(*before)
            case ParIf():
                out = self.pre(desugar_parif(s), path + (DESUGAR,), post)
            case ParFor(body):
                closure, increases = post, 0
                while True:
                    before = self.pre(body, path + (0,), closure)
                    if before <= closure:
                        break
                    closure, increases = closure | before, increases + 1
                self.record_fixpoint("par-for", path, increases)
                out = closure
            case _:
                raise TypeError(f"not a statement: {s!r}")
        self.nodes[path] = LiveNode(out, post, extra)
        return out


def live_pre(s: Stmt, ann: PtsAnnotation, l_post) -> LiveAnnotation:
    """Live sets at every point of ``s`` for the live set ``l_post`` at its end."""
    if ann.program is not s and ann.program != s:
        raise ValueError("points-to annotation belongs to a different program")
    l_post = frozenset(l_post)
    unknown = l_post - ann.universe
    if unknown:
        raise ValueError(f"live variables outside the program universe: {sorted(unknown)}")
    analysis = _Liveness(ann)
    analysis.pre(s, (), l_post)
    return LiveAnnotation(ann, analysis.nodes, analysis.fixpoints)
