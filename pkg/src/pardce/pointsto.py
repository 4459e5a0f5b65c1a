"""Flow-sensitive points-to analysis as a forward post-type computation.

``analyze`` annotates every program point with a pre and post points-to type.
Loops, ``par`` threads and ``par-for`` bodies are solved by Kleene iteration;
each solved fixpoint is logged with its number of strict increases so callers
can check them against the lattice height.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .lattice import Pts, UniverseMismatch, join_all
from .syntax import (
    DESUGAR,
    AddrAssign,
    AddrOf,
    Assign,
    BinOp,
    Deref,
    If,
    LoadAssign,
    Num,
    Par,
    ParFor,
    ParIf,
    Path,
    Ref,
    Seq,
    Skip,
    Stmt,
    StoreAssign,
    While,
    desugar_parif,
    vars_of,
)


@dataclass
class FixpointRecord:
    analysis: str  # "pts" or "live"
    construct: str  # "while", "par" or "par-for"
    path: Path
    universe_size: int
    increases: int

    @property
    def bound(self) -> int:
        n = self.universe_size
        return n * n if self.analysis == "pts" else n

    @property
    def within_bound(self) -> bool:
        return self.increases <= self.bound


@dataclass
class PtsNode:
    pre: Pts
    post: Pts
    extra: dict = field(default_factory=dict)


@dataclass
class PtsAnnotation:
    program: Stmt
    universe: frozenset[str]
    nodes: dict[Path, PtsNode]
    fixpoints: list[FixpointRecord]

    @property
    def root(self) -> PtsNode:
        return self.nodes[()]

    def pre(self, path: Path = ()) -> Pts:
        return self.nodes[path].pre

    def post(self, path: Path = ()) -> Pts:
        return self.nodes[path].post


def addr_of_expr(e, pts: Pts) -> frozenset[str]:
    """Addresses ``e`` may evaluate to in a state of type ``pts``."""
    match e:
        case Num() | BinOp():
            return frozenset()
        case Ref(x):
            return pts[x]
        case AddrOf(y):
            return frozenset((y,))
        case Deref(y):
            return frozenset().union(*(pts[z] for z in pts[y]))
    raise TypeError(f"not an arithmetic expression: {e!r}")


def load_post(x: str, y: str, pre: Pts) -> Pts:
    """Post type of ``x := *y``: join over the targets of ``y`` of ``x := z``."""
    targets = pre[y]
    if not targets:
        # no address can flow into y, so every run aborts
        return Pts.bottom(pre.universe)
    return pre.update(x, frozenset().union(*(pre[z] for z in targets)))


def store_kind(pre: Pts, x: str) -> str:
    n = len(pre[x])
    return "vacuous" if n == 0 else "strong" if n == 1 else "weak"


def store_post(x: str, e, pre: Pts) -> Pts:
    """Post type of ``*x := e``: join over the targets of ``x`` of ``z := e``."""
    targets = pre[x]
    if not targets:
        return Pts.bottom(pre.universe)
    addrs = addr_of_expr(e, pre)
    if len(targets) == 1:
        (z,) = targets
        return pre.update(z, addrs)
    m = {v: (a | addrs if v in targets else a) for v, a in pre.items()}
    return Pts(m)


class _Analyzer:
    def __init__(self, universe: frozenset[str]):
        self.universe = universe
        self.nodes: dict[Path, PtsNode] = {}
        self.fixpoints: list[FixpointRecord] = []

    def record_fixpoint(self, construct: str, path: Path, increases: int) -> None:
        self.fixpoints.append(
            FixpointRecord("pts", construct, path, len(self.universe), increases)
        )

    def post(self, s: Stmt, pre: Pts, path: Path) -> Pts:
        extra: dict = {}
        match s:
            case Skip():
                out = pre
            case Assign(x, e):
                out = pre.update(x, addr_of_expr(e, pre))
            case AddrAssign(x, y):
                out = pre.update(x, (y,))
            case LoadAssign(x, y):
                out = load_post(x, y, pre)
            case StoreAssign(x, e):
                extra["update"] = store_kind(pre, x)
                out = store_post(x, e, pre)
            case Seq(a, b):
                out = self.post(b, self.post(a, pre, path + (0,)), path + (1,))
            case If(_, t, f):
                out = self.post(t, pre, path + (0,)).join(self.post(f, pre, path + (1,)))
            case While(_, body):
                inv, increases = pre, 0
                while True:
                    after = self.post(body, inv, path + (0,))
                    if after.leq(inv):
                        break
                    inv, increases = inv.join(after), increases + 1
                self.record_fixpoint("while", path, increases)
                extra["invariant"] = inv
                out = inv
            case Par(threads):
                out = self._par(threads, pre, path, extra)
            case ParIf():
                out = self.post(desugar_parif(s), pre, path + (DESUGAR,))
            case ParFor(body):
                closure, increases = pre, 0
                while True:
                    after = self.post(body, pre.join(closure), path + (0,))
                    if after.leq(closure):
                        break
                    closure, increases = closure.join(after), increases + 1
                self.record_fixpoint("par-for", path, increases)
                extra["closure"] = closure
                out = closure
            case _:
                raise TypeError(f"not a statement: {s!r}")
        self.nodes[path] = PtsNode(pre, out, extra)
        return out

    def _par(self, threads, pre: Pts, path: Path, extra: dict) -> Pts:
        # Iterate on the join W of all thread posts, running every thread from
        # pre + W. Each thread then sees at least the effects of the others, and
        # W climbs the points-to lattice itself, so it stabilizes within |V|^2
        # strict increases.
        union = Pts.bottom(self.universe)
        increases = 0
        while True:
            env = pre.join(union)
            after = [self.post(t, env, path + (i,)) for i, t in enumerate(threads)]
            grown = join_all(self.universe, [union, *after])
            if grown == union:
                break
            union, increases = grown, increases + 1
        self.record_fixpoint("par", path, increases)
        extra["threads"] = after
        return join_all(self.universe, after)


def analyze(s: Stmt, pre: Pts | None = None) -> PtsAnnotation:
    """Least points-to annotation of ``s`` from ``pre`` (bottom by default)."""
    universe = vars_of(s)
    if pre is None:
        pre = Pts.bottom(universe)
    elif not universe <= pre.universe:
        raise UniverseMismatch(f"pre type lacks variables {sorted(universe - pre.universe)}")
    for x, addrs in pre.items():
        if not addrs <= pre.universe:
            raise UniverseMismatch(f"pre type of {x} names addresses outside the universe")
    analyzer = _Analyzer(pre.universe)
    analyzer.post(s, pre, ())
    return PtsAnnotation(s, pre.universe, analyzer.nodes, analyzer.fixpoints)
