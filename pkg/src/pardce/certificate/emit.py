"""Turn analysis annotations into derivation trees.

Fixpoint constructs carry their solutions as side data and the places where
an annotation is looser than a rule's exact conclusion are bridged with
consequence (``csq``) nodes.
"""

from __future__ import annotations

from ..lattice import LiveType, Pts, join_all
from ..liveness import LiveAnnotation, store_rule
from ..pointsto import PtsAnnotation, addr_of_expr, store_kind
from ..syntax import (
    DESUGAR,
    AddrAssign,
    Assign,
    If,
    LoadAssign,
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
    instance_step,
)
from .derivation import SUFFIX, Derivation, Judgement


def weaken(d: Derivation, pre, post) -> Derivation:
    """Wrap ``d`` in a csq node concluding ``pre -> post`` unless it already does."""
    c = d.conclusion
    if c.pre == pre and c.post == post:
        return d
    kind = c.kind
    j = Judgement(kind, c.path, pre, post, c.transformed)
    return Derivation(f"csq-{SUFFIX[kind]}", j, (d,))


class _PtsEmitter:
    def __init__(self, ann: PtsAnnotation):
        self.ann = ann

    def node(self, s: Stmt, path: Path) -> Derivation:
        nd = self.ann.nodes[path]
        pre, post = nd.pre, nd.post
        j = Judgement("pts", path, pre, post)
        match s:
            case Skip():
                return Derivation("skip-p", j)
            case Assign(_, e):
                return Derivation("assign-p", j, side={"addrs": addr_of_expr(e, pre)})
            case AddrAssign():
                return Derivation("addr-p", j)
            case LoadAssign(x, y):
                prem = tuple(
                    self.instance(path, z, Assign(x, Ref(z)), pre, post) for z in sorted(pre[y])
                )
                return Derivation("load-p", j, prem)
            case StoreAssign(x, e):
                prem = tuple(
                    self.instance(path, z, Assign(z, e), pre, post) for z in sorted(pre[x])
                )
                return Derivation("store-p", j, prem, side={"update": store_kind(pre, x)})
            case Seq(a, b):
                return Derivation("seq-p", j, (self.node(a, path + (0,)), self.node(b, path + (1,))))
            case If(_, t, f):
                prem = (
                    weaken(self.node(t, path + (0,)), pre, post),
                    weaken(self.node(f, path + (1,)), pre, post),
                )
                return Derivation("if-p", j, prem)
            case While(_, body):
                inv = nd.extra["invariant"]
                body_d = weaken(self.node(body, path + (0,)), inv, inv)
                loop = Derivation(
                    "whl-p", Judgement("pts", path, inv, inv), (body_d,), side={"invariant": inv}
                )
                return weaken(loop, pre, post)
            case Par(threads):
                sols = nd.extra["threads"]
                n = len(threads)
                prem = tuple(
                    weaken(
                        self.node(t, path + (i,)),
                        join_all(pre.universe, [pre, *(sols[j] for j in range(n) if j != i)]),
                        sols[i],
                    )
                    for i, t in enumerate(threads)
                )
                return Derivation("par-p", j, prem, side={"threads": list(sols)})
            case ParIf():
                return Derivation("par-if-p", j, (self.node(desugar_parif(s), path + (DESUGAR,)),))
            case ParFor(body):
                closure = nd.extra["closure"]
                body_d = weaken(self.node(body, path + (0,)), pre.join(closure), closure)
                return Derivation("par-for-p", j, (body_d,), side={"closure": closure})
        raise TypeError(f"not a statement: {s!r}")

    def instance(self, path: Path, z: str, stmt: Assign, pre: Pts, post: Pts) -> Derivation:
        addrs = addr_of_expr(stmt.expr, pre)
        j = Judgement("pts", path + (instance_step(z),), pre, pre.update(stmt.var, addrs))
        return weaken(Derivation("assign-p", j, side={"addrs": addrs}), pre, post)


class _LiveEmitter:
    def __init__(self, ann: LiveAnnotation, kind: str):
        self.ann = ann
        self.kind = kind
        self.sfx = SUFFIX[kind]
        self.pts = _PtsEmitter(ann.pts)

    @property
    def dce(self) -> bool:
        return self.kind == "dce"

    def make(self, base: str, path: Path, pre, post, transformed, premises=(), side=None, variant=""):
        name = f"{base}-{self.sfx}" + (f"-{variant}" if variant else "")
        j = Judgement(self.kind, path, pre, post, transformed if self.dce else None)
        return Derivation(name, j, tuple(premises), side=side or {})

    def leaf(self, s: Stmt, path: Path, pre: LiveType, post: LiveType) -> Derivation:
        l_post = post.live
        match s:
            case Skip():
                return self.make("skip", path, pre, post, s)
            case AddrAssign(x, _) if not self.dce:
                return self.make("addr", path, pre, post, s)
            case AddrAssign(x, _):
                variant = "2" if x in l_post else "1"
                premises = ()
            case Assign(x, _) | LoadAssign(x, _):
                variant = "2" if x in l_post else "1"
                premises = (self.pts.node(s, path),)
            case StoreAssign(x, _):
                variant = store_rule(pre.pts[x], l_post)
                premises = (self.pts.node(s, path),)
            case _:
                raise TypeError(f"not an atomic statement: {s!r}")
        base = {Assign: "assign", AddrAssign: "addr", LoadAssign: "load", StoreAssign: "store"}[type(s)]
        out = Skip() if variant == "1" else s
        return self.make(base, path, pre, post, out, premises, variant=variant)

    def node(self, s: Stmt, path: Path) -> Derivation:
        pn = self.ann.pts.nodes[path]
        ln = self.ann.nodes[path]
        pre = LiveType(pn.pre, ln.pre)
        post = LiveType(pn.post, ln.post)
        t = lambda d: d.conclusion.transformed  # noqa: E731
        match s:
            case Skip() | Assign() | AddrAssign() | LoadAssign() | StoreAssign():
                return self.leaf(s, path, pre, post)
            case Seq(a, b):
                da, db = self.node(a, path + (0,)), self.node(b, path + (1,))
                return self.make("seq", path, pre, post, Seq(t(da), t(db)) if self.dce else None, (da, db))
            case If(c, th, el):
                dt, df = self.node(th, path + (0,)), self.node(el, path + (1,))
                common = LiveType(pn.pre, dt.conclusion.pre.live | df.conclusion.pre.live)
                prem = (weaken(dt, common, post), weaken(df, common, post))
                tr = If(c, t(dt), t(df)) if self.dce else None
                return self.make("if", path, pre, post, tr, prem)
            case While(c, body):
                inv = pn.extra["invariant"]
                exit_live = ln.extra["exit"]
                head = ln.pre
                db = self.node(body, path + (0,))
                body_d = weaken(db, LiveType(inv, exit_live), LiveType(inv, head))
                tr = While(c, t(db)) if self.dce else None
                loop = self.make(
                    "whl",
                    path,
                    LiveType(inv, head),
                    LiveType(inv, exit_live),
                    tr,
                    (body_d,),
                    side={"invariant": inv, "exit": exit_live},
                )
                return weaken(loop, pre, post)
            case Par(threads):
                n = len(threads)
                sols_p = pn.extra["threads"]
                sols_l = ln.extra["threads"]
                universe = pn.pre.universe
                prem, parts = [], []
                for i, th in enumerate(threads):
                    others = [j for j in range(n) if j != i]
                    env = join_all(universe, [pn.pre, *(sols_p[j] for j in others)])
                    d = self.node(th, path + (i,))
                    want_pre = LiveType(env, sols_l[i])
                    want_post = LiveType(sols_p[i], ln.post.union(*(sols_l[j] for j in others)))
                    prem.append(weaken(d, want_pre, want_post))
                    parts.append(t(d))
                side = {"threads": [LiveType(p, l) for p, l in zip(sols_p, sols_l)]}
                tr = Par(tuple(parts)) if self.dce else None
                return self.make("par", path, pre, post, tr, prem, side)
            case ParIf(branches):
                d = self.node(desugar_parif(s), path + (DESUGAR,))
                tr = None
                if self.dce:
                    tr = ParIf(tuple((b, arm.then) for (b, _), arm in zip(branches, t(d).threads)))
                return self.make("par-if", path, pre, post, tr, (d,))
            case ParFor(body):
                closure = pn.extra["closure"]
                d = self.node(body, path + (0,))
                body_d = weaken(
                    d, LiveType(pn.pre.join(closure), ln.pre), LiveType(closure, ln.post | ln.pre)
                )
                tr = ParFor(t(d)) if self.dce else None
                return self.make("par-for", path, pre, post, tr, (body_d,), {"closure": closure})
        raise TypeError(f"not a statement: {s!r}")


def emit_pts(ann: PtsAnnotation) -> Derivation:
    return _PtsEmitter(ann).node(ann.program, ())


def emit_live(ann: LiveAnnotation) -> Derivation:
    return _LiveEmitter(ann, "live").node(ann.program, ())


def emit_dce(ann: LiveAnnotation) -> Derivation:
    """Derivation of the dce judgement; its root ``transformed`` is the optimized program."""
    return _LiveEmitter(ann, "dce").node(ann.program, ())


def emit(result) -> Derivation:
    """Derivation for a points-to annotation, a live annotation or an optimization result."""
    if isinstance(result, PtsAnnotation):
        return emit_pts(result)
    if isinstance(result, LiveAnnotation):
        return emit_live(result)
    derivation = getattr(result, "derivation", None)
    if isinstance(derivation, Derivation):
        return derivation
    raise TypeError(f"cannot emit a derivation for {type(result).__name__}")
