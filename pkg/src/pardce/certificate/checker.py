"""Independent derivation checker.

Only the syntax tree and the lattice order are trusted here: every node is
validated against its named rule from its premises and side data, with no
analysis re-run and no fixpoint iteration.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..lattice import LiveType, Pts, UniverseMismatch
from ..syntax import (
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
    fv_aexpr,
    fv_bexpr,
    instance_step,
    resolve,
    vars_of,
)
from .derivation import KINDS, RULES, Derivation, Judgement


class MalformedCertificate(ValueError):
    """The certificate does not have the shape of a derivation at all."""


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    path: Path | None = None
    reason: str = ""
    rule: str = ""

    def __bool__(self) -> bool:
        return self.accepted

    def __str__(self) -> str:
        if self.accepted:
            return "accept"
        where = "/".join(map(str, self.path)) if self.path else "<root>"
        return f"reject at {where} ({self.rule}): {self.reason}"


class _Reject(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def _require(cond: bool, reason: str) -> None:
    if not cond:
        raise _Reject(reason)


def _expr_addrs(e, pts: Pts) -> frozenset[str]:
    match e:
        case Num() | BinOp():
            return frozenset()
        case Ref(x):
            return pts[x]
        case AddrOf(y):
            return frozenset((y,))
        case Deref(y):
            return frozenset().union(*(pts[z] for z in pts[y]))
    raise _Reject(f"unexpected expression {e!r}")


class _Checker:
    def __init__(self, program: Stmt, universe: frozenset[str]):
        self.program = program
        self.universe = universe

    # -- well-formedness ---------------------------------------------------

    def typ(self, t, kind: str) -> None:
        want = Pts if kind == "pts" else LiveType
        if not isinstance(t, want):
            raise MalformedCertificate(f"{kind} judgement carries a {type(t).__name__}")
        pts = t if kind == "pts" else t.pts
        if not isinstance(pts, Pts):
            raise MalformedCertificate("live type without a points-to type")
        _require(pts.universe == self.universe, "type over the wrong variable universe")
        for _, addrs in pts.items():
            _require(addrs <= self.universe, "address outside the universe")
        if kind != "pts":
            _require(t.live <= self.universe, "live variable outside the universe")

    def judgement(self, d: Derivation) -> Stmt:
        if not isinstance(d, Derivation) or not isinstance(d.conclusion, Judgement):
            raise MalformedCertificate("derivation node expected")
        j = d.conclusion
        if j.kind not in KINDS:
            raise MalformedCertificate(f"unknown judgement kind {j.kind!r}")
        if not isinstance(j.path, tuple):
            raise MalformedCertificate("path must be a tuple")
        self.typ(j.pre, j.kind)
        self.typ(j.post, j.kind)
        if (j.transformed is not None) != (j.kind == "dce"):
            raise MalformedCertificate("transformed statement present iff kind is dce")
        _require(d.rule in RULES[j.kind], f"no rule {d.rule!r} for {j.kind} judgements")
        try:
            return resolve(self.program, j.path)
        except LookupError as exc:
            raise _Reject(f"path does not resolve: {exc}") from None

    # -- helpers -----------------------------------------------------------

    @staticmethod
    def arity(d: Derivation, n: int) -> None:
        _require(len(d.premises) == n, f"expected {n} premise(s), found {len(d.premises)}")

    @staticmethod
    def at(p: Derivation, path: Path, kind: str) -> Judgement:
        c = p.conclusion
        _require(c.kind == kind, f"premise has kind {c.kind}, expected {kind}")
        _require(c.path == path, f"premise at {list(c.path)}, expected {list(path)}")
        return c

    def pts_premise(self, d: Derivation) -> None:
        """Leaf live/dce rules rest on the points-to judgement of the same statement."""
        j = d.conclusion
        self.arity(d, 1)
        c = self.at(d.premises[0], j.path, "pts")
        _require(c.pre == j.pre.pts and c.post == j.post.pts, "points-to premise does not match")

    def same_transform(self, j: Judgement, want: Stmt) -> None:
        if j.kind == "dce":
            _require(j.transformed == want, "transformed statement does not match the rule")

    # -- dispatch ----------------------------------------------------------

    def check(self, d: Derivation) -> None:
        stack = [d]
        while stack:
            node = stack.pop()
            try:
                s = self.judgement(node)
                if node.rule.startswith("csq-"):
                    self.csq(node)
                elif node.conclusion.kind == "pts":
                    self.pts_rule(node, s)
                else:
                    self.live_rule(node, s)
            except _Reject as exc:
                raise _Located(node, exc.reason) from None
            except UniverseMismatch as exc:
                raise _Located(node, str(exc)) from None
            except (KeyError, TypeError, AttributeError) as exc:
                raise _Located(node, f"ill-formed side data: {exc!r}") from None
            stack.extend(node.premises)

    def csq(self, d: Derivation) -> None:
        j = d.conclusion
        self.arity(d, 1)
        c = self.at(d.premises[0], j.path, j.kind)
        _require(j.pre.leq(c.pre), "consequence pre is not below the premise pre")
        _require(c.post.leq(j.post), "premise post is not below the consequence post")
        _require(c.transformed == j.transformed, "consequence changes the transformed statement")

    # -- points-to rules ---------------------------------------------------

    def pts_rule(self, d: Derivation, s: Stmt) -> None:
        j = d.conclusion
        pre, post, path = j.pre, j.post, j.path
        rule = d.rule
        if rule == "skip-p":
            _require(isinstance(s, Skip), "skip-p needs skip")
            self.arity(d, 0)
            _require(pre == post, "skip must not change the type")
        elif rule == "assign-p":
            _require(isinstance(s, Assign), "assign-p needs an assignment")
            self.arity(d, 0)
            addrs = _expr_addrs(s.expr, pre)
            if "addrs" in d.side:
                _require(frozenset(d.side["addrs"]) == addrs, "address set does not match the expression")
            _require(post == pre.update(s.var, addrs), "post is not pre[x := A]")
        elif rule == "addr-p":
            _require(isinstance(s, AddrAssign), "addr-p needs x := &y")
            self.arity(d, 0)
            _require(post == pre.update(s.var, (s.target,)), "post is not pre[x := {y}]")
        elif rule in ("load-p", "store-p"):
            if rule == "load-p":
                _require(isinstance(s, LoadAssign), "load-p needs x := *y")
                targets = pre[s.source]
            else:
                _require(isinstance(s, StoreAssign), "store-p needs *x := e")
                targets = pre[s.var]
            want = sorted((path + (instance_step(z),) for z in targets), key=repr)
            got = sorted((p.conclusion.path for p in d.premises), key=repr)
            _require(got == want, "premises must be one instance per possible target")
            for p in d.premises:
                c = self.at(p, p.conclusion.path, "pts")
                _require(c.pre == pre and c.post == post, "instance premise does not match")
            if not targets:
                _require(post == Pts.bottom(self.universe), "no target, so the post must be bottom")
            if rule == "store-p" and "update" in d.side:
                n = len(targets)
                kind = "vacuous" if n == 0 else "strong" if n == 1 else "weak"
                _require(d.side["update"] == kind, f"update kind should be {kind}")
        elif rule == "seq-p":
            _require(isinstance(s, Seq), "seq-p needs a sequence")
            self.arity(d, 2)
            a = self.at(d.premises[0], path + (0,), "pts")
            b = self.at(d.premises[1], path + (1,), "pts")
            _require(a.pre == pre and a.post == b.pre and b.post == post, "sequence types do not chain")
        elif rule == "if-p":
            _require(isinstance(s, If), "if-p needs a conditional")
            self.arity(d, 2)
            for k in (0, 1):
                c = self.at(d.premises[k], path + (k,), "pts")
                _require(c.pre == pre and c.post == post, "branch type does not match")
        elif rule == "whl-p":
            _require(isinstance(s, While), "whl-p needs a loop")
            self.arity(d, 1)
            _require(pre == post, "loop invariant: pre and post must coincide")
            if "invariant" in d.side:
                _require(d.side["invariant"] == pre, "side invariant differs from the conclusion")
            c = self.at(d.premises[0], path + (0,), "pts")
            _require(c.pre == pre and c.post == pre, "body does not preserve the invariant")
        elif rule == "par-p":
            _require(isinstance(s, Par), "par-p needs par")
            sols = d.side.get("threads")
            _require(isinstance(sols, list) and len(sols) == len(s.threads), "need one type per thread")
            for t in sols:
                self.typ(t, "pts")
            self.arity(d, len(s.threads))
            for i, p in enumerate(d.premises):
                c = self.at(p, path + (i,), "pts")
                env = pre
                for k, t in enumerate(sols):
                    if k != i:
                        env = env.join(t)
                _require(c.pre == env, f"thread {i} pre is not pre joined with the other threads")
                _require(c.post == sols[i], f"thread {i} post differs from its side type")
            total = Pts.bottom(self.universe)
            for t in sols:
                total = total.join(t)
            _require(post == total, "post is not the join of the thread types")
        elif rule == "par-if-p":
            _require(isinstance(s, ParIf), "par-if-p needs par-if")
            self.arity(d, 1)
            c = self.at(d.premises[0], path + (DESUGAR,), "pts")
            _require(c.pre == pre and c.post == post, "desugared premise does not match")
        elif rule == "par-for-p":
            _require(isinstance(s, ParFor), "par-for-p needs par-for")
            self.arity(d, 1)
            if "closure" in d.side:
                _require(d.side["closure"] == post, "side closure differs from the post")
            c = self.at(d.premises[0], path + (0,), "pts")
            _require(c.pre == pre.join(post) and c.post == post, "body is not closed under the post")
        else:  # pragma: no cover - RULES guards this
            raise _Reject(f"unknown rule {rule}")

    # -- live and dce rules ------------------------------------------------

    def live_rule(self, d: Derivation, s: Stmt) -> None:
        j = d.conclusion
        pre, post, path, kind = j.pre, j.post, j.path, j.kind
        l, lp = pre.live, post.live
        # "store-l-2s": base rule, kind letter, then an optional variant
        name = d.rule
        base, _, tail = name.partition("-l" if kind == "live" else "-e")
        variant = tail.lstrip("-")
        if base in ("skip", "assign", "addr", "load", "store"):
            self.live_leaf(d, s, base, variant)
            return
        _require(variant == "", f"unknown rule {name}")
        tr = lambda k: d.premises[k].conclusion.transformed  # noqa: E731
        if base == "seq":
            _require(isinstance(s, Seq), "seq needs a sequence")
            self.arity(d, 2)
            a = self.at(d.premises[0], path + (0,), kind)
            b = self.at(d.premises[1], path + (1,), kind)
            _require(a.pre == pre and a.post == b.pre and b.post == post, "sequence types do not chain")
            self.same_transform(j, Seq(tr(0), tr(1)) if kind == "dce" else None)
        elif base == "if":
            _require(isinstance(s, If), "if needs a conditional")
            self.arity(d, 2)
            a = self.at(d.premises[0], path + (0,), kind)
            b = self.at(d.premises[1], path + (1,), kind)
            _require(a.pre == b.pre, "branches must share a pre type")
            _require(a.post == post and b.post == post, "branch post does not match")
            _require(pre.pts == a.pre.pts, "points-to pre does not match the branches")
            _require(l == a.pre.live | fv_bexpr(s.cond), "live pre must add the guard variables")
            self.same_transform(j, If(s.cond, tr(0), tr(1)) if kind == "dce" else None)
        elif base == "whl":
            _require(isinstance(s, While), "whl needs a loop")
            self.arity(d, 1)
            _require(pre.pts == post.pts, "loop invariant: pts pre and post must coincide")
            _require(l == lp | fv_bexpr(s.cond), "live pre must be the exit set plus the guard")
            c = self.at(d.premises[0], path + (0,), kind)
            _require(c.pre == LiveType(pre.pts, lp), "body pre must be (invariant, exit set)")
            _require(c.post == LiveType(pre.pts, l), "body post must be (invariant, loop head set)")
            self.same_transform(j, While(s.cond, tr(0)) if kind == "dce" else None)
        elif base == "par":
            _require(isinstance(s, Par), "par needs par")
            sols = d.side.get("threads")
            _require(isinstance(sols, list) and len(sols) == len(s.threads), "need one type per thread")
            for t in sols:
                self.typ(t, "live")
            self.arity(d, len(s.threads))
            for i, p in enumerate(d.premises):
                c = self.at(p, path + (i,), kind)
                env, others = pre.pts, lp
                for k, t in enumerate(sols):
                    if k != i:
                        env, others = env.join(t.pts), others | t.live
                _require(c.pre == LiveType(env, sols[i].live), f"thread {i} pre does not match")
                _require(c.post == LiveType(sols[i].pts, others), f"thread {i} post does not match")
            total = Pts.bottom(self.universe)
            for t in sols:
                total = total.join(t.pts)
            _require(post.pts == total, "points-to post is not the join of the threads")
            _require(l == frozenset().union(*(t.live for t in sols)), "live pre is not the union of the threads")
            if kind == "dce":
                self.same_transform(j, Par(tuple(tr(i) for i in range(len(s.threads)))))
        elif base == "par-if":
            _require(isinstance(s, ParIf), "par-if needs par-if")
            self.arity(d, 1)
            c = self.at(d.premises[0], path + (DESUGAR,), kind)
            _require(c.pre == pre and c.post == post, "desugared premise does not match")
            if kind == "dce":
                t = c.transformed
                _require(
                    isinstance(t, Par)
                    and len(t.threads) == len(s.branches)
                    and all(
                        isinstance(arm, If) and arm.cond == b and arm.orelse == Skip()
                        for arm, (b, _) in zip(t.threads, s.branches)
                    ),
                    "desugared transformation is not a par of guarded threads",
                )
                self.same_transform(j, ParIf(tuple((arm.cond, arm.then) for arm in t.threads)))
        elif base == "par-for":
            _require(isinstance(s, ParFor), "par-for needs par-for")
            self.arity(d, 1)
            if "closure" in d.side:
                _require(d.side["closure"] == post.pts, "side closure differs from the post")
            c = self.at(d.premises[0], path + (0,), kind)
            _require(c.pre == LiveType(pre.pts.join(post.pts), l), "body pre does not match")
            _require(c.post == LiveType(post.pts, lp | l), "body post does not match")
            _require(lp <= l, "live-out must be live before par-for")
            self.same_transform(j, ParFor(tr(0)) if kind == "dce" else None)
        else:
            raise _Reject(f"unknown rule {name}")

    def live_leaf(self, d: Derivation, s: Stmt, base: str, variant: str) -> None:
        j = d.conclusion
        pre, post, kind = j.pre, j.post, j.kind
        l, lp = pre.live, post.live
        dce = kind == "dce"
        if base == "skip":
            _require(isinstance(s, Skip) and variant == "", "skip rule needs skip")
            self.arity(d, 0)
            _require(pre == post, "skip must not change the type")
            self.same_transform(j, Skip())
            return
        if base == "addr":
            _require(isinstance(s, AddrAssign), "addr rule needs x := &y")
            self.arity(d, 0)
            x = s.var
            _require(post.pts == pre.pts.update(x, (s.target,)), "points-to post is not pre[x := {y}]")
            if not dce:
                _require(variant == "", "live addr rule has no variants")
                _require(l == lp - {x}, "live pre must be live-out minus x")
            elif variant == "1":
                _require(x not in lp, "x is live, so the assignment is not dead")
                _require(l == lp, "dead assignment must not change the live set")
                self.same_transform(j, Skip())
            elif variant == "2":
                _require(x in lp, "x is not live")
                _require(l == lp - {x}, "live pre must be live-out minus x")
                self.same_transform(j, s)
            else:
                raise _Reject(f"unknown rule {d.rule}")
            return
        self.pts_premise(d)
        if base == "assign":
            _require(isinstance(s, Assign), "assign rule needs an assignment")
            x = s.var
            if variant == "1":
                _require(x not in lp, "x is live, so the assignment is not dead")
                _require(l == lp, "dead assignment must not change the live set")
                self.same_transform(j, Skip())
            elif variant == "2":
                _require(x in lp, "x is not live")
                _require(l == (lp - {x}) | fv_aexpr(s.expr), "live pre must be (l' - x) + FV(e)")
                self.same_transform(j, s)
            else:
                raise _Reject(f"unknown rule {d.rule}")
        elif base == "load":
            _require(isinstance(s, LoadAssign), "load rule needs x := *y")
            x, y = s.var, s.source
            if variant == "1":
                _require(x not in lp, "x is live, so the load is not dead")
                _require(l == lp | {y}, "live pre must be l' + y")
                self.same_transform(j, Skip())
            elif variant == "2":
                _require(x in lp, "x is not live")
                _require(l == (lp - {x}) | {y} | pre.pts[y], "live pre must be (l' - x) + y + pts(y)")
                self.same_transform(j, s)
            else:
                raise _Reject(f"unknown rule {d.rule}")
        elif base == "store":
            _require(isinstance(s, StoreAssign), "store rule needs *x := e")
            x = s.var
            targets = pre.pts[x]
            if variant == "1":
                _require(not targets & lp, "a possible target is live")
                _require(l == lp | {x}, "live pre must be l' + x")
                self.same_transform(j, Skip())
            elif variant == "2":
                _require(bool(targets & lp), "no possible target is live")
                _require(l == lp | fv_aexpr(s.expr) | {x}, "live pre must be l' + FV(e) + x")
                self.same_transform(j, s)
            elif variant == "2s":
                _require(len(targets) == 1 and targets <= lp, "needs a single live target")
                _require(
                    l == (lp - targets) | fv_aexpr(s.expr) | {x},
                    "live pre must be (l' - z) + FV(e) + x",
                )
                self.same_transform(j, s)
            else:
                raise _Reject(f"unknown rule {d.rule}")


class _Located(Exception):
    def __init__(self, node: Derivation, reason: str):
        super().__init__(reason)
        self.node = node
        self.reason = reason


def check(d: Derivation, program: Stmt) -> Verdict:
    """Validate ``d`` as a derivation for ``program``.

    Returns an accepting ``Verdict`` or one naming the first offending node.
    Raises ``MalformedCertificate`` when ``d`` is not a derivation tree.
    """
    if not isinstance(d, Derivation) or not isinstance(d.conclusion, Judgement):
        raise MalformedCertificate("derivation node expected")
    if d.conclusion.path != ():
        return Verdict(False, d.conclusion.path, "root judgement must be at the program root", d.rule)
    pre = d.conclusion.pre
    pts = pre if isinstance(pre, Pts) else getattr(pre, "pts", None)
    if not isinstance(pts, Pts):
        raise MalformedCertificate("root judgement has no points-to type")
    universe = pts.universe
    if not vars_of(program) <= universe:
        return Verdict(False, (), "universe does not cover the program variables", d.rule)
    try:
        _Checker(program, universe).check(d)
    except _Located as exc:
        return Verdict(False, exc.node.conclusion.path, exc.reason, exc.node.rule)
    return Verdict(True)
