"""Dead-code elimination driven by the live-variables annotation.

``optimize`` runs the whole pipeline: points-to analysis from the given pre
type, backward liveness from the requested live-out set, then a structural
rewrite replacing each dead atomic assignment by ``skip``. The result carries
a dce derivation whose root transformation is the optimized program.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from .certificate.derivation import Derivation
from .certificate.emit import emit_dce
from .lattice import Pts
from .liveness import LiveAnnotation, live_pre, store_rule
from .pointsto import analyze
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
    vars_of,
    walk,
)


class AnnotationMismatch(ValueError):
    """The live annotation does not cover the program being optimized."""


@dataclass
class OptResult:
    original: Stmt
    optimized: Stmt
    annotation: LiveAnnotation
    derivation: Derivation

    @property
    def eliminated(self) -> list[Path]:
        """Paths of the atomic statements that were replaced by ``skip``."""
        return [p for p, s in walk(self.original) if is_dead(s, p, self.annotation)]


def is_dead(s: Stmt, path: Path, ann: LiveAnnotation) -> bool:
    post = ann.nodes[path].post
    match s:
        case Assign(x, _) | AddrAssign(x, _) | LoadAssign(x, _):
            return x not in post
        case StoreAssign(x, _):
            return store_rule(ann.pts.nodes[path].pre[x], post) == "1"
    return False


def _rewrite(s: Stmt, path: Path, ann: LiveAnnotation) -> Stmt:
    match s:
        case Assign() | AddrAssign() | LoadAssign() | StoreAssign():
            return Skip() if is_dead(s, path, ann) else s
        case Skip():
            return s
        case Seq(a, b):
            return Seq(_rewrite(a, path + (0,), ann), _rewrite(b, path + (1,), ann))
        case If(c, t, f):
            return If(c, _rewrite(t, path + (0,), ann), _rewrite(f, path + (1,), ann))
        case While(c, body):
            return While(c, _rewrite(body, path + (0,), ann))
        case Par(threads):
            return Par(tuple(_rewrite(t, path + (i,), ann) for i, t in enumerate(threads)))
        case ParIf(branches):
            # thread i of the desugaring is `if b then S else skip`; S sits at i/0
            return ParIf(
                tuple(
                    (b, _rewrite(t, path + (DESUGAR, i, 0), ann))
                    for i, (b, t) in enumerate(branches)
                )
            )
        case ParFor(body):
            return ParFor(_rewrite(body, path + (0,), ann))
    raise TypeError(f"not a statement: {s!r}")


def eliminate(s: Stmt, ann: LiveAnnotation) -> OptResult:
    """Replace every dead assignment of ``s`` by ``skip`` according to ``ann``."""
    missing = [p for p, _ in walk(s) if p not in ann.nodes or p not in ann.pts.nodes]
    if ann.program != s or missing:
        raise AnnotationMismatch("live annotation was computed for a different program")
    optimized = _rewrite(s, (), ann)
    derivation = emit_dce(ann)
    if derivation.conclusion.transformed != optimized:  # pragma: no cover - internal consistency
        raise AssertionError("dce derivation disagrees with the rewrite")
    return OptResult(s, optimized, ann, derivation)


def optimize(s: Stmt, l_final: Iterable[str], pre_pts: Pts | None = None) -> OptResult:
    """Points-to analysis, liveness from ``l_final`` and elimination, in that order.

    Variables of ``l_final`` that do not occur in ``s`` are added to the universe.
    """
    l_final = frozenset(l_final)
    if pre_pts is None:
        pre_pts = Pts.bottom(vars_of(s) | l_final)
    pann = analyze(s, pre_pts)
    return eliminate(s, live_pre(s, pann, l_final))
