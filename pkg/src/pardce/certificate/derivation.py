from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from ..lattice import LiveType, Pts
from ..syntax import Path, Stmt

KINDS = ("pts", "live", "dce")
SUFFIX = {"pts": "p", "live": "l", "dce": "e"}

# Every rule a derivation node may name, grouped by judgement kind.
RULES = {
    "pts": frozenset(
        "skip-p assign-p addr-p load-p store-p seq-p if-p whl-p par-p par-if-p par-for-p csq-p".split()
    ),
    "live": frozenset(
        """skip-l assign-l-1 assign-l-2 addr-l load-l-1 load-l-2 store-l-1 store-l-2
        store-l-2s seq-l if-l whl-l par-l par-if-l par-for-l csq-l""".split()
    ),
    "dce": frozenset(
        """skip-e assign-e-1 assign-e-2 addr-e-1 addr-e-2 load-e-1 load-e-2 store-e-1
        store-e-2 store-e-2s seq-e if-e whl-e par-e par-if-e par-for-e csq-e""".split()
    ),
}

Type = Union[Pts, LiveType]


@dataclass(frozen=True)
class Judgement:
    """``S : pre -> post`` (and ``~> transformed`` for dce) at ``path``."""

    kind: str
    path: Path
    pre: Type
    post: Type
    transformed: Stmt | None = None


@dataclass(frozen=True)
class Derivation:
    rule: str
    conclusion: Judgement
    premises: tuple[Derivation, ...] = ()
    side: dict = field(default_factory=dict, compare=False, hash=False)

    def walk(self):
        """Pre-order iteration over every node of the tree."""
        stack = [self]
        while stack:
            d = stack.pop()
            yield d
            stack.extend(reversed(d.premises))

    def size(self) -> int:
        return sum(1 for _ in self.walk())
