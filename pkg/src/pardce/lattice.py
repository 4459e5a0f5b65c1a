"""Points-to types, live types and the relations between states and types.

A points-to type maps every variable of a fixed universe to the set of
variables whose address it may hold; addresses are named by their variable.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from .syntax import Addr


class UniverseMismatch(ValueError):
    """Two types over different variable universes were compared or joined."""


class Pts:
    """An immutable points-to type, total over its universe."""

    __slots__ = ("_map", "_hash")

    def __init__(self, mapping: Mapping[str, Iterable[str]]):
        self._map = {x: frozenset(a) for x, a in mapping.items()}
        self._hash: int | None = None

    @classmethod
    def bottom(cls, universe: Iterable[str]) -> Pts:
        return cls({x: () for x in universe})

    @property
    def universe(self) -> frozenset[str]:
        return frozenset(self._map)

    def __getitem__(self, x: str) -> frozenset[str]:
        return self._map[x]

    def items(self):
        return self._map.items()

    def update(self, x: str, addrs: Iterable[str]) -> Pts:
        """``self[x := addrs]`` (the strong update)."""
        if x not in self._map:
            raise UniverseMismatch(f"{x} is not in the universe")
        m = dict(self._map)
        m[x] = frozenset(addrs)
        return Pts(m)

    def _same_universe(self, other: Pts) -> None:
        if self._map.keys() != other._map.keys():
            raise UniverseMismatch(
                f"universes differ: {sorted(self._map)} vs {sorted(other._map)}"
            )

    def leq(self, other: Pts) -> bool:
        self._same_universe(other)
        return all(a <= other._map[x] for x, a in self._map.items())

    def join(self, other: Pts) -> Pts:
        self._same_universe(other)
        return Pts({x: a | other._map[x] for x, a in self._map.items()})

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Pts):
            return self._map == other._map
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._map.items()))
        return self._hash

    def size(self) -> int:
        return sum(len(a) for a in self._map.values())

    def to_json(self) -> dict[str, list[str]]:
        return {x: sorted(self._map[x]) for x in sorted(self._map)}

    def __repr__(self) -> str:
        inner = ", ".join(
            f"{x}: {{{', '.join(sorted(a))}}}" for x, a in sorted(self._map.items())
        )
        return f"Pts({inner})"


def pts_leq(a: Pts, b: Pts) -> bool:
    return a.leq(b)


def pts_join(a: Pts, b: Pts) -> Pts:
    return a.join(b)


def join_all(universe: Iterable[str], types: Iterable[Pts]) -> Pts:
    result = Pts.bottom(universe)
    for t in types:
        result = result.join(t)
    return result


def models(gamma: Mapping[str, object], pts: Pts) -> bool:
    """``gamma`` has type ``pts``: every address held is one ``pts`` allows."""
    for x, a in pts.items():
        v = gamma[x]
        if isinstance(v, Addr) and v.var not in a:
            return False
    return True


def models_l(gamma: Mapping[str, object], live: Iterable[str], pts: Pts) -> bool:
    """``models`` restricted to the variables in ``live``."""
    for x in live:
        v = gamma[x]
        if isinstance(v, Addr) and v.var not in pts[x]:
            return False
    return True


@dataclass(frozen=True)
class LiveType:
    """A points-to type paired with a live-variable set.

    Ordered covariantly in ``pts`` and contravariantly in ``live``.
    """

    pts: Pts
    live: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "live", frozenset(self.live))

    def leq(self, other: LiveType) -> bool:
        return self.pts.leq(other.pts) and self.live >= other.live

    def to_json(self) -> dict:
        return {"live": sorted(self.live), "pts": self.pts.to_json()}


def live_leq(a: LiveType, b: LiveType) -> bool:
    return a.leq(b)


def similar(gamma: Mapping[str, object], other: Mapping[str, object], t: LiveType) -> bool:
    """Both states are typed on ``t.live`` and agree on every live variable."""
    return (
        models_l(gamma, t.live, t.pts)
        and models_l(other, t.live, t.pts)
        and all(gamma[x] == other[x] for x in t.live)
    )
