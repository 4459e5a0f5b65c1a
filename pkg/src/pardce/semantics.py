"""Reference interpreter enumerating every outcome of a program.

Threads of a ``par`` run atomically, one after another, in every order; a
schedule that aborts part-way (any injective prefix of threads ending in an
abort) contributes ``ABORT``. ``par-if`` runs its desugaring and ``par-for``
runs ``n`` copies of its body for each ``n`` in ``Bounds.parfor_reps``.
Loops that exceed ``Bounds.while_fuel`` unrollings yield ``FUEL_EXHAUSTED``.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Iterator, Union

from .syntax import (
    AddrAssign,
    Addr,
    AddrOf,
    And,
    Assign,
    BFalse,
    BinOp,
    BTrue,
    Deref,
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
    Stmt,
    StoreAssign,
    While,
    desugar_parif,
    vars_of,
)

Value = Union[int, Addr]


class Signal(enum.Enum):
    ABORT = "abort"
    FUEL_EXHAUSTED = "fuel-exhausted"
    ERR = "!"

    def __repr__(self) -> str:
        return self.value


ABORT = Signal.ABORT
FUEL_EXHAUSTED = Signal.FUEL_EXHAUSTED
ERR = Signal.ERR


class State(Mapping):
    """Immutable, hashable map from variables to values."""

    __slots__ = ("_env", "_hash")

    def __init__(self, env: Mapping[str, Value] | Iterable[tuple[str, Value]] = ()):
        self._env = dict(env)
        self._hash: int | None = None

    @classmethod
    def over(cls, universe: Iterable[str], init: Mapping[str, Value] | None = None) -> State:
        """Total state over ``universe`` (plus the keys of ``init``); missing vars are 0."""
        env = {x: 0 for x in universe}
        if init:
            env.update(init)
        return cls(env)

    def __getitem__(self, x: str) -> Value:
        return self._env[x]

    def __iter__(self) -> Iterator[str]:
        return iter(self._env)

    def __len__(self) -> int:
        return len(self._env)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._env.items()))
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, State):
            return self._env == other._env
        return NotImplemented

    def set(self, x: str, v: Value) -> State:
        env = dict(self._env)
        env[x] = v
        return State(env)

    def restrict(self, variables: Iterable[str]) -> dict[str, Value]:
        return {x: self._env[x] for x in variables if x in self._env}

    def __repr__(self) -> str:
        return "{" + ", ".join(f"{x}={v}" for x, v in sorted(self._env.items())) + "}"


Outcome = Union[State, Signal]


@dataclass(frozen=True)
class Bounds:
    while_fuel: int = 16
    parfor_reps: frozenset[int] = field(default_factory=lambda: frozenset({0, 1, 2, 3}))

    def __post_init__(self) -> None:
        if self.while_fuel < 0:
            raise ValueError("while_fuel must be nonnegative")
        reps = frozenset(self.parfor_reps)
        if not reps or any(n < 0 for n in reps):
            raise ValueError("parfor_reps must be a nonempty set of nonnegative integers")
        object.__setattr__(self, "parfor_reps", reps)


def _is_int(v: object) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def eval_aexpr(e, gamma: Mapping[str, Value]) -> Value | Signal:
    """Value of ``e`` in ``gamma`` or ``ERR``."""
    match e:
        case Num(n):
            return n
        case Ref(x):
            return gamma[x]
        case AddrOf(x):
            return Addr(x)
        case Deref(x):
            v = gamma[x]
            return gamma[v.var] if isinstance(v, Addr) else ERR
        case BinOp(op, lhs, rhs):
            a = eval_aexpr(lhs, gamma)
            b = eval_aexpr(rhs, gamma)
            if not (_is_int(a) and _is_int(b)):
                return ERR
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            return a * b
    raise TypeError(f"not an arithmetic expression: {e!r}")


def eval_bexpr(b, gamma: Mapping[str, Value]) -> bool | Signal:
    match b:
        case BTrue():
            return True
        case BFalse():
            return False
        case Not(arg):
            v = eval_bexpr(arg, gamma)
            return ERR if v is ERR else not v
        case Eq(lhs, rhs):
            u = eval_aexpr(lhs, gamma)
            v = eval_aexpr(rhs, gamma)
            if u is ERR or v is ERR:
                return ERR
            return type(u) is type(v) and u == v
        case Leq(lhs, rhs):
            u = eval_aexpr(lhs, gamma)
            v = eval_aexpr(rhs, gamma)
            if not (_is_int(u) and _is_int(v)):
                return ERR
            return u <= v
        case And(lhs, rhs) | Or(lhs, rhs):
            u = eval_bexpr(lhs, gamma)
            v = eval_bexpr(rhs, gamma)
            if u is ERR or v is ERR:
                return ERR
            return (u and v) if isinstance(b, And) else (u or v)
    raise TypeError(f"not a boolean expression: {b!r}")


class _Runner:
    """One enumeration; memo tables are keyed by node identity."""

    def __init__(self, bounds: Bounds):
        self.bounds = bounds
        self.memo: dict[tuple[int, State], frozenset] = {}
        self.par_memo: dict[tuple[int, frozenset, State], frozenset] = {}
        self.desugared: dict[int, tuple[ParIf, Par]] = {}
        self.copies: dict[tuple[int, int], tuple[Stmt, Par]] = {}

    def exec(self, s: Stmt, g: State) -> frozenset:
        match s:
            case Skip():
                return frozenset((g,))
            case Assign(x, e):
                v = eval_aexpr(e, g)
                return frozenset((ABORT if v is ERR else g.set(x, v),))
            case AddrAssign(x, y):
                return frozenset((g.set(x, Addr(y)),))
            case LoadAssign(x, y):
                a = g[y]
                return frozenset((g.set(x, g[a.var]) if isinstance(a, Addr) else ABORT,))
            case StoreAssign(x, e):
                a = g[x]
                if not isinstance(a, Addr):
                    return frozenset((ABORT,))
                v = eval_aexpr(e, g)
                return frozenset((ABORT if v is ERR else g.set(a.var, v),))
        key = (id(s), g)
        hit = self.memo.get(key)
        if hit is None:
            hit = self.memo[key] = self._compound(s, g)
        return hit

    def _compound(self, s: Stmt, g: State) -> frozenset:
        match s:
            case Seq(a, b):
                out: set = set()
                for o in self.exec(a, g):
                    out.update(self.exec(b, o) if isinstance(o, State) else (o,))
                return frozenset(out)
            case If(c, t, f):
                v = eval_bexpr(c, g)
                if v is ERR:
                    return frozenset((ABORT,))
                return self.exec(t if v else f, g)
            case While(c, body):
                return self._loop(c, body, g)
            case Par(threads):
                return self._par(s, frozenset(range(len(threads))), g)
            case ParIf():
                cached = self.desugared.get(id(s))
                if cached is None:
                    cached = self.desugared[id(s)] = (s, desugar_parif(s))
                return self.exec(cached[1], g)
            case ParFor(body):
                out = set()
                for n in self.bounds.parfor_reps:
                    if n == 0:
                        out.add(g)
                        continue
                    cached = self.copies.get((id(s), n))
                    if cached is None:
                        cached = self.copies[(id(s), n)] = (s, Par((body,) * n))
                    out.update(self.exec(cached[1], g))
                return frozenset(out)
        raise TypeError(f"not a statement: {s!r}")

    def _loop(self, c, body: Stmt, g: State) -> frozenset:
        out: set = set()
        frontier = {g}
        fuel = self.bounds.while_fuel
        for unrolled in range(fuel + 1):
            nxt: set = set()
            for st in frontier:
                v = eval_bexpr(c, st)
                if v is ERR:
                    out.add(ABORT)
                elif not v:
                    out.add(st)
                elif unrolled == fuel:
                    out.add(FUEL_EXHAUSTED)
                else:
                    for o in self.exec(body, st):
                        (nxt if isinstance(o, State) else out).add(o)
            frontier = nxt
            if not frontier:
                break
        return frozenset(out)

    def _par(self, s: Par, remaining: frozenset, g: State) -> frozenset:
        if not remaining:
            return frozenset((g,))
        key = (id(s), remaining, g)
        hit = self.par_memo.get(key)
        if hit is not None:
            return hit
        out: set = set()
        threads = s.threads
        for i in remaining:
            rest = remaining - {i}
            for o in self.exec(threads[i], g):
                if isinstance(o, State):
                    out.update(self._par(s, rest, o))
                else:
                    out.add(o)
        result = self.par_memo[key] = frozenset(out)
        return result


def run(s: Stmt, gamma: Mapping[str, Value], bounds: Bounds | None = None) -> frozenset:
    """All outcomes of ``s`` from ``gamma``: final ``State``s, ``ABORT``, ``FUEL_EXHAUSTED``.

    ``gamma`` is extended with zeros over ``vars_of(s)``.
    """
    bounds = bounds or Bounds()
    universe = set(vars_of(s))
    universe.update(v.var for v in gamma.values() if isinstance(v, Addr))
    g = State.over(universe, gamma)
    return _Runner(bounds).exec(s, g)


ABORT_TOKEN = "abort"
FUEL_TOKEN = "fuel-exhausted"


def outcome_projection(outs: Iterable[Outcome], live: Iterable[str]) -> frozenset:
    """Restrict each final state to ``live``; signals map to string tokens."""
    live = tuple(live)
    result = set()
    for o in outs:
        if o is ABORT:
            result.add(ABORT_TOKEN)
        elif o is FUEL_EXHAUSTED:
            result.add(FUEL_TOKEN)
        else:
            result.add(frozenset(o.restrict(live).items()))
    return frozenset(result)


def format_value(v: Value) -> str:
    return str(v)


def format_outcome(o: Outcome) -> str:
    if isinstance(o, Signal):
        return o.value
    return ", ".join(f"{x}={format_value(v)}" for x, v in sorted(o.items()))


def format_outcomes(outs: Iterable[Outcome]) -> list[str]:
    return sorted(format_outcome(o) for o in outs)
