"""Random programs, state samplers and brute-force oracles for property tests.

``semantic_live`` decides liveness by experiment: a variable is live at a
program point when changing only its value there changes some observable
outcome of the rest of the program. The oracle can miss liveness (it only
sees the sampled states) but never invents it, so it is only used to check
that the static analysis over-approximates it.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Callable, Iterable
from dataclasses import dataclass

from .lattice import LiveType, Pts, models, models_l
from .semantics import ABORT, FUEL_EXHAUSTED, Bounds, State, _Runner, outcome_projection
from .syntax import (
    DESUGAR,
    AddrAssign,
    Addr,
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
    Path,
    Ref,
    Seq,
    Skip,
    Stmt,
    StoreAssign,
    While,
    desugar_parif,
    vars_of,
    walk,
)

VAR_NAMES = ("x", "y", "z", "w", "u", "v", "t", "s")


@dataclass(frozen=True)
class GenConfig:
    max_vars: int = 4
    max_depth: int = 4
    max_par_width: int = 3
    parfor_reps: tuple[int, ...] = (0, 1, 2)
    while_fuel: int = 8
    int_range: tuple[int, int] = (-2, 2)
    seed: int = 0

    def __post_init__(self) -> None:
        if not 1 <= self.max_vars <= len(VAR_NAMES):
            raise ValueError(f"max_vars must be between 1 and {len(VAR_NAMES)}")
        if self.max_depth < 0 or self.max_par_width < 1 or self.while_fuel < 1:
            raise ValueError("generation bounds must be positive")
        if not self.parfor_reps or min(self.parfor_reps) < 0:
            raise ValueError("parfor_reps must be nonempty and nonnegative")
        lo, hi = self.int_range
        if lo > hi:
            raise ValueError("empty integer range")

    @property
    def bounds(self) -> Bounds:
        return Bounds(self.while_fuel, frozenset(self.parfor_reps))


class _Gen:
    def __init__(self, cfg: GenConfig, rng: random.Random):
        self.cfg = cfg
        self.rng = rng
        n = rng.randint(min(2, cfg.max_vars), cfg.max_vars)
        self.vars = VAR_NAMES[:n]

    def var(self) -> str:
        return self.rng.choice(self.vars)

    def num(self) -> Num:
        return Num(self.rng.randint(*self.cfg.int_range))

    def aexpr(self, depth: int = 2):
        r = self.rng.random()
        if depth <= 0 or r < 0.4:
            return self.num() if self.rng.random() < 0.4 else Ref(self.var())
        op = self.rng.choice(("+", "-", "*"))
        return BinOp(op, self.aexpr(depth - 1), self.aexpr(depth - 1))

    def bexpr(self, depth: int = 2):
        r = self.rng.random()
        if depth <= 0 or r < 0.6:
            pick = self.rng.random()
            if pick < 0.08:
                return BTrue()
            if pick < 0.16:
                return BFalse()
            cmp = Eq if pick < 0.6 else Leq
            return cmp(self.aexpr(1), self.aexpr(1))
        if r < 0.75:
            return Not(self.bexpr(depth - 1))
        op = And if r < 0.88 else Or
        return op(self.bexpr(depth - 1), self.bexpr(depth - 1))

    def atomic(self) -> Stmt:
        kind = self.rng.choices(("assign", "addr", "store", "load", "skip"), (4, 3, 3, 3, 1))[0]
        if kind == "assign":
            return Assign(self.var(), self.aexpr())
        if kind == "addr":
            return AddrAssign(self.var(), self.var())
        if kind == "store":
            return StoreAssign(self.var(), self.aexpr())
        if kind == "load":
            return LoadAssign(self.var(), self.var())
        return Skip()

    def stmt(self, depth: int) -> Stmt:
        if depth <= 0 or self.rng.random() < 0.3:
            return self.atomic()
        kind = self.rng.choices(
            ("seq", "if", "while", "par", "par-if", "par-for"), (5, 2, 2, 2, 1, 1)
        )[0]
        d = depth - 1
        if kind == "seq":
            return Seq(self.stmt(d), self.stmt(d))
        if kind == "if":
            return If(self.bexpr(), self.stmt(d), self.stmt(d))
        if kind == "while":
            if self.rng.random() < 0.7:
                # counting loop: usually terminates within the fuel
                i = self.var()
                bound = self.rng.randint(0, 2)
                return While(
                    Leq(Ref(i), Num(bound)),
                    Seq(self.stmt(d), Assign(i, BinOp("+", Ref(i), Num(1)))),
                )
            return While(self.bexpr(), self.stmt(d))
        width = self.rng.randint(1, self.cfg.max_par_width)
        if kind == "par":
            return Par(tuple(self.stmt(d) for _ in range(width)))
        if kind == "par-if":
            return ParIf(tuple((self.bexpr(1), self.stmt(d)) for _ in range(width)))
        return ParFor(self.stmt(d))


def gen_program(cfg: GenConfig | None = None, seed: int | None = None) -> Stmt:
    """A random program within ``cfg``'s bounds; a pure function of the seed."""
    cfg = cfg or GenConfig()
    rng = random.Random(cfg.seed if seed is None else seed)
    return _Gen(cfg, rng).stmt(cfg.max_depth)


def gen_guard(cfg: GenConfig, rng: random.Random, depth: int = 1):
    """A random boolean expression over the variables a program from ``cfg`` may use."""
    return _Gen(cfg, rng).bexpr(depth)


def gen_corpus(n: int, cfg: GenConfig | None = None, start: int = 0) -> list[Stmt]:
    cfg = cfg or GenConfig()
    return [gen_program(cfg, cfg.seed * 1_000_003 + start + i) for i in range(n)]


# -- states ------------------------------------------------------------------


def value_domain(universe: Iterable[str], int_range: tuple[int, int] = (0, 1)) -> list:
    ints = list(range(int_range[0], int_range[1] + 1))
    return ints + [Addr(z) for z in sorted(universe)]


def random_pts(universe: Iterable[str], rng: random.Random, density: float = 0.3) -> Pts:
    universe = sorted(universe)
    return Pts({x: [z for z in universe if rng.random() < density] for x in universe})


def sample_state(
    universe: Iterable[str],
    rng: random.Random,
    pts: Pts | None = None,
    live: Iterable[str] | None = None,
    int_range: tuple[int, int] = (-2, 2),
) -> State:
    """A random state; variables constrained by ``pts`` (all, or just ``live``) respect it."""
    universe = sorted(universe)
    constrained = set(universe if live is None else live) if pts is not None else set()
    ints = list(range(int_range[0], int_range[1] + 1))
    env = {}
    for x in universe:
        if x in constrained:
            choices = ints + [Addr(z) for z in sorted(pts[x])]
        else:
            choices = ints + [Addr(z) for z in universe]
        env[x] = rng.choice(choices)
    return State(env)


def similar_pair(
    universe: Iterable[str], t: LiveType, rng: random.Random, int_range: tuple[int, int] = (-2, 2)
) -> tuple[State, State]:
    """Two states agreeing on ``t.live``, both typed there by ``t.pts``; the rest is arbitrary."""
    universe = sorted(universe)
    g = sample_state(universe, rng, t.pts, t.live, int_range)
    other = sample_state(universe, rng, t.pts, t.live, int_range)
    g_star = State({x: (g[x] if x in t.live else other[x]) for x in universe})
    return g, g_star


def point_states(
    universe: Iterable[str],
    pts: Pts | None = None,
    rng: random.Random | None = None,
    exhaustive_limit: int = 3,
    samples: int = 200,
) -> list[State]:
    """States for oracle experiments: exhaustive over small universes, sampled otherwise.

    Values range over ``{0, 1}`` and the addresses of the universe.
    """
    universe = sorted(universe)
    domain = value_domain(universe)
    if len(universe) <= exhaustive_limit:
        states = [State(zip(universe, vals)) for vals in itertools.product(domain, repeat=len(universe))]
    else:
        rng = rng or random.Random(0)
        states = [State({x: rng.choice(domain) for x in universe}) for _ in range(samples)]
    if pts is not None:
        states = [g for g in states if models(g, pts)]
    return states


# -- the liveness oracle --------------------------------------------------------


def continuations(s: Stmt, path: Path, max_reps: int = 2) -> list[Stmt]:
    """Programs that finish running ``s`` when control sits at ``path``.

    For a thread of a ``par``, any subset of the sibling threads may still be
    pending; for a ``par-for`` body, up to ``max_reps - 1`` further copies.
    """
    if not path:
        return [s]
    k, rest = path[0], path[1:]
    match s:
        case Seq(a, b):
            if k == 0:
                return [Seq(c, b) for c in continuations(a, rest, max_reps)]
            return continuations(b, rest, max_reps)
        case If(_, t, f):
            return continuations(t if k == 0 else f, rest, max_reps)
        case While(_, body):
            return [Seq(c, s) for c in continuations(body, rest, max_reps)]
        case Par(threads):
            inner = continuations(threads[k], rest, max_reps)
            others = [t for j, t in enumerate(threads) if j != k]
            out = []
            for c in inner:
                for r in range(len(others) + 1):
                    for subset in itertools.combinations(others, r):
                        out.append(Seq(c, Par(subset)) if subset else c)
            return out
        case ParIf():
            return continuations(desugar_parif(s), rest, max_reps)
        case ParFor(body):
            inner = continuations(body, rest, max_reps)
            out = []
            for c in inner:
                out.append(c)
                for n in range(1, max_reps):
                    out.append(Seq(c, Par((body,) * n)))
            return out
    raise LookupError(f"path step {k!r} does not apply to {type(s).__name__}")


def semantic_live_set(
    s: Stmt,
    path: Path,
    l_final: Iterable[str],
    bounds: Bounds | None = None,
    pts: Pts | None = None,
    rng: random.Random | None = None,
    samples: int = 200,
) -> frozenset[str]:
    """Variables whose value at ``path`` observably affects the final ``l_final`` values.

    Pairs of start states differing in one variable are compared through every
    continuation; pairs where either run aborts or runs out of fuel are skipped.
    With ``pts`` given, only states of that type are used.
    """
    bounds = bounds or Bounds()
    l_final = tuple(sorted(l_final))
    universe = sorted(vars_of(s) | set(l_final))
    max_reps = max(bounds.parfor_reps)
    conts = continuations(s, path, max(max_reps, 1))
    states = point_states(universe, pts, rng, samples=samples)
    domain = value_domain(universe)
    runner = _Runner(bounds)
    cache: dict[tuple[int, State], frozenset | None] = {}

    def observe(i: int, g: State):
        key = (i, g)
        if key not in cache:
            outs = runner.exec(conts[i], g)
            bad = ABORT in outs or FUEL_EXHAUSTED in outs
            cache[key] = None if bad else outcome_projection(outs, l_final)
        return cache[key]

    live: set[str] = set()
    for g in states:
        for x in universe:
            if x in live:
                continue
            for v in domain:
                if v == g[x]:
                    continue
                h = g.set(x, v)
                if pts is not None and not models(h, pts):
                    continue
                if any(
                    (a := observe(i, g)) is not None
                    and (b := observe(i, h)) is not None
                    and a != b
                    for i in range(len(conts))
                ):
                    live.add(x)
                    break
    return frozenset(live)


def semantic_live(
    s: Stmt,
    path: Path,
    x: str,
    l_final: Iterable[str],
    bounds: Bounds | None = None,
    pts: Pts | None = None,
) -> bool:
    return x in semantic_live_set(s, path, l_final, bounds, pts)


# -- outcome comparisons ----------------------------------------------------------


def states_of(outs: Iterable) -> list[State]:
    return [o for o in outs if isinstance(o, State)]


def matched(outs: Iterable, others: Iterable, t: LiveType) -> bool:
    """Every final state of ``outs`` has a partner in ``others`` similar at ``t``."""
    partners = states_of(others)
    for g in states_of(outs):
        if not models_l(g, t.live, t.pts):
            return False
        if not any(models_l(h, t.live, t.pts) and all(g[x] == h[x] for x in t.live) for h in partners):
            return False
    return True


# -- shrinking ----------------------------------------------------------------------


def replace_at(s: Stmt, path: Path, new: Stmt) -> Stmt:
    """``s`` with the subtree at ``path`` replaced; ``~/i/0`` addresses a par-if body."""
    if not path:
        return new
    k, rest = path[0], path[1:]
    match s:
        case Seq(a, b):
            return Seq(replace_at(a, rest, new), b) if k == 0 else Seq(a, replace_at(b, rest, new))
        case If(c, t, f):
            return If(c, replace_at(t, rest, new), f) if k == 0 else If(c, t, replace_at(f, rest, new))
        case While(c, body):
            return While(c, replace_at(body, rest, new))
        case Par(threads):
            ts = list(threads)
            ts[k] = replace_at(ts[k], rest, new)
            return Par(tuple(ts))
        case ParIf(branches) if k == DESUGAR and len(rest) >= 2 and rest[1] == 0:
            bs = list(branches)
            b, body = bs[rest[0]]
            bs[rest[0]] = (b, replace_at(body, rest[2:], new))
            return ParIf(tuple(bs))
        case ParFor(body):
            return ParFor(replace_at(body, rest, new))
    raise LookupError(f"cannot replace below {type(s).__name__} at {path!r}")


def shrink(s: Stmt, still_fails: Callable[[Stmt], bool]) -> Stmt:
    """Replace subterms by ``skip``, depth first, while ``still_fails`` holds."""
    progress = True
    while progress:
        progress = False
        for path, sub in walk(s):
            if isinstance(sub, Skip):
                continue
            try:
                candidate = replace_at(s, path, Skip())
            except LookupError:
                continue
            if still_fails(candidate):
                s, progress = candidate, True
                break
    return s
