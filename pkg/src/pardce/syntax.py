"""Abstract syntax of the parallel pointer language.

Statements, arithmetic and boolean expressions are immutable dataclasses, so
trees can be hashed, compared structurally and shared between threads.

Program points are addressed by *paths*: tuples of steps from the root.

* an ``int`` step selects a child (``Seq``: 0/1, ``If``: 0/1, ``While``: 0,
  ``Par``: thread index, ``ParFor``: 0);
* ``"~"`` on a ``ParIf`` selects its desugaring into ``Par`` of
  ``if b then S else skip`` threads;
* ``"@z"`` on a load ``x := *y`` selects the instance ``x := z``, and on a
  store ``*x := e`` the instance ``z := e``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

DESUGAR = "~"


class ValidationError(ValueError):
    """A tree places ``&y`` or ``*y`` somewhere the grammar does not allow."""


@dataclass(frozen=True, slots=True)
class Addr:
    """The address ``x'`` of variable ``x``."""

    var: str

    def __str__(self) -> str:
        return f"&{self.var}"


# -- arithmetic expressions ------------------------------------------------


@dataclass(frozen=True, slots=True)
class Num:
    value: int


@dataclass(frozen=True, slots=True)
class Ref:
    var: str


@dataclass(frozen=True, slots=True)
class BinOp:
    op: str  # one of "+", "-", "*"
    lhs: AExpr
    rhs: AExpr


@dataclass(frozen=True, slots=True)
class AddrOf:
    var: str


@dataclass(frozen=True, slots=True)
class Deref:
    var: str


AExpr = Union[Num, Ref, BinOp, AddrOf, Deref]
BINOPS = ("+", "-", "*")


# -- boolean expressions ---------------------------------------------------


@dataclass(frozen=True, slots=True)
class BTrue:
    pass


@dataclass(frozen=True, slots=True)
class BFalse:
    pass


@dataclass(frozen=True, slots=True)
class Not:
    arg: BExpr


@dataclass(frozen=True, slots=True)
class Eq:
    lhs: AExpr
    rhs: AExpr


@dataclass(frozen=True, slots=True)
class Leq:
    lhs: AExpr
    rhs: AExpr


@dataclass(frozen=True, slots=True)
class And:
    lhs: BExpr
    rhs: BExpr


@dataclass(frozen=True, slots=True)
class Or:
    lhs: BExpr
    rhs: BExpr


BExpr = Union[BTrue, BFalse, Not, Eq, Leq, And, Or]


# -- statements ------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Assign:
    var: str
    expr: AExpr


@dataclass(frozen=True, slots=True)
class AddrAssign:
    """``x := &y``"""

    var: str
    target: str


@dataclass(frozen=True, slots=True)
class StoreAssign:
    """``*x := e``"""

    var: str
    expr: AExpr


@dataclass(frozen=True, slots=True)
class LoadAssign:
    """``x := *y``"""

    var: str
    source: str


@dataclass(frozen=True, slots=True)
class Skip:
    pass


@dataclass(frozen=True, slots=True)
class Seq:
    first: Stmt
    second: Stmt


@dataclass(frozen=True, slots=True)
class If:
    cond: BExpr
    then: Stmt
    orelse: Stmt


@dataclass(frozen=True, slots=True)
class While:
    cond: BExpr
    body: Stmt


@dataclass(frozen=True, slots=True)
class Par:
    threads: tuple[Stmt, ...]

    def __post_init__(self) -> None:
        if not self.threads:
            raise ValidationError("par needs at least one thread")


@dataclass(frozen=True, slots=True)
class ParIf:
    branches: tuple[tuple[BExpr, Stmt], ...]

    def __post_init__(self) -> None:
        if not self.branches:
            raise ValidationError("par-if needs at least one thread")


@dataclass(frozen=True, slots=True)
class ParFor:
    body: Stmt


Stmt = Union[
    Assign, AddrAssign, StoreAssign, LoadAssign, Skip, Seq, If, While, Par, ParIf, ParFor
]
ATOMIC = (Assign, AddrAssign, StoreAssign, LoadAssign, Skip)
Path = tuple  # tuple[int | str, ...]


def seq(*stmts: Stmt) -> Stmt:
    """Right-nested sequence of one or more statements."""
    if not stmts:
        raise ValueError("seq() needs at least one statement")
    result = stmts[-1]
    for s in reversed(stmts[:-1]):
        result = Seq(s, result)
    return result


# -- free variables and universes -------------------------------------------


def fv_aexpr(e: AExpr) -> frozenset[str]:
    match e:
        case Num():
            return frozenset()
        case Ref(var) | AddrOf(var) | Deref(var):
            return frozenset((var,))
        case BinOp(_, lhs, rhs):
            return fv_aexpr(lhs) | fv_aexpr(rhs)
    raise TypeError(f"not an arithmetic expression: {e!r}")


def fv_bexpr(b: BExpr) -> frozenset[str]:
    match b:
        case BTrue() | BFalse():
            return frozenset()
        case Not(arg):
            return fv_bexpr(arg)
        case Eq(lhs, rhs) | Leq(lhs, rhs):
            return fv_aexpr(lhs) | fv_aexpr(rhs)
        case And(lhs, rhs) | Or(lhs, rhs):
            return fv_bexpr(lhs) | fv_bexpr(rhs)
    raise TypeError(f"not a boolean expression: {b!r}")


def vars_of(s: Stmt) -> frozenset[str]:
    """Every variable occurring anywhere in ``s``."""
    match s:
        case Assign(x, e) | StoreAssign(x, e):
            return fv_aexpr(e) | {x}
        case AddrAssign(x, y) | LoadAssign(x, y):
            return frozenset((x, y))
        case Skip():
            return frozenset()
        case Seq(a, b):
            return vars_of(a) | vars_of(b)
        case If(c, t, f):
            return fv_bexpr(c) | vars_of(t) | vars_of(f)
        case While(c, body):
            return fv_bexpr(c) | vars_of(body)
        case Par(threads):
            return frozenset().union(*map(vars_of, threads))
        case ParIf(branches):
            return frozenset().union(*(fv_bexpr(b) | vars_of(t) for b, t in branches))
        case ParFor(body):
            return vars_of(body)
    raise TypeError(f"not a statement: {s!r}")


# -- structure ---------------------------------------------------------------


def desugar_parif(s: ParIf) -> Par:
    return Par(tuple(If(b, body, Skip()) for b, body in s.branches))


def instance_step(z: str) -> str:
    return "@" + z


def step(s: Stmt, k: int | str) -> Stmt:
    """The statement one path step below ``s``; ``LookupError`` if invalid."""
    if isinstance(k, str):
        if k == DESUGAR and isinstance(s, ParIf):
            return desugar_parif(s)
        if k.startswith("@") and len(k) > 1:
            z = k[1:]
            if isinstance(s, LoadAssign):
                return Assign(s.var, Ref(z))
            if isinstance(s, StoreAssign):
                return Assign(z, s.expr)
        raise LookupError(f"step {k!r} does not apply to {type(s).__name__}")
    if isinstance(k, bool) or not isinstance(k, int):
        raise LookupError(f"bad path step {k!r}")
    match s:
        case Seq(a, b) if k in (0, 1):
            return (a, b)[k]
        case If(_, t, f) if k in (0, 1):
            return (t, f)[k]
        case While(_, body) | ParFor(body) if k == 0:
            return body
        case Par(threads) if 0 <= k < len(threads):
            return threads[k]
    raise LookupError(f"step {k!r} does not apply to {type(s).__name__}")


def resolve(program: Stmt, path: Path) -> Stmt:
    s = program
    for k in path:
        s = step(s, k)
    return s


def children(s: Stmt) -> list[tuple[int | str, Stmt]]:
    """Program-tree children with their path steps (ParIf goes through ``~``)."""
    match s:
        case Seq(a, b):
            return [(0, a), (1, b)]
        case If(_, t, f):
            return [(0, t), (1, f)]
        case While(_, body) | ParFor(body):
            return [(0, body)]
        case Par(threads):
            return list(enumerate(threads))
        case ParIf():
            return [(DESUGAR, desugar_parif(s))]
    return []


def walk(s: Stmt, path: Path = ()) -> Iterator[tuple[Path, Stmt]]:
    """Pre-order traversal yielding ``(path, stmt)`` for every program point."""
    yield path, s
    for k, child in children(s):
        yield from walk(child, path + (k,))


def skeleton(s: Stmt) -> object:
    """``s`` with every atomic statement erased to a hole."""
    match s:
        case Seq(a, b):
            return ("seq", skeleton(a), skeleton(b))
        case If(c, t, f):
            return ("if", c, skeleton(t), skeleton(f))
        case While(c, body):
            return ("while", c, skeleton(body))
        case Par(threads):
            return ("par", tuple(map(skeleton, threads)))
        case ParIf(branches):
            return ("par-if", tuple((b, skeleton(t)) for b, t in branches))
        case ParFor(body):
            return ("par-for", skeleton(body))
    return "_"


# -- grammar restriction -----------------------------------------------------


def _check_plain(e: AExpr) -> None:
    match e:
        case Num() | Ref():
            return
        case BinOp(op, lhs, rhs):
            if op not in BINOPS:
                raise ValidationError(f"unknown operator {op!r}")
            _check_plain(lhs)
            _check_plain(rhs)
            return
        case AddrOf(y):
            raise ValidationError(f"&{y} may only appear as `x := &{y}`")
        case Deref(y):
            raise ValidationError(f"*{y} may only appear as `x := *{y}`")
    raise ValidationError(f"not an arithmetic expression: {e!r}")


def _check_guard(b: BExpr) -> None:
    match b:
        case BTrue() | BFalse():
            return
        case Not(arg):
            _check_guard(arg)
        case Eq(lhs, rhs) | Leq(lhs, rhs):
            _check_plain(lhs)
            _check_plain(rhs)
        case And(lhs, rhs) | Or(lhs, rhs):
            _check_guard(lhs)
            _check_guard(rhs)
        case _:
            raise ValidationError(f"not a boolean expression: {b!r}")


def validate(s: Stmt) -> None:
    """Raise ``ValidationError`` unless ``s`` respects the grammar of the language.

    ``&y`` and ``*y`` are only expressible through ``AddrAssign`` and
    ``LoadAssign``; ``AddrOf``/``Deref`` nodes inside any other expression are
    rejected.
    """
    match s:
        case Assign(_, e) | StoreAssign(_, e):
            _check_plain(e)
        case AddrAssign() | LoadAssign() | Skip():
            pass
        case Seq(a, b):
            validate(a)
            validate(b)
        case If(c, t, f):
            _check_guard(c)
            validate(t)
            validate(f)
        case While(c, body):
            _check_guard(c)
            validate(body)
        case Par(threads):
            for t in threads:
                validate(t)
        case ParIf(branches):
            for b, t in branches:
                _check_guard(b)
                validate(t)
        case ParFor(body):
            validate(body)
        case _:
            raise ValidationError(f"not a statement: {s!r}")
