"""Concrete syntax: tokenizer, recursive-descent parser and canonical printer.

Grammar (``;`` is right-associative, ``{ S }`` groups)::

    stmts  ::= stmt (";" stmt)*
    stmt   ::= "skip" | x ":=" e | x ":=" "&" y | "*" x ":=" e | x ":=" "*" y
             | "if" b "then" "{" stmts "}" "else" "{" stmts "}"
             | "while" b "do" "{" stmts "}"
             | "par" "{" "{" stmts "}" ("," "{" stmts "}")* "}"
             | "par-if" "{" "(" b "," stmts ")" ("," "(" b "," stmts ")")* "}"
             | "par-for" "{" stmts "}"
             | "{" stmts "}"
    e      ::= term (("+" | "-") term)*
    term   ::= factor ("*" factor)*
    factor ::= n | "-" n | x | "(" e ")"
    b      ::= conj ("or" conj)*
    conj   ::= neg ("and" neg)*
    neg    ::= "not" neg | "true" | "false" | e ("=" | "<=") e | "(" b ")"

Unicode spellings ``×``, ``≤``, ``¬``, ``∧``, ``∨`` and ``⩴`` are accepted.
Commas between ``par`` threads are optional. ``#`` starts a line comment.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    AddrAssign,
    AddrOf,
    And,
    Assign,
    BExpr,
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
    validate,
)

KEYWORDS = frozenset(
    "skip if then else while do par par-if par-for true false not and or".split()
)

_ALIASES = {"×": "*", "≤": "<=", "¬": "not", "∧": "and", "∨": "or", "⩴": ":="}
_SYMBOLS = (":=", "<=", ";", "{", "}", "(", ")", ",", "&", "*", "+", "-", "=")


class ParseError(Exception):
    """Base class of located front-end errors."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class ProgramSyntaxError(ParseError):
    def __init__(self, line: int, column: int, expected: tuple[str, ...], found: str):
        exp = " or ".join(expected)
        super().__init__(f"expected {exp}, found {found}", line, column)
        self.expected = expected
        self.found = found


class GrammarRestrictionError(ParseError):
    """``&y`` or ``*y`` nested inside an arithmetic expression."""


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # "id", "int", "kw", "sym", "eof"
    text: str
    line: int
    column: int

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if c.isspace():
            i, col = i + 1, col + 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if c in _ALIASES:
            alias = _ALIASES[c]
            kind = "kw" if alias in KEYWORDS else "sym"
            tokens.append(Token(kind, alias, line, start_col))
            i, col = i + 1, col + 1
            continue
        if c.isascii() and (c.isalpha() or c == "_"):
            j = i
            while j < n and text[j].isascii() and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word == "par":
                for suffix in ("-if", "-for"):
                    k = j + len(suffix)
                    if text.startswith(suffix, j) and not (
                        k < n and text[k].isascii() and (text[k].isalnum() or text[k] == "_")
                    ):
                        word, j = word + suffix, k
                        break
            tokens.append(Token("kw" if word in KEYWORDS else "id", word, line, start_col))
            col += j - i
            i = j
            continue
        if c.isascii() and c.isdigit():
            j = i
            while j < n and text[j].isascii() and text[j].isdigit():
                j += 1
            tokens.append(Token("int", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token("sym", sym, line, start_col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ProgramSyntaxError(line, start_col, ("a token",), repr(c))
    tokens.append(Token("eof", "", line, col))
    return tokens


_ARITH_FOLLOW = frozenset(("+", "-", "*"))


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("sym", "kw") and t.text == text

    def fail(self, *expected: str) -> ProgramSyntaxError:
        t = self.tok
        return ProgramSyntaxError(t.line, t.column, expected, t.describe())

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.fail(repr(text))
        t = self.tok
        self.pos += 1
        return t

    def ident(self) -> str:
        t = self.tok
        if t.kind != "id":
            raise self.fail("a variable")
        self.pos += 1
        return t.text

    # statements

    def stmts(self) -> Stmt:
        items = [self.stmt()]
        while self.at(";"):
            self.pos += 1
            items.append(self.stmt())
        result = items[-1]
        for s in reversed(items[:-1]):
            result = Seq(s, result)
        return result

    def block(self) -> Stmt:
        self.expect("{")
        body = self.stmts()
        self.expect("}")
        return body

    def stmt(self) -> Stmt:
        t = self.tok
        if self.at("skip"):
            self.pos += 1
            return Skip()
        if self.at("if"):
            self.pos += 1
            cond = self.bexpr()
            self.expect("then")
            then = self.block()
            self.expect("else")
            return If(cond, then, self.block())
        if self.at("while"):
            self.pos += 1
            cond = self.bexpr()
            self.expect("do")
            return While(cond, self.block())
        if self.at("par"):
            self.pos += 1
            self.expect("{")
            threads = [self.block()]
            while not self.at("}"):
                if self.at(","):
                    self.pos += 1
                if not self.at("{"):
                    raise self.fail("'{'", "'}'")
                threads.append(self.block())
            self.pos += 1
            return Par(tuple(threads))
        if self.at("par-if"):
            self.pos += 1
            self.expect("{")
            branches = [self.parif_branch()]
            while self.at(","):
                self.pos += 1
                branches.append(self.parif_branch())
            self.expect("}")
            return ParIf(tuple(branches))
        if self.at("par-for"):
            self.pos += 1
            return ParFor(self.block())
        if self.at("{"):
            return self.block()
        if self.at("*"):
            self.pos += 1
            x = self.ident()
            self.expect(":=")
            return StoreAssign(x, self.aexpr())
        if t.kind == "id":
            x = self.ident()
            self.expect(":=")
            if self.at("&") or self.at("*"):
                op = self.tok.text
                self.pos += 1
                y = self.ident()
                if self.tok.kind == "sym" and self.tok.text in _ARITH_FOLLOW:
                    raise GrammarRestrictionError(
                        f"{op}{y} cannot be an operand of {self.tok.text!r}",
                        self.tok.line,
                        self.tok.column,
                    )
                return AddrAssign(x, y) if op == "&" else LoadAssign(x, y)
            return Assign(x, self.aexpr())
        raise self.fail("a statement")

    def parif_branch(self) -> tuple[BExpr, Stmt]:
        self.expect("(")
        cond = self.bexpr()
        self.expect(",")
        body = self.stmts()
        self.expect(")")
        return cond, body

    # arithmetic

    def aexpr(self):
        e = self.term()
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.pos += 1
            e = BinOp(op, e, self.term())
        return e

    def term(self):
        e = self.factor()
        while self.at("*"):
            self.pos += 1
            e = BinOp("*", e, self.factor())
        return e

    def factor(self):
        t = self.tok
        if t.kind == "int":
            self.pos += 1
            return Num(int(t.text))
        if self.at("-"):
            self.pos += 1
            if self.tok.kind != "int":
                raise self.fail("an integer literal")
            value = -int(self.tok.text)
            self.pos += 1
            return Num(value)
        if t.kind == "id":
            self.pos += 1
            return Ref(t.text)
        if self.at("("):
            self.pos += 1
            e = self.aexpr()
            self.expect(")")
            return e
        if self.at("&") or self.at("*"):
            raise GrammarRestrictionError(
                f"{t.text}y may only appear as the whole right-hand side of an assignment",
                t.line,
                t.column,
            )
        raise self.fail("an arithmetic expression")

    # boolean

    def bexpr(self) -> BExpr:
        b = self.conj()
        while self.at("or"):
            self.pos += 1
            b = Or(b, self.conj())
        return b

    def conj(self) -> BExpr:
        b = self.neg()
        while self.at("and"):
            self.pos += 1
            b = And(b, self.neg())
        return b

    def neg(self) -> BExpr:
        if self.at("not"):
            self.pos += 1
            return Not(self.neg())
        if self.at("true"):
            self.pos += 1
            return BTrue()
        if self.at("false"):
            self.pos += 1
            return BFalse()
        if self.at("("):
            # `(` opens either a parenthesised guard or an arithmetic operand
            start = self.pos
            try:
                return self.comparison()
            except ParseError as first:
                arith_pos = self.pos
                self.pos = start
                try:
                    self.pos += 1
                    b = self.bexpr()
                    self.expect(")")
                    return b
                except ParseError as second:
                    if self.pos > arith_pos:
                        raise second from None
                    raise first from None
        return self.comparison()

    def comparison(self) -> BExpr:
        lhs = self.aexpr()
        if self.at("="):
            self.pos += 1
            return Eq(lhs, self.aexpr())
        if self.at("<="):
            self.pos += 1
            return Leq(lhs, self.aexpr())
        raise self.fail("'='", "'<='")


def parse(text: str) -> Stmt:
    """Parse program text; raise a ``ParseError`` subclass on bad input."""
    tokens = tokenize(text)
    p = _Parser(tokens)
    try:
        s = p.stmts()
    except RecursionError:
        t = p.tok
        raise ParseError("program nested too deeply", t.line, t.column) from None
    if p.tok.kind != "eof":
        raise p.fail("';'", "end of input")
    return s


# -- printing -------------------------------------------------------------------

_ADD, _MUL = 1, 2


def _aexpr(e, ctx: int = 0) -> str:
    match e:
        case Num(v):
            return str(v)
        case Ref(x):
            return x
        case AddrOf(y):
            return f"&{y}"
        case Deref(y):
            return f"*{y}"
        case BinOp(op, lhs, rhs):
            prec = _MUL if op == "*" else _ADD
            text = f"{_aexpr(lhs, prec)} {op} {_aexpr(rhs, prec + 1)}"
            return f"({text})" if prec < ctx else text
    raise TypeError(f"not an arithmetic expression: {e!r}")


_OR, _AND, _NOT = 1, 2, 3


def _bexpr(b, ctx: int = 0) -> str:
    match b:
        case BTrue():
            return "true"
        case BFalse():
            return "false"
        case Eq(lhs, rhs):
            return f"{_aexpr(lhs)} = {_aexpr(rhs)}"
        case Leq(lhs, rhs):
            return f"{_aexpr(lhs)} <= {_aexpr(rhs)}"
        case Not(arg):
            return f"not {_bexpr(arg, _NOT)}"
        case And(lhs, rhs) | Or(lhs, rhs):
            prec, word = (_AND, "and") if isinstance(b, And) else (_OR, "or")
            text = f"{_bexpr(lhs, prec)} {word} {_bexpr(rhs, prec + 1)}"
            return f"({text})" if prec < ctx else text
    raise TypeError(f"not a boolean expression: {b!r}")


def pretty_aexpr(e) -> str:
    return _aexpr(e)


def pretty_bexpr(b) -> str:
    return _bexpr(b)


def _atomic(s: Stmt) -> str | None:
    match s:
        case Skip():
            return "skip"
        case Assign(x, e):
            return f"{x} := {_aexpr(e)}"
        case AddrAssign(x, y):
            return f"{x} := &{y}"
        case StoreAssign(x, e):
            return f"*{x} := {_aexpr(e)}"
        case LoadAssign(x, y):
            return f"{x} := *{y}"
    return None


def _lines(s: Stmt) -> list[str]:
    """Multi-line rendering; continuation lines are indented two spaces."""
    atom = _atomic(s)
    if atom is not None:
        return [atom]
    ind = "  "
    match s:
        case Seq():
            items = []
            while isinstance(s, Seq):
                items.append(s.first)
                s = s.second
            items.append(s)
            out: list[str] = []
            for k, item in enumerate(items):
                body = _lines(item)
                if isinstance(item, Seq):
                    body = ["{"] + [ind + ln for ln in body] + ["}"]
                if k < len(items) - 1:
                    body[-1] += ";"
                out.extend(body)
            return out
        case If(c, t, f):
            return (
                [f"if {_bexpr(c)} then {{"]
                + [ind + ln for ln in _lines(t)]
                + ["} else {"]
                + [ind + ln for ln in _lines(f)]
                + ["}"]
            )
        case While(c, body):
            return [f"while {_bexpr(c)} do {{"] + [ind + ln for ln in _lines(body)] + ["}"]
        case Par(threads):
            out = ["par {"]
            for k, t in enumerate(threads):
                block = [ind + "{"] + [ind * 2 + ln for ln in _lines(t)] + [ind + "}"]
                if k < len(threads) - 1:
                    block[-1] += ","
                out.extend(block)
            return out + ["}"]
        case ParIf(branches):
            out = ["par-if {"]
            for k, (b, t) in enumerate(branches):
                block = [f"{ind}({_bexpr(b)}, {{"] + [ind * 2 + ln for ln in _lines(t)]
                block.append(ind + "})" + ("," if k < len(branches) - 1 else ""))
                out.extend(block)
            return out + ["}"]
        case ParFor(body):
            return ["par-for {"] + [ind + ln for ln in _lines(body)] + ["}"]
    raise TypeError(f"not a statement: {s!r}")


def _compact(s: Stmt) -> str:
    atom = _atomic(s)
    if atom is not None:
        return atom
    match s:
        case Seq(a, b):
            first = _compact(a)
            if isinstance(a, Seq):
                first = f"{{ {first} }}"
            return f"{first}; {_compact(b)}"
        case If(c, t, f):
            return f"if {_bexpr(c)} then {{ {_compact(t)} }} else {{ {_compact(f)} }}"
        case While(c, body):
            return f"while {_bexpr(c)} do {{ {_compact(body)} }}"
        case Par(threads):
            return "par { " + ", ".join(f"{{ {_compact(t)} }}" for t in threads) + " }"
        case ParIf(branches):
            inner = ", ".join(f"({_bexpr(b)}, {{ {_compact(t)} }})" for b, t in branches)
            return f"par-if {{ {inner} }}"
        case ParFor(body):
            return f"par-for {{ {_compact(body)} }}"
    raise TypeError(f"not a statement: {s!r}")


def pretty(s: Stmt, compact: bool = False) -> str:
    """Canonical program text; ``parse(pretty(s)) == s`` for valid trees."""
    validate(s)
    if compact:
        return _compact(s)
    return "\n".join(_lines(s)) + "\n"
