"""Expression AST, recursive-descent parser and printer.

Grammar (lowest precedence first):

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | power
    power := atom ('^' unary)?          right-associative
    atom  := NUMBER | VAR | FUNC '(' expr ')' | '(' expr ')'

VAR is x<k>, t<k> (k >= 1) or the constant pi.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt", "tanh")


class ParseError(ValueError):
    def __init__(self, msg: str, offset: int, text: str = ""):
        super().__init__(f"{msg} at offset {offset}")
        self.msg = msg
        self.offset = offset
        self.text = text


class Expr:
    __slots__ = ()

    def variables(self) -> frozenset[str]:
        return frozenset()

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    name: str

    def variables(self):
        return frozenset() if self.name == "pi" else frozenset((self.name,))


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr

    def variables(self):
        return self.arg.variables()


@dataclass(frozen=True)
class Bin(Expr):
    op: str
    left: Expr
    right: Expr

    def variables(self):
        return self.left.variables() | self.right.variables()


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    arg: Expr

    def variables(self):
        return self.arg.variables()


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)
_VAR = re.compile(r"^(?:[xt][1-9]\d*|pi)$")


def _tokens(text: str):
    """(kind, value, byte_offset) triples, ending with ('end', '', len)."""
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        off = len(text[:pos].encode("utf-8"))
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", off, text)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), off))
        pos = m.end()
    out.append(("end", "", len(text.encode("utf-8"))))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokens(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def take(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        found = "end of input" if tok[0] == "end" else repr(tok[1])
        raise ParseError(f"{msg}, found {found}", tok[2], self.text)

    def expect(self, value):
        if self.peek()[1] != value or self.peek()[0] != "op":
            self.fail(f"expected {value!r}")
        self.take()

    def expr(self):
        e = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            e = Bin(op, e, self.term())
        return e

    def term(self):
        e = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            e = Bin(op, e, self.unary())
        return e

    def unary(self):
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return Bin("^", base, self.unary())
        return base

    def atom(self):
        kind, val, off = self.peek()
        if kind == "num":
            self.take()
            return Num(float(val))
        if kind == "name":
            self.take()
            if val in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            if not _VAR.match(val):
                raise ParseError(f"unknown name {val!r}", off, self.text)
            return Var(val)
        if kind == "op" and val == "(":
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        self.fail("expected a number, variable, function or '('")


def parse(text: str, allowed: frozenset[str] | set[str] | None = None) -> Expr:
    """Parse text; with `allowed`, reject variables outside that set."""
    p = _Parser(text)
    e = p.expr()
    if p.peek()[0] != "end":
        p.fail("unexpected trailing input")
    if allowed is not None:
        extra = sorted(e.variables() - set(allowed))
        if extra:
            off = len(text[:text.find(extra[0])].encode("utf-8"))
            raise ParseError(f"variable {extra[0]!r} is not bound here", off, text)
    return e


# ---------------------------------------------------------------- printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def _prec(e: Expr) -> int:
    if isinstance(e, Bin):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 3
    return 5


def _wrap(e: Expr, need: int) -> str:
    s = to_text(e)
    return s if _prec(e) >= need else f"({s})"


def to_text(e: Expr) -> str:
    """Minimal-parenthesis rendering; parse(to_text(e)) == e."""
    if isinstance(e, Num):
        v = float(e.value)
        if v < 0:
            return f"({v!r})"
        return str(int(v)) if v.is_integer() and v < 1e15 else repr(v)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, 3)
    if isinstance(e, Call):
        return f"{e.fn}({to_text(e.arg)})"
    if isinstance(e, Bin):
        p = _PREC[e.op]
        if e.op == "^":
            return f"{_wrap(e.left, 5)}^{_wrap(e.right, 3)}"
        sep = f" {e.op} " if p == 1 else e.op
        return f"{_wrap(e.left, p)}{sep}{_wrap(e.right, p + 1)}"
    raise TypeError(f"not an expression: {e!r}")


def substitute(e: Expr, mapping: dict[str, Expr]) -> Expr:
    """Replace variables by expressions."""
    if isinstance(e, Var):
        return mapping.get(e.name, e)
    if isinstance(e, Num):
        return e
    if isinstance(e, Neg):
        return Neg(substitute(e.arg, mapping))
    if isinstance(e, Call):
        return Call(e.fn, substitute(e.arg, mapping))
    return Bin(e.op, substitute(e.left, mapping), substitute(e.right, mapping))
