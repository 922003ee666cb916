"""Concrete syntax for programs: tokenizer, recursive-descent parser, printer.

::

    fun eps_line(vx, vy, sx, sy) =
      if sx * vy - sy * vx > 0 then 1
      elsif sx * vy - sy * vx < 0 then -1
      else 0

Decimal literals are read as exact rationals and rounded to nearest-even in
the active format.  The printer emits the shortest decimal that reads back to
the same float, so ``parse_program(print_program(p)) == p``.
"""

from __future__ import annotations

import re
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import List, NamedTuple, Optional

from . import fp
from .errors import ParseError
from .fp import DOUBLE, Float, Format
from .lang import (
    FALSE, TRUE, WARNING, And, BoolConst, FloatConst, FloatOp, FloatVar, If, IfN,
    Let, Not, Or, Program, RealConst, RealOp, RealVar, Rel, Warn,
)

KEYWORDS = {
    "fun", "if", "then", "elsif", "else", "let", "in", "warning",
    "and", "or", "not", "true", "false",
}
REL_TOKENS = {"<": "lt", "<=": "le", ">": "gt", ">=": "ge", "==": "eq"}
REL_SYMBOLS = {v: k for k, v in REL_TOKENS.items()}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9']*)
  | (?P<sym><=|>=|==|[-+*/()<>=,])
    """,
    re.VERBOSE,
)


class Token(NamedTuple):
    kind: str  # "num", "ident", "kw", "sym", "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "ident":
            tokens.append(Token("kw" if m.group() in KEYWORDS else "ident", m.group(), line, col))
        elif kind != "ws":
            tokens.append(Token(kind, m.group(), line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, fmt: Format):
        self.tokens = tokenize(text)
        self.pos = 0
        self.fmt = fmt
        self.scope: List[str] = []

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        shown = tok.text or "end of input"
        raise ParseError(f"{message} (at {shown!r})", tok.line, tok.col)

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("kw", "sym") and t.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        tok = self.tok
        self.pos += 1
        return tok

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            self.error("expected an identifier")
        tok = self.tok
        self.pos += 1
        return tok

    # -- grammar
    def program(self) -> Program:
        self.expect("fun")
        name = self.ident().text
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                tok = self.ident()
                if tok.text in params:
                    self.error(f"duplicate parameter {tok.text!r}", tok)
                params.append(tok.text)
                if not self.accept(","):
                    break
        self.expect(")")
        self.expect("=")
        self.scope = list(params)
        body = self.stmt()
        if self.tok.kind != "eof":
            self.error("unexpected trailing input")
        return Program(name, tuple(params), body)

    def stmt(self):
        if self.accept("if"):
            branches = [(self.bexpr(), None)]
            self.expect("then")
            branches[0] = (branches[0][0], self.stmt())
            while self.accept("elsif"):
                g = self.bexpr()
                self.expect("then")
                branches.append((g, self.stmt()))
            self.expect("else")
            orelse = self.stmt()
            if len(branches) == 1:
                return If(branches[0][0], branches[0][1], orelse)
            return IfN(tuple(branches), orelse)
        if self.accept("let"):
            tok = self.ident()
            if tok.text in self.scope:
                self.error(f"let rebinds {tok.text!r}, which is already in scope", tok)
            self.expect("=")
            expr = self.aexpr()
            self.expect("in")
            self.scope.append(tok.text)
            try:
                body = self.stmt()
            finally:
                self.scope.pop()
            return Let(tok.text, expr, body)
        if self.accept("warning"):
            return WARNING
        return self.aexpr()

    def bexpr(self):
        parts = [self.band()]
        while self.accept("or"):
            parts.append(self.band())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def band(self):
        parts = [self.bnot()]
        while self.accept("and"):
            parts.append(self.bnot())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def bnot(self):
        if self.accept("not"):
            return Not(self.bnot())
        if self.accept("true"):
            return TRUE
        if self.accept("false"):
            return FALSE
        if self.at("("):
            # either a parenthesized Boolean or a relation starting with "("
            saved = self.pos
            try:
                return self.relation()
            except ParseError:
                self.pos = saved
            self.expect("(")
            b = self.bexpr()
            self.expect(")")
            return b
        return self.relation()

    def relation(self):
        lhs = self.aexpr()
        tok = self.tok
        if tok.kind != "sym" or tok.text not in REL_TOKENS:
            self.error("expected a relation operator")
        self.pos += 1
        rhs = self.aexpr()
        return Rel(REL_TOKENS[tok.text], lhs, rhs)

    def aexpr(self):
        e = self.term()
        while self.at("+") or self.at("-"):
            op = "add" if self.tok.text == "+" else "sub"
            self.pos += 1
            e = FloatOp(op, (e, self.term()))
        return e

    def term(self):
        e = self.unary()
        while self.accept("*"):
            e = FloatOp("mul", (e, self.unary()))
        if self.at("/"):
            self.error("division is not supported")
        return e

    def unary(self):
        if self.accept("-"):
            if self.tok.kind == "num":
                return self.number(negate=True)
            return FloatOp("neg", (self.unary(),))
        return self.primary()

    def primary(self):
        tok = self.tok
        if tok.kind == "num":
            return self.number()
        if tok.kind == "ident":
            self.pos += 1
            if tok.text not in self.scope:
                self.error(f"unbound variable {tok.text!r}", tok)
            return FloatVar(tok.text)
        if self.accept("("):
            e = self.aexpr()
            self.expect(")")
            return e
        self.error("expected an arithmetic expression")

    def number(self, negate=False):
        tok = self.tok
        self.pos += 1
        value = Fraction(tok.text)
        try:
            return FloatConst(fp.round_nearest(-value if negate else value, self.fmt))
        except ArithmeticError as exc:
            self.error(str(exc), tok)


def parse_program(text: str, fmt: Format = DOUBLE) -> Program:
    """Parse ``fun name(params) = body``."""
    return _Parser(text, fmt).program()


def parse_guard(text: str, params, fmt: Format = DOUBLE):
    """Parse a standalone float Boolean expression over ``params``."""
    p = _Parser(text, fmt)
    p.scope = list(params)
    b = p.bexpr()
    if p.tok.kind != "eof":
        p.error("unexpected trailing input")
    return b


def parse_arith(text: str, params, fmt: Format = DOUBLE):
    p = _Parser(text, fmt)
    p.scope = list(params)
    e = p.aexpr()
    if p.tok.kind != "eof":
        p.error("unexpected trailing input")
    return e


def parse_rational(text: str) -> Fraction:
    """Decimal (``-1.5e3``) or ratio (``-1/3``) literal, exactly."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(Fraction(num.strip()), Fraction(den.strip()))
    return Fraction(text)


# -- printing --------------------------------------------------------------

def format_float(f: Float, fmt: Format = DOUBLE) -> str:
    """Shortest decimal string that rounds back to ``f`` in ``fmt``."""
    value = fp.to_real(f)
    if value.denominator == 1 and abs(value.numerator) < 1 << fmt.p:
        return str(value.numerator)
    num, den = value.numerator, value.denominator
    for digits in range(1, fmt.p + 2):
        with localcontext() as ctx:
            ctx.prec = digits
            d = Decimal(num) / Decimal(den)
        if fp.round_nearest(Fraction(d), fmt) == f:
            return str(d).lower()
    raise AssertionError("unreachable: p+1 decimal digits always round-trip")


def format_rational(r: Fraction) -> str:
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


_PREC = {"add": 1, "sub": 1, "mul": 2}


def _prec(e) -> int:
    if isinstance(e, (FloatOp, RealOp)) and e.op in _PREC:
        return _PREC[e.op]
    if isinstance(e, (FloatConst, RealConst)) and _const_negative(e):
        return 3
    return 4


def _const_negative(e) -> bool:
    return (e.value.m < 0) if isinstance(e, FloatConst) else (e.value < 0)


def print_arith(e, fmt: Format = DOUBLE) -> str:
    if isinstance(e, FloatConst):
        return format_float(e.value, fmt)
    if isinstance(e, RealConst):
        # ratios are not part of the program grammar; real expressions are
        # printed for reports only
        return format_rational(e.value)
    if isinstance(e, (FloatVar, RealVar)):
        return e.name
    if e.op == "neg":
        (arg,) = e.args
        inner = print_arith(arg, fmt)
        return "-" + (inner if isinstance(arg, (FloatVar, RealVar)) else f"({inner})")
    lhs, rhs = e.args
    p = _PREC[e.op]
    left = print_arith(lhs, fmt)
    right = print_arith(rhs, fmt)
    if _prec(lhs) < p:
        left = f"({left})"
    if _prec(rhs) <= p:
        right = f"({right})"
    sym = {"add": "+", "sub": "-", "mul": "*"}[e.op]
    return f"{left} {sym} {right}"


def print_bool(b, fmt: Format = DOUBLE) -> str:
    if isinstance(b, BoolConst):
        return "true" if b.value else "false"
    if isinstance(b, Rel):
        return f"{print_arith(b.lhs, fmt)} {REL_SYMBOLS[b.rel]} {print_arith(b.rhs, fmt)}"
    if isinstance(b, Not):
        inner = print_bool(b.arg, fmt)
        return "not " + (f"({inner})" if isinstance(b.arg, (And, Or)) else inner)
    if isinstance(b, And):
        return " and ".join(
            f"({print_bool(a, fmt)})" if isinstance(a, (And, Or)) else print_bool(a, fmt)
            for a in b.args
        )
    if isinstance(b, Or):
        return " or ".join(
            f"({print_bool(a, fmt)})" if isinstance(a, Or) else print_bool(a, fmt)
            for a in b.args
        )
    raise TypeError(f"not a Boolean expression: {b!r}")


def _print_stmt(s, fmt: Format, indent: int) -> str:
    pad = "  " * indent
    if isinstance(s, Warn):
        return "warning"
    if isinstance(s, If):
        return (
            f"if {print_bool(s.guard, fmt)} then {_print_stmt(s.then, fmt, indent + 1)}\n"
            f"{pad}else {_print_stmt(s.orelse, fmt, indent + 1)}"
        )
    if isinstance(s, IfN):
        lines = []
        for i, (g, body) in enumerate(s.branches):
            kw = "if" if i == 0 else f"{pad}elsif"
            lines.append(f"{kw} {print_bool(g, fmt)} then {_print_stmt(body, fmt, indent + 1)}")
        lines.append(f"{pad}else {_print_stmt(s.orelse, fmt, indent + 1)}")
        return "\n".join(lines)
    if isinstance(s, Let):
        return (
            f"let {s.name} = {print_arith(s.expr, fmt)} in\n"
            f"{pad}{_print_stmt(s.body, fmt, indent)}"
        )
    return print_arith(s, fmt)


def print_stmt(s, fmt: Format = DOUBLE) -> str:
    return _print_stmt(s, fmt, 1)


def print_program(p: Program, fmt: Format = DOUBLE) -> str:
    return f"fun {p.name}({', '.join(p.params)}) =\n  {_print_stmt(p.body, fmt, 1)}\n"


# -- JSON AST dump ------------------------------------------------------------

def to_json(node, fmt: Format = DOUBLE):
    """One JSON object per node: a ``kind`` field plus its children."""
    if isinstance(node, Program):
        return {"kind": "program", "name": node.name, "params": list(node.params),
                "body": to_json(node.body, fmt)}
    if isinstance(node, FloatConst):
        return {"kind": "float_const", "m": node.value.m, "e": node.value.e,
                "text": format_float(node.value, fmt)}
    if isinstance(node, RealConst):
        return {"kind": "real_const", "value": format_rational(node.value)}
    if isinstance(node, FloatVar):
        return {"kind": "float_var", "name": node.name}
    if isinstance(node, RealVar):
        return {"kind": "real_var", "name": node.name}
    if isinstance(node, (FloatOp, RealOp)):
        kind = "float_op" if isinstance(node, FloatOp) else "real_op"
        return {"kind": kind, "op": node.op, "args": [to_json(a, fmt) for a in node.args]}
    if isinstance(node, BoolConst):
        return {"kind": "true" if node.value else "false"}
    if isinstance(node, (And, Or)):
        return {"kind": "and" if isinstance(node, And) else "or",
                "args": [to_json(a, fmt) for a in node.args]}
    if isinstance(node, Not):
        return {"kind": "not", "arg": to_json(node.arg, fmt)}
    if isinstance(node, Rel):
        return {"kind": "rel", "rel": node.rel,
                "lhs": to_json(node.lhs, fmt), "rhs": to_json(node.rhs, fmt)}
    if isinstance(node, If):
        return {"kind": "if", "guard": to_json(node.guard, fmt),
                "then": to_json(node.then, fmt), "else": to_json(node.orelse, fmt)}
    if isinstance(node, IfN):
        return {"kind": "ifn",
                "branches": [{"guard": to_json(g, fmt), "body": to_json(s, fmt)}
                             for g, s in node.branches],
                "else": to_json(node.orelse, fmt)}
    if isinstance(node, Let):
        return {"kind": "let", "name": node.name, "expr": to_json(node.expr, fmt),
                "body": to_json(node.body, fmt)}
    if isinstance(node, Warn):
        return {"kind": "warning"}
    raise TypeError(f"cannot serialize {node!r}")


def from_json(obj):
    kind = obj["kind"]
    if kind == "program":
        return Program(obj["name"], tuple(obj["params"]), from_json(obj["body"]))
    if kind == "float_const":
        return FloatConst(Float(obj["m"], obj["e"]))
    if kind == "real_const":
        return RealConst(parse_rational(obj["value"]))
    if kind == "float_var":
        return FloatVar(obj["name"])
    if kind == "real_var":
        return RealVar(obj["name"])
    if kind in ("float_op", "real_op"):
        cls = FloatOp if kind == "float_op" else RealOp
        return cls(obj["op"], tuple(from_json(a) for a in obj["args"]))
    if kind in ("true", "false"):
        return TRUE if kind == "true" else FALSE
    if kind in ("and", "or"):
        cls = And if kind == "and" else Or
        return cls(tuple(from_json(a) for a in obj["args"]))
    if kind == "not":
        return Not(from_json(obj["arg"]))
    if kind == "rel":
        return Rel(obj["rel"], from_json(obj["lhs"]), from_json(obj["rhs"]))
    if kind == "if":
        return If(from_json(obj["guard"]), from_json(obj["then"]), from_json(obj["else"]))
    if kind == "ifn":
        return IfN(tuple((from_json(b["guard"]), from_json(b["body"])) for b in obj["branches"]),
                   from_json(obj["else"]))
    if kind == "let":
        return Let(obj["name"], from_json(obj["expr"]), from_json(obj["body"]))
    if kind == "warning":
        return WARNING
    raise ValueError(f"unknown node kind {kind!r}")
