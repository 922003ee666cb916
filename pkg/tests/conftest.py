"""Shared oracles for the test suite.

The oracles deliberately avoid the package's own float model: native
Python floats (IEEE binary64, round-to-nearest-even) stand in for the float
semantics, and integer arithmetic on dyadic numbers gives exact real values.
"""

from __future__ import annotations

import struct
from fractions import Fraction

import pytest

from fpguard import corpus
from fpguard.lang import FloatConst, FloatVar
from fpguard import fp


def to_single(x: float) -> float:
    """Round a binary64 value to binary32 (hardware conversion)."""
    return struct.unpack("<f", struct.pack("<f", x))[0]


def native_float_fn(expr, params):
    """Compile a float expression into a Python function over native floats."""
    src = _source(expr)
    return eval(f"lambda {', '.join(params)}: {src}")  # noqa: S307 - test-only codegen


def _source(e) -> str:
    if isinstance(e, FloatVar):
        return e.name
    if isinstance(e, FloatConst):
        return repr(fp.to_float(e.value))
    a = [_source(x) for x in e.args]
    if e.op == "neg":
        return f"(-{a[0]})"
    sym = {"add": "+", "sub": "-", "mul": "*"}[e.op]
    return f"({a[0]} {sym} {a[1]})"


class Dyadic:
    """Exact ``m * 2**e`` with plain integers; enough for + - * on floats."""

    __slots__ = ("m", "e")

    def __init__(self, m: int, e: int):
        self.m, self.e = m, e

    @classmethod
    def of(cls, x: float) -> "Dyadic":
        n, d = x.as_integer_ratio()
        return cls(n, -(d.bit_length() - 1))

    def __add__(self, o):
        if self.e <= o.e:
            return Dyadic(self.m + (o.m << (o.e - self.e)), self.e)
        return Dyadic((self.m << (self.e - o.e)) + o.m, o.e)

    def __neg__(self):
        return Dyadic(-self.m, self.e)

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        return Dyadic(self.m * o.m, self.e + o.e)

    def sign(self) -> int:
        return (self.m > 0) - (self.m < 0)

    def __abs__(self):
        return Dyadic(abs(self.m), self.e)

    def __le__(self, o):
        return (o - self).m >= 0

    def __float__(self):
        return float(self.fraction())

    def fraction(self) -> Fraction:
        return Fraction(self.m) * Fraction(2) ** self.e


def exact_fn(expr, params):
    """Same expression over :class:`Dyadic` values (exact reals)."""
    src = _source_exact(expr)
    return eval(f"lambda {', '.join(params)}: {src}", {"D": Dyadic})  # noqa: S307


def _source_exact(e) -> str:
    if isinstance(e, FloatVar):
        return e.name
    if isinstance(e, FloatConst):
        return f"D.of({fp.to_float(e.value)!r})"
    a = [_source_exact(x) for x in e.args]
    if e.op == "neg":
        return f"(-{a[0]})"
    sym = {"add": "+", "sub": "-", "mul": "*"}[e.op]
    return f"({a[0]} {sym} {a[1]})"


_REL_SYM = {"lt": "<", "le": "<=", "gt": ">", "ge": ">=", "eq": "=="}


def _bool_source(b, arith) -> str:
    from fpguard.lang import And, BoolConst, Not, Or, Rel

    if isinstance(b, Rel):
        return f"({arith(b.lhs)} - {arith(b.rhs)}).sign() {_REL_SYM[b.rel]} 0" \
            if arith is _source_exact else f"({arith(b.lhs)} {_REL_SYM[b.rel]} {arith(b.rhs)})"
    if isinstance(b, And):
        return "(" + " and ".join(_bool_source(a, arith) for a in b.args) + ")"
    if isinstance(b, Or):
        return "(" + " or ".join(_bool_source(a, arith) for a in b.args) + ")"
    if isinstance(b, Not):
        return f"(not {_bool_source(b.arg, arith)})"
    if isinstance(b, BoolConst):
        return repr(b.value)
    raise TypeError(b)


def native_bool_fn(b, names):
    """Float guard over native floats."""
    return eval(f"lambda {', '.join(names)}: {_bool_source(b, _source)}")  # noqa: S307


def exact_bool_fn(b, names):
    """Real counterpart of a float guard over :class:`Dyadic` values."""
    return eval(f"lambda {', '.join(names)}: {_bool_source(b, _source_exact)}",  # noqa: S307
                {"D": Dyadic})


def abs_diff(f: float, exact: Dyadic) -> Fraction:
    d = Dyadic.of(f) - exact
    return abs(d.fraction())


@pytest.fixture(scope="session")
def eps_line():
    return corpus.load_program("eps_line")


@pytest.fixture(scope="session")
def eps_line_ranges():
    return corpus.load_ranges("eps_line")


@pytest.fixture(scope="session")
def winding():
    return corpus.load_program("winding_number_edge")


@pytest.fixture(scope="session")
def winding_ranges():
    return corpus.load_ranges("winding_number_edge")
