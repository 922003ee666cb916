"""Abstract syntax: arithmetic, Boolean and program expressions.

Arithmetic comes in two flavors.  ``FloatConst``/``FloatVar``/``FloatOp``
describe what the program computes; ``RealConst``/``RealVar``/``RealOp``
describe its ideal counterpart over exact rationals.  Boolean expressions
share one set of node classes, and a relation's flavor is that of its
operands.  Programs are written only over the float flavor.

Every node is an immutable, hashable dataclass, so structural equality is
plain ``==``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Tuple, Union

from .fp import Float, to_real

ARITH_OPS = {"add": 2, "sub": 2, "mul": 2, "neg": 1}
RELATIONS = ("lt", "le", "gt", "ge", "eq")

# relation obtained by swapping operands: a < b  <=>  b > a
FLIPPED = {"lt": "gt", "le": "ge", "gt": "lt", "ge": "le", "eq": "eq"}
# relation of the negation, for the order relations only
NEGATED = {"lt": "ge", "le": "gt", "gt": "le", "ge": "lt"}


def _check_op(op, args):
    if op not in ARITH_OPS:
        raise ValueError(f"unknown arithmetic operator {op!r}")
    if len(args) != ARITH_OPS[op]:
        raise ValueError(f"{op} takes {ARITH_OPS[op]} operand(s), got {len(args)}")


# -- float flavor ---------------------------------------------------------

@dataclass(frozen=True)
class FloatConst:
    value: Float

    def __post_init__(self):
        object.__setattr__(self, "value", Float(*self.value))


@dataclass(frozen=True)
class FloatVar:
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable names must be nonempty")


@dataclass(frozen=True)
class FloatOp:
    op: str
    args: Tuple["FloatExpr", ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        _check_op(self.op, self.args)
        if not all(isinstance(a, FLOAT_ARITH) for a in self.args):
            raise TypeError("float operation over non-float operands")


# -- real flavor ----------------------------------------------------------

@dataclass(frozen=True)
class RealConst:
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class RealVar:
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable names must be nonempty")


@dataclass(frozen=True)
class RealOp:
    op: str
    args: Tuple["RealExpr", ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        _check_op(self.op, self.args)
        if not all(isinstance(a, REAL_ARITH) for a in self.args):
            raise TypeError("real operation over non-real operands")


FLOAT_ARITH = (FloatConst, FloatVar, FloatOp)
REAL_ARITH = (RealConst, RealVar, RealOp)
FloatExpr = Union[FloatConst, FloatVar, FloatOp]
RealExpr = Union[RealConst, RealVar, RealOp]
ArithExpr = Union[FloatExpr, RealExpr]


def is_float_arith(e) -> bool:
    return isinstance(e, FLOAT_ARITH)


# -- Boolean expressions --------------------------------------------------

@dataclass(frozen=True)
class BoolConst:
    value: bool


TRUE = BoolConst(True)
FALSE = BoolConst(False)


@dataclass(frozen=True)
class And:
    args: Tuple["BoolExpr", ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) < 2:
            raise ValueError("a conjunction needs at least two operands")


@dataclass(frozen=True)
class Or:
    args: Tuple["BoolExpr", ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) < 2:
            raise ValueError("a disjunction needs at least two operands")


@dataclass(frozen=True)
class Not:
    arg: "BoolExpr"


@dataclass(frozen=True)
class Rel:
    rel: str
    lhs: ArithExpr
    rhs: ArithExpr

    def __post_init__(self):
        if self.rel not in RELATIONS:
            raise ValueError(f"unknown relation {self.rel!r}")
        if is_float_arith(self.lhs) != is_float_arith(self.rhs):
            raise TypeError("relation mixes real and float operands")

    @property
    def is_float(self) -> bool:
        return is_float_arith(self.lhs)


BoolExpr = Union[BoolConst, And, Or, Not, Rel]


def conj(*parts: BoolExpr) -> BoolExpr:
    """Conjunction with ``true`` operands dropped and nested ``And`` flattened."""
    flat = []
    for p in parts:
        if p == TRUE:
            continue
        if isinstance(p, And):
            flat.extend(p.args)
        else:
            flat.append(p)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def disj(*parts: BoolExpr) -> BoolExpr:
    flat = []
    for p in parts:
        if p == FALSE:
            continue
        if isinstance(p, Or):
            flat.extend(p.args)
        else:
            flat.append(p)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


# -- program expressions --------------------------------------------------

@dataclass(frozen=True)
class If:
    guard: BoolExpr
    then: "Stmt"
    orelse: "Stmt"


@dataclass(frozen=True)
class IfN:
    """``if g1 then s1 elsif g2 then s2 ... else s_n``."""

    branches: Tuple[Tuple[BoolExpr, "Stmt"], ...]
    orelse: "Stmt"

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple((g, s) for g, s in self.branches))
        if len(self.branches) < 2:
            raise ValueError("an n-ary conditional needs at least two guarded branches")

    @property
    def guards(self):
        return tuple(g for g, _ in self.branches)

    @property
    def bodies(self):
        """All branch bodies, the final ``else`` body last."""
        return tuple(s for _, s in self.branches) + (self.orelse,)


@dataclass(frozen=True)
class Let:
    name: str
    expr: FloatExpr
    body: "Stmt"


@dataclass(frozen=True)
class Warn:
    pass


WARNING = Warn()

Stmt = Union[FloatConst, FloatVar, FloatOp, If, IfN, Let, Warn]


@dataclass(frozen=True)
class Program:
    name: str
    params: Tuple[str, ...]
    body: Stmt

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        if len(set(self.params)) != len(self.params):
            raise ValueError("parameters must be pairwise distinct")
        extra = free_vars(self.body) - set(self.params)
        if extra:
            raise ValueError(f"unbound variable(s): {', '.join(sorted(extra))}")


# -- conversions and traversals ------------------------------------------

def real_name(name: str) -> str:
    """Default variable map from float variables to their real counterparts."""
    return "r_" + name


VarMap = Callable[[str], str]


def real_counterpart_arith(e: FloatExpr, chi: VarMap = real_name) -> RealExpr:
    if isinstance(e, FloatConst):
        return RealConst(to_real(e.value))
    if isinstance(e, FloatVar):
        return RealVar(chi(e.name))
    if isinstance(e, FloatOp):
        return RealOp(e.op, tuple(real_counterpart_arith(a, chi) for a in e.args))
    raise TypeError(f"not a float arithmetic expression: {e!r}")


def real_counterpart_bool(b: BoolExpr, chi: VarMap = real_name) -> BoolExpr:
    if isinstance(b, BoolConst):
        return b
    if isinstance(b, Rel):
        return Rel(b.rel, real_counterpart_arith(b.lhs, chi), real_counterpart_arith(b.rhs, chi))
    if isinstance(b, Not):
        return Not(real_counterpart_bool(b.arg, chi))
    if isinstance(b, And):
        return And(tuple(real_counterpart_bool(a, chi) for a in b.args))
    if isinstance(b, Or):
        return Or(tuple(real_counterpart_bool(a, chi) for a in b.args))
    raise TypeError(f"not a Boolean expression: {b!r}")


def free_vars(e) -> frozenset:
    """Free variable names of any expression, program body or program."""
    if isinstance(e, (FloatVar, RealVar)):
        return frozenset((e.name,))
    if isinstance(e, (FloatConst, RealConst, BoolConst, Warn)):
        return frozenset()
    if isinstance(e, (FloatOp, RealOp, And, Or)):
        return frozenset().union(*(free_vars(a) for a in e.args))
    if isinstance(e, Not):
        return free_vars(e.arg)
    if isinstance(e, Rel):
        return free_vars(e.lhs) | free_vars(e.rhs)
    if isinstance(e, If):
        return free_vars(e.guard) | free_vars(e.then) | free_vars(e.orelse)
    if isinstance(e, IfN):
        out = free_vars(e.orelse)
        for g, s in e.branches:
            out |= free_vars(g) | free_vars(s)
        return out
    if isinstance(e, Let):
        return free_vars(e.expr) | (free_vars(e.body) - {e.name})
    if isinstance(e, Program):
        return free_vars(e.body) - set(e.params)
    raise TypeError(f"cannot take free variables of {e!r}")


def relations(b: BoolExpr) -> Iterator[Rel]:
    """Relation atoms of a Boolean expression, left to right."""
    if isinstance(b, Rel):
        yield b
    elif isinstance(b, Not):
        yield from relations(b.arg)
    elif isinstance(b, (And, Or)):
        for a in b.args:
            yield from relations(a)


def walk(s: Stmt) -> Iterator[Stmt]:
    """Pre-order traversal of program-expression nodes."""
    yield s
    if isinstance(s, If):
        yield from walk(s.then)
        yield from walk(s.orelse)
    elif isinstance(s, IfN):
        for body in s.bodies:
            yield from walk(body)
    elif isinstance(s, Let):
        yield from walk(s.body)


def guards(s: Stmt) -> Iterator[BoolExpr]:
    for node in walk(s):
        if isinstance(node, If):
            yield node.guard
        elif isinstance(node, IfN):
            yield from node.guards


def let_bindings(s: Stmt) -> Iterator[Tuple[str, FloatExpr]]:
    for node in walk(s):
        if isinstance(node, Let):
            yield node.name, node.expr


def contains_warning(s: Stmt) -> bool:
    return any(isinstance(node, Warn) for node in walk(s))
