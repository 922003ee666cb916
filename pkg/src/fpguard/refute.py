"""Conservative unsatisfiability checks for path conditions.

``is_possibly_sat`` answers False only with a proof: conditions are put in
negation normal form and a small case-splitting search tries every way of
making the disjunctions true, keeping one interval of admissible values per
arithmetic atom.  A branch dies when some atom's interval becomes empty.
Input ranges, when given, seed the atom intervals.  Running out of search
budget answers True.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

from . import fp
from .analysis import Interval, LetEnv, analyze, analyze_real_range
from .errors import MissingRange
from .fp import DOUBLE, Format
from .lang import (
    FALSE, FLIPPED, NEGATED, TRUE, And, BoolConst, FloatConst, Not, Or,
    RealConst, Rel, conj, is_float_arith,
)

DEFAULT_BUDGET = 20_000


def nnf(b, negate: bool = False):
    """Push negations down to relations (``eq`` under negation stays wrapped)."""
    if isinstance(b, BoolConst):
        return BoolConst(b.value != negate)
    if isinstance(b, Not):
        return nnf(b.arg, not negate)
    if isinstance(b, And):
        parts = [nnf(a, negate) for a in b.args]
        return Or(tuple(parts)) if negate else And(tuple(parts))
    if isinstance(b, Or):
        parts = [nnf(a, negate) for a in b.args]
        return And(tuple(parts)) if negate else Or(tuple(parts))
    if isinstance(b, Rel):
        if not negate:
            return b
        if b.rel == "eq":
            return Not(b)
        return Rel(NEGATED[b.rel], b.lhs, b.rhs)
    raise TypeError(f"not a Boolean expression: {b!r}")


def _const_value(e) -> Optional[Fraction]:
    if isinstance(e, FloatConst):
        return fp.to_real(e.value)
    if isinstance(e, RealConst):
        return e.value
    return None


def _as_bound(rel: Rel):
    """``(key, relation, constant)`` with the constant on the right."""
    c = _const_value(rel.rhs)
    if c is not None:
        return rel.lhs, rel.rel, c
    c = _const_value(rel.lhs)
    if c is not None:
        return rel.rhs, FLIPPED[rel.rel], c
    # compare the difference against zero: exact in both flavors
    return (rel.lhs, rel.rhs), rel.rel, Fraction(0)


# bounds are (lo, lo_strict, hi, hi_strict); None means unbounded
_Box = Tuple[Optional[Fraction], bool, Optional[Fraction], bool]
_FREE: _Box = (None, False, None, False)


def _tighten(box: _Box, rel: str, c: Fraction) -> _Box:
    lo, los, hi, his = box
    if rel in ("gt", "ge", "eq"):
        strict = rel == "gt"
        if lo is None or c > lo or (c == lo and strict):
            lo, los = c, strict
    if rel in ("lt", "le", "eq"):
        strict = rel == "lt"
        if hi is None or c < hi or (c == hi and strict):
            hi, his = c, strict
    return lo, los, hi, his


def _empty(box: _Box) -> bool:
    lo, los, hi, his = box
    if lo is None or hi is None:
        return False
    return lo > hi or (lo == hi and (los or his))


class _OutOfBudget(Exception):
    pass


class _Search:
    def __init__(self, ranges, lets, fmt, chi_inverse, budget):
        self.ranges = ranges
        self.lets = lets
        self.fmt = fmt
        self.chi_inverse = chi_inverse
        self.budget = budget
        self._range_cache: Dict[object, Optional[Interval]] = {}

    def _expr_range(self, e) -> Optional[Interval]:
        if is_float_arith(e):
            return analyze(e, self.ranges, self.fmt, self.lets).range
        return analyze_real_range(e, self.ranges, self.lets, self.chi_inverse)

    def seed(self, key) -> _Box:
        if self.ranges is None:
            return _FREE
        if key not in self._range_cache:
            try:
                if isinstance(key, tuple):
                    iv = self._expr_range(key[0]) - self._expr_range(key[1])
                else:
                    iv = self._expr_range(key)
            except (MissingRange, ArithmeticError):
                iv = None
            self._range_cache[key] = iv
        iv = self._range_cache[key]
        return _FREE if iv is None else (iv.lo, False, iv.hi, False)

    def sat(self, boxes: Dict[object, _Box], pending: List) -> bool:
        self.budget -= 1
        if self.budget < 0:
            raise _OutOfBudget
        boxes = dict(boxes)
        ors = []
        stack = list(pending)
        while stack:
            b = stack.pop()
            if isinstance(b, BoolConst):
                if not b.value:
                    return False
            elif isinstance(b, And):
                stack.extend(b.args)
            elif isinstance(b, Or):
                ors.append(b)
            elif isinstance(b, Rel):
                key, rel, c = _as_bound(b)
                box = boxes.get(key)
                if box is None:
                    box = self.seed(key)
                box = _tighten(box, rel, c)
                if _empty(box):
                    return False
                boxes[key] = box
            # negated equalities carry no interval information
        if not ors:
            return True
        first, rest = ors[0], ors[1:]
        return any(self.sat(boxes, [d] + rest) for d in first.args)


def is_possibly_sat(real_cond=TRUE, float_cond=TRUE, ranges: Optional[Mapping[str, Interval]] = None,
                    *, lets: Optional[LetEnv] = None, fmt: Format = DOUBLE,
                    chi_inverse: Optional[Mapping[str, str]] = None,
                    budget: int = DEFAULT_BUDGET) -> bool:
    """False only if ``real_cond and float_cond`` is provably unsatisfiable."""
    formula = nnf(conj(real_cond, float_cond))
    if formula == FALSE:
        return False
    if formula == TRUE:
        return True
    if _syntactic_contradiction(real_cond) or _syntactic_contradiction(float_cond):
        return False
    search = _Search(ranges, lets, fmt, chi_inverse, budget)
    try:
        return search.sat({}, [formula])
    except _OutOfBudget:
        return True


def _syntactic_contradiction(b) -> bool:
    """Some conjunct appears both plainly and negated."""
    parts = b.args if isinstance(b, And) else (b,)
    seen = set(parts)
    return any(isinstance(p, Not) and p.arg in seen for p in parts)
