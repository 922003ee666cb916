"""Guard abstractions that absorb round-off error into sign tests.

``beta_plus(phi)`` is a stricter guard whose truth implies that ``phi`` holds
in both the float and the real computation; ``beta_minus(phi)`` implies that
``phi`` fails in both.  For a sign test ``a op 0`` with
``|float(a) - real(a)| <= eps``:

=========  ===============  ===============
guard      beta_plus        beta_minus
=========  ===============  ===============
a <= 0     a <= -eps        a > eps
a >= 0     a >= eps         a < -eps
a < 0      a < -eps         a >= eps
a > 0      a > eps          a <= -eps
=========  ===============  ===============

Conjunction and disjunction are mapped homomorphically by ``beta_plus`` and
dually by ``beta_minus``; negation swaps the two.  Only relations against the
literal zero are supported: shifting a general ``a <= b`` would introduce new
rounding of its own.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Mapping, Optional

from . import fp
from .analysis import LetEnv, RangeEnv, analyze
from .errors import MissingRange, UnsupportedGuard
from .fp import DOUBLE, Format
from .lang import (
    FALSE, FLIPPED, TRUE, And, BoolConst, FloatConst, Not, Or, Rel, relations,
)

AtomErrorMap = Mapping[object, Fraction]

_PLUS = {"le": ("le", -1), "ge": ("ge", 1), "lt": ("lt", -1), "gt": ("gt", 1)}
_MINUS = {"le": ("gt", 1), "ge": ("lt", -1), "lt": ("ge", 1), "gt": ("le", -1)}


def _is_zero(e) -> bool:
    return isinstance(e, FloatConst) and e.value.m == 0


def sign_test(rel: Rel) -> Rel:
    """Rewrite ``0 op a`` as ``a op' 0``; reject anything that is not a sign test."""
    if not rel.is_float:
        raise UnsupportedGuard("guards must be float Boolean expressions")
    if rel.rel == "eq":
        raise UnsupportedGuard("equality tests have no sound abstraction here")
    if _is_zero(rel.rhs):
        return rel
    if _is_zero(rel.lhs):
        return Rel(FLIPPED[rel.rel], rel.rhs, rel.lhs)
    raise UnsupportedGuard(
        "only sign tests (comparisons against 0) can be abstracted; "
        "rewrite 'a < b' as 'a - b < 0' if the subtraction is intended"
    )


def normalize_guard(b):
    """Same guard with every relation in ``a op 0`` form."""
    if isinstance(b, Rel):
        return sign_test(b)
    if isinstance(b, Not):
        return Not(normalize_guard(b.arg))
    if isinstance(b, And):
        return And(tuple(normalize_guard(a) for a in b.args))
    if isinstance(b, Or):
        return Or(tuple(normalize_guard(a) for a in b.args))
    if isinstance(b, BoolConst):
        return b
    raise TypeError(f"not a Boolean expression: {b!r}")


def atom_errors(guard, ranges: RangeEnv, fmt: Format = DOUBLE,
                lets: Optional[LetEnv] = None) -> Dict[object, Fraction]:
    """Error bound of every sign-test atom of ``guard``."""
    out: Dict[object, Fraction] = {}
    for rel in relations(guard):
        atom = sign_test(rel).lhs
        if atom not in out:
            out[atom] = analyze(atom, ranges, fmt, lets).error
    return out


def _eps_const(eps: Fraction, sign: int, fmt: Format) -> FloatConst:
    f = fp.round_up(eps, fmt)
    return FloatConst(-f if sign < 0 else f)


def _shifted(rel: Rel, table, errs: AtomErrorMap, fmt: Format) -> Rel:
    rel = sign_test(rel)
    try:
        eps = errs[rel.lhs]
    except KeyError:
        raise MissingRange("no error bound for guard atom") from None
    op, sign = table[rel.rel]
    return Rel(op, rel.lhs, _eps_const(eps, sign, fmt))


def beta_plus(phi, errs: AtomErrorMap, fmt: Format = DOUBLE):
    """Guard implying ``phi`` in both the float and the real computation."""
    if isinstance(phi, Rel):
        return _shifted(phi, _PLUS, errs, fmt)
    if isinstance(phi, And):
        return And(tuple(beta_plus(a, errs, fmt) for a in phi.args))
    if isinstance(phi, Or):
        return Or(tuple(beta_plus(a, errs, fmt) for a in phi.args))
    if isinstance(phi, Not):
        return beta_minus(phi.arg, errs, fmt)
    if isinstance(phi, BoolConst):
        return phi
    raise TypeError(f"not a Boolean expression: {phi!r}")


def beta_minus(phi, errs: AtomErrorMap, fmt: Format = DOUBLE):
    """Guard implying ``not phi`` in both the float and the real computation."""
    if isinstance(phi, Rel):
        return _shifted(phi, _MINUS, errs, fmt)
    if isinstance(phi, And):
        return Or(tuple(beta_minus(a, errs, fmt) for a in phi.args))
    if isinstance(phi, Or):
        return And(tuple(beta_minus(a, errs, fmt) for a in phi.args))
    if isinstance(phi, Not):
        return beta_plus(phi.arg, errs, fmt)
    if isinstance(phi, BoolConst):
        return FALSE if phi.value else TRUE
    raise TypeError(f"not a Boolean expression: {phi!r}")
