"""Sound round-off error bounds for float arithmetic expressions.

For every subexpression we track three things under the input ranges:

* the range of its real counterpart,
* the range of its float value,
* an error bound ``eps`` with ``|float value - real value| <= eps``.

Propagation (``mag(I) = max(|lo|, |hi|)``, ``e_x`` the operand errors)::

    add/sub  e = e_x + e_y + ulp(mag(I_x +- I_y) + e_x + e_y) / 2
    mul      e = mag(I_x) e_y + mag(I_y) e_x + e_x e_y + ulp(mag(I_x I_y) + that) / 2
    neg      e = e_x

Everything is exact rational arithmetic; ``ulp`` is monotone in magnitude so
the half-ulp of the widened magnitude dominates the actual rounding error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, NamedTuple, Optional, Tuple

from . import fp
from .errors import MissingRange, ParseError
from .fp import DOUBLE, Format
from .lang import FloatConst, FloatExpr, FloatOp, FloatVar, RealConst, RealOp, RealVar


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, v) -> "Interval":
        return cls(v, v)

    @property
    def mag(self) -> Fraction:
        return max(abs(self.lo), abs(self.hi))

    def __contains__(self, v) -> bool:
        return self.lo <= v <= self.hi

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def __sub__(self, other: "Interval") -> "Interval":
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def __mul__(self, other: "Interval") -> "Interval":
        corners = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Interval(min(corners), max(corners))

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def widen(self, eps) -> "Interval":
        return Interval(self.lo - eps, self.hi + eps)

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def meet(self, other: "Interval") -> Optional["Interval"]:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Interval(lo, hi) if lo <= hi else None

    def __str__(self):
        return f"[{self.lo}, {self.hi}]"


RangeEnv = Mapping[str, Interval]


class Bound(NamedTuple):
    """Analysis result for one expression."""

    real: Interval
    float: Interval
    error: Fraction

    @property
    def range(self) -> Interval:
        """Encloses both the real and the float value."""
        return self.real.hull(self.float)


LetEnv = Dict[str, Bound]

_APPLY = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
}


def _round_interval(iv: Interval, fmt: Format) -> Interval:
    # correctly rounded results of values in iv lie between the rounded ends
    return Interval(fp.to_real(fp.round_nearest(iv.lo, fmt)),
                    fp.to_real(fp.round_nearest(iv.hi, fmt)))


def analyze(e: FloatExpr, env: RangeEnv, fmt: Format = DOUBLE,
            lets: Optional[LetEnv] = None) -> Bound:
    """Real range, float range and error bound of ``e``."""
    if isinstance(e, FloatConst):
        v = fp.to_real(e.value)
        return Bound(Interval.point(v), Interval.point(v), Fraction(0))
    if isinstance(e, FloatVar):
        if lets and e.name in lets:
            return lets[e.name]
        if e.name not in env:
            raise MissingRange(f"no input range for variable {e.name!r}")
        iv = env[e.name]
        # only floats inside the range can be inputs
        return Bound(iv, iv, Fraction(0))
    if not isinstance(e, FloatOp):
        raise TypeError(f"not a float arithmetic expression: {e!r}")
    if e.op == "neg":
        (x,) = (analyze(a, env, fmt, lets) for a in e.args)
        return Bound(-x.real, -x.float, x.error)
    x, y = (analyze(a, env, fmt, lets) for a in e.args)
    real = _APPLY[e.op](x.real, y.real)
    if e.op == "mul":
        propagated = x.real.mag * y.error + y.real.mag * x.error + x.error * y.error
    else:
        propagated = x.error + y.error
    error = propagated + fp.ulp(real.mag + propagated, fmt) / 2
    flt = _round_interval(_APPLY[e.op](x.float, y.float), fmt)
    flt = flt.meet(real.widen(error)) or flt
    return Bound(real, flt, error)


def analyze_range(e: FloatExpr, env: RangeEnv, fmt: Format = DOUBLE,
                  lets: Optional[LetEnv] = None) -> Interval:
    """Interval enclosing both the real and the float value of ``e``."""
    return analyze(e, env, fmt, lets).range


def analyze_error(e: FloatExpr, env: RangeEnv, fmt: Format = DOUBLE,
                  lets: Optional[LetEnv] = None) -> Fraction:
    """Sound bound on ``|float value - real value|`` over the input ranges."""
    return analyze(e, env, fmt, lets).error


def analyze_let_env(bindings: Iterable[Tuple[str, FloatExpr]], env: RangeEnv,
                    fmt: Format = DOUBLE, lets: Optional[LetEnv] = None) -> LetEnv:
    """Bounds for let-bound variables, each binding seeing the earlier ones."""
    out: LetEnv = dict(lets or {})
    for name, expr in bindings:
        out[name] = analyze(expr, env, fmt, out)
    return out


def analyze_real_range(e, env: RangeEnv, lets: Optional[LetEnv] = None,
                       chi_inverse: Optional[Mapping[str, str]] = None) -> Interval:
    """Range of a real-flavored expression; real variables map back through
    ``chi_inverse`` to the float variables the ranges are keyed by."""
    if isinstance(e, RealConst):
        return Interval.point(e.value)
    if isinstance(e, RealVar):
        name = chi_inverse.get(e.name, e.name) if chi_inverse else e.name
        if lets and name in lets:
            return lets[name].real
        if name not in env:
            raise MissingRange(f"no input range for variable {name!r}")
        return env[name]
    if isinstance(e, RealOp):
        args = [analyze_real_range(a, env, lets, chi_inverse) for a in e.args]
        if e.op == "neg":
            return -args[0]
        return _APPLY[e.op](*args)
    raise TypeError(f"not a real arithmetic expression: {e!r}")


# -- range files -------------------------------------------------------------

_RANGE_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z_0-9']*)\s+in\s+\[\s*([^,\]]+?)\s*,\s*([^\]]+?)\s*\]\s*$")


def parse_ranges(text: str) -> Dict[str, Interval]:
    """Read lines of the form ``name in [lo, hi]``; ``#`` starts a comment."""
    from .syntax import parse_rational

    out: Dict[str, Interval] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _RANGE_LINE.match(line)
        if m is None:
            raise ParseError("expected 'name in [lo, hi]'", lineno, 1)
        name, lo, hi = m.groups()
        try:
            out[name] = Interval(parse_rational(lo), parse_rational(hi))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(str(exc), lineno, 1) from None
    return out


def format_ranges(env: RangeEnv) -> str:
    from .syntax import format_rational

    return "".join(f"{k} in [{format_rational(v.lo)}, {format_rational(v.hi)}]\n"
                   for k, v in env.items())
