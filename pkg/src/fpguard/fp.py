"""Binary floating-point numbers as (significand, exponent) pairs.

A value ``Float(m, e)`` denotes exactly ``m * 2**e``.  Floats produced by this
module are canonical for the format they were rounded to: either normal
(``2**(p-1) <= |m| < 2**p``) or subnormal (``e == -e_min``).  Zero is
``Float(0, -e_min)``; there is no signed zero, no infinity and no NaN.
Leaving the finite range raises :class:`~fpguard.errors.FloatOverflow`.

All rounding is round-to-nearest, ties-to-even, computed on exact integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .errors import FloatOverflow

__all__ = [
    "Format", "Float", "SINGLE", "DOUBLE", "FORMATS",
    "to_real", "round_nearest", "round_dyadic", "round_up", "ulp",
    "roundoff_error", "exec_op", "from_float", "to_float", "compare",
    "next_up", "max_finite", "zero",
]


@dataclass(frozen=True)
class Format:
    """Precision ``p`` and minimal exponent magnitude ``e_min`` (radix 2).

    ``e_max`` is the largest exponent a canonical float may carry; it is
    needed only to detect overflow, and the built-in formats use the IEEE
    values.
    """

    p: int
    e_min: int
    e_max: int
    name: str = ""

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("precision must be at least 2")
        if self.e_min < 0:
            raise ValueError("e_min is a magnitude and must be nonnegative")

    @property
    def smallest_normal(self) -> Fraction:
        return Fraction(1, 1 << (self.e_min - self.p + 1)) if self.e_min >= self.p - 1 \
            else Fraction(1 << (self.p - 1 - self.e_min))


SINGLE = Format(24, 149, 104, "single")
DOUBLE = Format(53, 1074, 971, "double")
FORMATS = {"single": SINGLE, "double": DOUBLE}


class Float(NamedTuple):
    m: int
    e: int

    def __neg__(self) -> "Float":
        return Float(-self.m, self.e)

    @property
    def sign(self) -> int:
        return (self.m > 0) - (self.m < 0)


def zero(fmt: Format = DOUBLE) -> Float:
    return Float(0, -fmt.e_min)


def max_finite(fmt: Format = DOUBLE) -> Float:
    return Float((1 << fmt.p) - 1, fmt.e_max)


def to_real(f: Float) -> Fraction:
    """Exact value ``m * 2**e``."""
    m, e = f
    if e >= 0:
        return Fraction(m << e)
    return Fraction(m, 1 << -e)


def to_float(f: Float) -> float:
    """Native Python float with the same value (exact for p <= 53)."""
    return math.ldexp(f.m, f.e)


def _finish(negative: bool, q: int, e: int, fmt: Format) -> Float:
    if q == 1 << fmt.p:
        q >>= 1
        e += 1
    if q == 0:
        return Float(0, -fmt.e_min)
    if e > fmt.e_max:
        raise FloatOverflow(f"value exceeds the largest finite {fmt.name or 'format'} number")
    return Float(-q if negative else q, e)


def round_dyadic(m: int, e: int, fmt: Format = DOUBLE) -> Float:
    """Round the exact dyadic ``m * 2**e`` to the nearest float of ``fmt``."""
    if m == 0:
        return Float(0, -fmt.e_min)
    a = -m if m < 0 else m
    top = a.bit_length() - 1 + e
    target = top - fmt.p + 1
    if target < -fmt.e_min:
        target = -fmt.e_min
    shift = target - e
    if shift <= 0:
        q = a << -shift
    else:
        q = a >> shift
        rem = a & ((1 << shift) - 1)
        half = 1 << (shift - 1)
        if rem > half or (rem == half and q & 1):
            q += 1
    return _finish(m < 0, q, target, fmt)


def _binade(n: int, d: int) -> int:
    """floor(log2(n / d)) for positive integers."""
    k = n.bit_length() - d.bit_length()
    if k >= 0:
        if n < d << k:
            k -= 1
    elif n << -k < d:
        k -= 1
    return k


def round_nearest(r, fmt: Format = DOUBLE) -> Float:
    """Nearest float to the rational ``r``; ties go to the even significand."""
    r = Fraction(r)
    n, d = r.numerator, r.denominator
    if n == 0:
        return Float(0, -fmt.e_min)
    negative = n < 0
    if negative:
        n = -n
    if d & (d - 1) == 0:
        # denominator is a power of two: exact dyadic path
        return round_dyadic(-n if negative else n, -(d.bit_length() - 1), fmt)
    e = _binade(n, d) - fmt.p + 1
    if e < -fmt.e_min:
        e = -fmt.e_min
    if e >= 0:
        num, den = n, d << e
    else:
        num, den = n << -e, d
    q, rem = divmod(num, den)
    if 2 * rem > den or (2 * rem == den and q & 1):
        q += 1
    return _finish(negative, q, e, fmt)


def next_up(f: Float, fmt: Format = DOUBLE) -> Float:
    """Smallest float strictly greater than ``f``."""
    m, e = f
    if m == 0:
        return Float(1, -fmt.e_min)
    if m < 0 and -m == 1 << (fmt.p - 1) and e > -fmt.e_min:
        # stepping down into the binade below halves the spacing
        return round_dyadic((m << 1) + 1, e - 1, fmt)
    return round_dyadic(m + 1, e, fmt)


def round_up(r, fmt: Format = DOUBLE) -> Float:
    """Smallest float whose value is >= ``r``."""
    r = Fraction(r)
    f = round_nearest(r, fmt)
    if to_real(f) < r:
        f = next_up(f, fmt)
    return f


def ulp(r, fmt: Format = DOUBLE) -> Fraction:
    """Spacing of floats in the binade of ``max(|r|, smallest normal)``."""
    r = abs(Fraction(r))
    floor = fmt.smallest_normal
    if r < floor:
        r = floor
    k = _binade(r.numerator, r.denominator) - fmt.p + 1
    return Fraction(1 << k) if k >= 0 else Fraction(1, 1 << -k)


def roundoff_error(f: Float, r) -> Fraction:
    """``|R(f) - r|``, exactly."""
    return abs(to_real(f) - Fraction(r))


def from_float(x: float, fmt: Format = DOUBLE) -> Float:
    """Round a native Python float into ``fmt`` (exact when it fits)."""
    if not math.isfinite(x):
        raise FloatOverflow(f"non-finite value {x!r}")
    if x == 0.0:
        return Float(0, -fmt.e_min)
    frac, k = math.frexp(x)
    return round_dyadic(int(frac * 9007199254740992.0), k - 53, fmt)


def compare(a: Float, b: Float) -> int:
    """Sign of ``R(a) - R(b)``."""
    (ma, ea), (mb, eb) = a, b
    if ea >= eb:
        ma <<= ea - eb
    else:
        mb <<= eb - ea
    return (ma > mb) - (ma < mb)


def exec_op(op: str, args: Sequence[Float], fmt: Format = DOUBLE) -> Float:
    """Correctly rounded ``op`` (``add``, ``sub``, ``mul`` or ``neg``)."""
    if op == "neg":
        (x,) = args
        return Float(-x.m, x.e)
    (m1, e1), (m2, e2) = args
    if op == "mul":
        return round_dyadic(m1 * m2, e1 + e2, fmt)
    if op == "sub":
        m2 = -m2
    elif op != "add":
        raise ValueError(f"unknown operator {op!r}")
    if e1 >= e2:
        return round_dyadic((m1 << (e1 - e2)) + m2, e2, fmt)
    return round_dyadic(m1 + (m2 << (e2 - e1)), e1, fmt)
