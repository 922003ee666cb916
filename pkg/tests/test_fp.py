import math
import random
import struct
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fpguard import fp
from fpguard.errors import FloatOverflow
from fpguard.fp import DOUBLE, SINGLE, Float, Format

from conftest import to_single

finite = st.floats(allow_nan=False, allow_infinity=False)
moderate = st.floats(min_value=-1e150, max_value=1e150, allow_nan=False)


def bits(x: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", x))[0]


def is_canonical(f: Float, fmt: Format) -> bool:
    a = abs(f.m)
    if a == 0:
        return f.e == -fmt.e_min
    normal = 1 << (fmt.p - 1) <= a < 1 << fmt.p and -fmt.e_min <= f.e <= fmt.e_max
    subnormal = f.e == -fmt.e_min and a < 1 << (fmt.p - 1)
    return normal or subnormal


def test_formats():
    assert (DOUBLE.p, DOUBLE.e_min) == (53, 1074)
    assert (SINGLE.p, SINGLE.e_min) == (24, 149)
    assert fp.to_float(fp.max_finite(DOUBLE)) == 1.7976931348623157e308
    assert fp.to_float(fp.max_finite(SINGLE)) == to_single(3.4028234663852886e38)
    with pytest.raises(ValueError):
        Format(1, 10, 10)


def test_to_real_examples():
    assert fp.to_real(Float(3, -1)) == Fraction(3, 2)
    assert fp.to_real(Float(0, -1074)) == 0
    assert fp.to_real(fp.round_nearest(Fraction(1, 10))) == Fraction(3602879701896397, 2 ** 55)


def test_round_nearest_examples():
    assert fp.to_real(fp.round_nearest(Fraction(3, 2))) == Fraction(3, 2)
    third = fp.to_real(fp.round_nearest(Fraction(1, 3)))
    assert abs(third - Fraction(1, 3)) <= Fraction(1, 2 ** 54) * Fraction(1, 3) * (1 + Fraction(1, 2 ** 52))
    # precision 3: 0b101 and 0b110 straddle 0b1011 / 2 -> even significand
    p3 = Format(3, 10, 10)
    assert fp.round_nearest(Fraction(11, 2), p3) == Float(6, 0)
    assert fp.round_nearest(Fraction(13, 2), p3) == Float(6, 0)
    assert fp.round_nearest(Fraction(9, 2), p3) == Float(4, 0)


def test_round_nearest_canonical_zero_and_subnormal():
    assert fp.round_nearest(0) == fp.zero()
    tiny = fp.round_nearest(Fraction(1, 2 ** 1074))
    assert tiny == Float(1, -1074) and is_canonical(tiny, DOUBLE)
    assert fp.round_nearest(Fraction(1, 2 ** 1075)) == fp.zero()  # tie goes to even (zero)
    assert fp.round_nearest(Fraction(3, 2 ** 1076)) == Float(1, -1074)


def test_overflow():
    big = fp.to_real(fp.max_finite())
    assert fp.round_nearest(big) == fp.max_finite()
    with pytest.raises(FloatOverflow):
        fp.round_nearest(big * 2)
    with pytest.raises(FloatOverflow):
        fp.exec_op("mul", [fp.from_float(1e200), fp.from_float(1e200)])
    with pytest.raises(FloatOverflow):
        fp.from_float(math.inf)


@given(st.integers(min_value=-10 ** 40, max_value=10 ** 40), st.integers(min_value=1, max_value=10 ** 40))
def test_round_nearest_matches_correctly_rounded_division(n, d):
    # int / int is correctly rounded in CPython
    expected = n / d
    got = fp.round_nearest(Fraction(n, d))
    assert fp.to_float(got) == expected
    assert is_canonical(got, DOUBLE)


@given(finite)
def test_round_trip_native(x):
    f = fp.from_float(x)
    assert is_canonical(f, DOUBLE)
    assert fp.to_float(f) == x
    assert fp.round_nearest(fp.to_real(f)) == f  # idempotence


@given(finite)
def test_single_rounding_matches_hardware(x):
    try:
        expected = to_single(x)
    except OverflowError:
        with pytest.raises(FloatOverflow):
            fp.round_nearest(Fraction(x), SINGLE)
        return
    got = fp.round_nearest(Fraction(x), SINGLE)
    assert is_canonical(got, SINGLE)
    assert fp.to_float(got) == expected


def test_ulp_examples():
    assert fp.ulp(1) == Fraction(1, 2 ** 52)
    assert fp.ulp(0) == Fraction(1, 2 ** 1074)
    assert fp.ulp(100 * 100 + 100 * 100) == Fraction(1, 2 ** 38)
    assert fp.ulp(Fraction(1, 2 ** 1060)) == Fraction(1, 2 ** 1074)


@given(finite.filter(lambda x: x != 0 and abs(x) < 1e308))
def test_ulp_matches_math_ulp(x):
    assert fp.ulp(Fraction(x)) == Fraction(math.ulp(x))


def test_roundoff_error():
    r = Fraction(1, 10)
    f = fp.round_nearest(r)
    err = fp.roundoff_error(f, r)
    assert err > 0 and err == abs(Fraction(3602879701896397, 2 ** 55) - r)
    assert fp.roundoff_error(fp.round_nearest(Fraction(3, 2)), Fraction(3, 2)) == 0


@given(moderate, moderate)
def test_exec_op_bit_exact(a, b):
    fa, fb = fp.from_float(a), fp.from_float(b)
    for op, native in (("add", a + b), ("sub", a - b), ("mul", a * b)):
        got = fp.to_float(fp.exec_op(op, [fa, fb]))
        assert got == native and (native != 0 or got == 0)
        if native != 0:
            assert bits(got) == bits(native)
    assert fp.to_float(fp.exec_op("neg", [fa])) == -a


@given(st.floats(min_value=-1e18, max_value=1e18, allow_nan=False),
       st.floats(min_value=-1e18, max_value=1e18, allow_nan=False))
def test_exec_op_single_matches_hardware(a, b):
    a, b = to_single(a), to_single(b)
    fa, fb = fp.from_float(a, SINGLE), fp.from_float(b, SINGLE)
    # binary64 holds every single sum and product to within one rounding,
    # and 53 >= 2 * 24 + 2 makes the double rounding innocuous
    for op, native in (("add", a + b), ("sub", a - b), ("mul", a * b)):
        assert fp.to_float(fp.exec_op(op, [fa, fb], SINGLE)) == to_single(native)


@given(moderate, moderate, st.sampled_from(["add", "sub", "mul"]))
def test_exec_op_error_within_half_ulp(a, b, op):
    fa, fb = fp.from_float(a), fp.from_float(b)
    exact = {"add": lambda x, y: x + y, "sub": lambda x, y: x - y, "mul": lambda x, y: x * y}[op](
        fp.to_real(fa), fp.to_real(fb))
    res = fp.exec_op(op, [fa, fb])
    assert fp.roundoff_error(res, exact) <= fp.ulp(fp.to_real(res)) / 2
    assert res == fp.round_nearest(exact)


def test_exec_op_examples():
    one = Float(1 << 52, -52)
    assert fp.to_real(fp.exec_op("add", [one, one])) == 2
    x = fp.round_nearest(Fraction(1, 10))
    prod = fp.exec_op("mul", [x, x])
    assert prod == fp.round_nearest(fp.to_real(x) * fp.to_real(x))
    assert fp.to_float(prod) == 0.1 * 0.1


def test_next_up_and_round_up():
    for x in (1.0, -1.0, 0.0, 5e-324, -5e-324, 2.0 ** -1022, -(2.0 ** -1022), 123.456):
        assert fp.to_float(fp.next_up(fp.from_float(x))) == math.nextafter(x, math.inf)
    # 0.1 rounds up to nearest, 0.3 rounds down to nearest
    assert fp.round_up(Fraction(1, 10)) == fp.round_nearest(Fraction(1, 10))
    assert fp.to_float(fp.round_up(Fraction(3, 10))) == math.nextafter(0.3, 1)


@settings(max_examples=200)
@given(st.fractions(min_value=-10 ** 6, max_value=10 ** 6))
def test_round_up_is_least_upper_float(r):
    up = fp.round_up(r)
    assert fp.to_real(up) >= r
    below = math.nextafter(fp.to_float(up), -math.inf)
    assert Fraction(below) < r


def test_compare():
    a, b = fp.from_float(1.5), fp.from_float(-2.25)
    assert fp.compare(a, b) == 1 and fp.compare(b, a) == -1 and fp.compare(a, a) == 0
    assert fp.compare(fp.zero(), fp.from_float(5e-324)) == -1


def test_random_operations_against_native_small_sample():
    rng = random.Random(3)
    for _ in range(2000):
        a = rng.uniform(-1, 1) * 2.0 ** rng.randint(-60, 60)
        b = rng.uniform(-1, 1) * 2.0 ** rng.randint(-60, 60)
        assert fp.to_float(fp.exec_op("sub", [fp.from_float(a), fp.from_float(b)])) == a - b
