import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fpguard import fp
from fpguard.analysis import (
    Interval, analyze, analyze_error, analyze_let_env, analyze_range, format_ranges, parse_ranges,
)
from fpguard.errors import MissingRange, ParseError
from fpguard.lang import FloatConst, FloatVar, let_bindings
from fpguard.syntax import parse_arith

from conftest import Dyadic, abs_diff, exact_fn, native_float_fn

HUNDRED = {n: Interval(-100, 100) for n in ("vx", "vy", "sx", "sy", "x", "y")}
EXPR = parse_arith("sx * vy - sy * vx", ("sx", "vy", "sy", "vx"))


def test_interval_basics():
    a, b = Interval(-1, 2), Interval(3, 4)
    assert a + b == Interval(2, 6)
    assert a - b == Interval(-5, -1)
    assert a * b == Interval(-4, 8)
    assert -a == Interval(-2, 1)
    assert a.mag == 2 and 0 in a and 5 not in a
    assert a.meet(b) is None and a.hull(b) == Interval(-1, 4)
    with pytest.raises(ValueError):
        Interval(1, 0)


def test_range_examples():
    assert analyze_range(FloatConst(fp.round_nearest(1)), {}) == Interval(1, 1)
    assert analyze(parse_arith("x - y", ("x", "y")), HUNDRED).real == Interval(-200, 200)
    assert analyze(EXPR, HUNDRED).real == Interval(-20000, 20000)


def test_error_examples():
    assert analyze_error(FloatVar("x"), HUNDRED) == 0
    assert analyze_error(FloatConst(fp.round_nearest(Fraction(1, 10))), {}) == 0
    # products of floats in [-100, 100] round with at most ulp(10000)/2 each
    eps = analyze_error(EXPR, HUNDRED)
    assert eps == Fraction(1, 2 ** 38)
    assert eps <= 100 * Fraction(6.4801497501321145e-12)


def test_missing_range():
    with pytest.raises(MissingRange) as info:
        analyze_error(parse_arith("x + y", ("x", "y")), {"x": Interval(0, 1)})
    assert "y" in str(info.value)


def test_let_env(winding, winding_ranges):
    lets = analyze_let_env(let_bindings(winding.body), winding_ranges)
    assert set(lets) == {"tx", "ty", "nx", "ny"}
    for b in lets.values():
        assert b.real == Interval(-200, 200)
        assert b.error == fp.ulp(200) / 2
    zero = analyze_let_env([("x", FloatConst(fp.zero()))], {})
    assert zero["x"].real == Interval(0, 0) and zero["x"].error == 0


def test_chained_lets_propagate_error(winding, winding_ranges):
    lets = analyze_let_env(let_bindings(winding.body), winding_ranges)
    det = parse_arith("(nx - tx) * ty - (ny - ty) * tx", ("nx", "tx", "ty", "ny"))
    with_lets = analyze(det, {}, lets=lets).error
    # treating the let-bound values as exact inputs must give a smaller bound
    exact_inputs = analyze(det, {n: Interval(-200, 200) for n in lets}).error
    assert with_lets > exact_inputs > 0


def _sample_error(expr, params, ranges, n, seed):
    f_fn, x_fn = native_float_fn(expr, params), exact_fn(expr, params)
    rng = random.Random(seed)
    worst = Fraction(0)
    for _ in range(n):
        vals = [rng.uniform(float(ranges[p].lo), float(ranges[p].hi)) for p in params]
        worst = max(worst, abs_diff(f_fn(*vals), x_fn(*map(Dyadic.of, vals))))
    return worst


def test_soundness_sampled():
    params = ("sx", "vy", "sy", "vx")
    assert _sample_error(EXPR, params, HUNDRED, 20000, 1) <= analyze_error(EXPR, HUNDRED)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([
    "x * y + 0.1", "(x - y) * (x + y)", "x * x - y * y", "-(x * 0.3) + y * y * y", "x - 0.7 * y",
]))
def test_soundness_random_ranges(seed, src):
    rng = random.Random(seed)
    expr = parse_arith(src, ("x", "y"))
    lo = rng.uniform(-50, 50)
    ranges = {"x": Interval(Fraction(lo), Fraction(lo) + Fraction(rng.uniform(0, 20))),
              "y": Interval(Fraction(-3), Fraction(rng.uniform(-3, 30)))}
    assert _sample_error(expr, ("x", "y"), ranges, 300, seed) <= analyze_error(expr, ranges)


def test_monotone_in_ranges():
    small = {k: Interval(-1, 1) for k in HUNDRED}
    assert analyze_error(EXPR, small) <= analyze_error(EXPR, HUNDRED)


def test_float_range_encloses_float_values():
    b = analyze(EXPR, HUNDRED)
    assert b.float.lo >= -20000 - b.error and b.float.hi <= 20000 + b.error
    assert b.range.lo <= -20000 and b.range.hi >= 20000


def test_parse_ranges():
    env = parse_ranges("# comment\nx in [-1, 2.5]\ny in [1/3, 1/2]  # trailing\n\n")
    assert env == {"x": Interval(-1, Fraction(5, 2)), "y": Interval(Fraction(1, 3), Fraction(1, 2))}
    assert parse_ranges(format_ranges(env)) == env
    with pytest.raises(ParseError):
        parse_ranges("x = [1, 2]")
    with pytest.raises(ParseError):
        parse_ranges("x in [abc, 2]")
