import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fpguard import fp
from fpguard.errors import TupleLimitExceeded
from fpguard.interp import AssignmentPair, near_root_sample, sample_uniform
from fpguard.lang import (
    TRUE, FloatConst, FloatVar, If, IfN, Not, RealConst, RealVar, Rel, WARNING,
    real_counterpart_bool,
)
from fpguard.semantics import (
    STABLE, UNSTABLE, ConditionalTuple, propagate_condition, propagate_set, semantics,
)
from fpguard.syntax import parse_program

from programs import random_program, ranges_for
from semantics_check import check_partition

x = FloatVar("x")
ZERO = FloatConst(fp.zero())


def const(v):
    return FloatConst(fp.round_nearest(Fraction(v)))


def test_constant_and_warning():
    d = const(Fraction(1, 10))
    assert semantics(d) == (ConditionalTuple(TRUE, TRUE, RealConst(fp.to_real(d.value)), d, STABLE),)
    assert semantics(WARNING) == (ConditionalTuple(TRUE, TRUE, WARNING, WARNING, STABLE),)


def test_variable_placeholder_and_env():
    assert semantics(x) == (ConditionalTuple(TRUE, TRUE, RealVar("r_x"), x, STABLE),)
    bound = (ConditionalTuple(TRUE, TRUE, RealConst(Fraction(1)), const(1), STABLE),)
    assert semantics(x, {"x": bound}) == bound


def test_binary_if_four_tuples():
    g = Rel("le", x, ZERO)
    rg = real_counterpart_bool(g)
    tuples = semantics(If(g, const(1), const(2)))
    one, two = RealConst(Fraction(1)), RealConst(Fraction(2))
    assert set(tuples) == {
        ConditionalTuple(rg, g, one, const(1), STABLE),
        ConditionalTuple(Not(rg), Not(g), two, const(2), STABLE),
        ConditionalTuple(Not(rg), g, two, const(1), UNSTABLE),
        ConditionalTuple(rg, Not(g), one, const(2), UNSTABLE),
    }
    assert len(tuples) == 4


def test_three_branch_ifn_counts(eps_line, eps_line_ranges):
    for ranges in (None, eps_line_ranges):
        tuples = semantics(eps_line.body, ranges=ranges)
        assert sum(c.stable for c in tuples) == 3
        assert sum(not c.stable for c in tuples) == 6


@pytest.mark.parametrize("n", [2, 3, 4])
def test_ifn_counts_general(n):
    branches = tuple((Rel("gt", FloatVar(f"x{i}"), ZERO), const(i)) for i in range(n))
    s = IfN(branches, const(n))
    tuples = semantics(s)
    bodies = n + 1
    assert sum(c.stable for c in tuples) == bodies
    assert sum(not c.stable for c in tuples) == bodies * (bodies - 1)


def test_stable_tuples_carry_real_counterpart():
    p = parse_program("fun f(x, y) = if x * y - 0.1 <= 0 then x else y")
    for c in semantics(p.body):
        if c.stable:
            assert c.real_cond == real_counterpart_bool(c.float_cond)


def test_propagate_condition():
    c = ConditionalTuple(TRUE, Rel("le", x, ZERO), RealConst(Fraction(1)), const(1), STABLE)
    assert propagate_condition(TRUE, TRUE, c) == c
    assert propagate_condition(TRUE, Not(Rel("le", x, ZERO)), c) is None
    d = c._replace(float_cond=TRUE)
    out = propagate_set(TRUE, Rel("gt", x, ZERO), [c, d])
    assert out == (d._replace(float_cond=Rel("gt", x, ZERO)),)


def test_infeasible_combinations_are_pruned():
    # both guards test the same float atom, so the float sides of some
    # combinations contradict each other
    p = parse_program("fun f(x) = if x <= 0 then if x > 0 then 1 else 2 else 3")
    tuples = semantics(p.body)
    assert not any(c.stable and c.float_out == const(1) for c in tuples)


def test_tuple_cap():
    # independent guards on distinct variables: 7 bodies give 7 * 7 tuples
    params = ", ".join(f"x{i}" for i in range(6))
    p = parse_program(f"fun f({params}) = if x0 > 0 then 0 " + "".join(
        f"elsif x{i} > 0 then {i} " for i in range(1, 6)) + "else 6")
    assert len(semantics(p.body)) == 49
    with pytest.raises(TupleLimitExceeded):
        semantics(p.body, cap=20)
    assert semantics(p.body, cap=10 ** 5)


def test_partition_eps_line(eps_line, eps_line_ranges):
    tuples = semantics(eps_line.body, ranges=eps_line_ranges)
    rng = random.Random(5)
    seen = set()
    for i in range(400):
        sampler = sample_uniform(eps_line.params, eps_line_ranges, rng) if i % 2 else \
            near_root_sample(eps_line, eps_line_ranges, rng)
        c, run = check_partition(eps_line, tuples, AssignmentPair(sampler))
        seen.add(c.flag)
    assert seen == {STABLE, UNSTABLE}


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_partition_random_programs(seed):
    rng = random.Random(seed)
    p = random_program(rng, max_conditionals=2)
    ranges = ranges_for(p)
    tuples = semantics(p.body, ranges=ranges)
    for i in range(20):
        point = sample_uniform(p.params, ranges, rng) if i % 2 else near_root_sample(p, ranges, rng)
        try:
            check_partition(p, tuples, AssignmentPair(point))
        except ArithmeticError:
            continue
