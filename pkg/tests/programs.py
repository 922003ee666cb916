"""Random small programs with sign-test guards."""

from __future__ import annotations

import random
from fractions import Fraction

from fpguard import fp
from fpguard.analysis import Interval
from fpguard.lang import (
    And, FloatConst, FloatOp, FloatVar, If, IfN, Let, Not, Or, Program, Rel,
)

CONSTANTS = [Fraction(1), Fraction(-2), Fraction(1, 10), Fraction(3, 7), Fraction(5, 2), Fraction(0)]
ZERO = FloatConst(fp.zero())


def _const(rng):
    return FloatConst(fp.round_nearest(rng.choice(CONSTANTS)))


def random_arith(rng: random.Random, names, depth: int):
    if depth == 0 or rng.random() < 0.3:
        return FloatVar(rng.choice(names)) if rng.random() < 0.8 else _const(rng)
    op = rng.choice(["add", "sub", "mul", "mul", "neg"])
    if op == "neg":
        return FloatOp("neg", (random_arith(rng, names, depth - 1),))
    return FloatOp(op, (random_arith(rng, names, depth - 1), random_arith(rng, names, depth - 1)))


def random_guard(rng: random.Random, names, depth: int = 2):
    roll = rng.random()
    if depth == 0 or roll < 0.55:
        atom = random_arith(rng, names, 2)
        rel = rng.choice(["lt", "le", "gt", "ge"])
        return Rel(rel, atom, ZERO) if rng.random() < 0.85 else Rel(rel, ZERO, atom)
    if roll < 0.75:
        return And((random_guard(rng, names, depth - 1), random_guard(rng, names, depth - 1)))
    if roll < 0.92:
        return Or((random_guard(rng, names, depth - 1), random_guard(rng, names, depth - 1)))
    return Not(random_guard(rng, names, depth - 1))


def random_stmt(rng: random.Random, names, budget: list, fresh: list):
    """Statement with at most ``budget[0]`` conditionals left to place."""
    roll = rng.random()
    if budget[0] > 0 and roll < 0.55:
        budget[0] -= 1
        if rng.random() < 0.5:
            g = random_guard(rng, names)
            return If(g, random_stmt(rng, names, budget, fresh), random_stmt(rng, names, budget, fresh))
        n = rng.randint(2, 3)
        branches = [(random_guard(rng, names), random_stmt(rng, names, budget, fresh)) for _ in range(n)]
        return IfN(tuple(branches), random_stmt(rng, names, budget, fresh))
    if roll < 0.65 and fresh:
        name = fresh.pop()
        expr = random_arith(rng, names, 2)
        return Let(name, expr, random_stmt(rng, names + [name], budget, fresh))
    return random_arith(rng, names, 2)


def random_program(rng: random.Random, max_conditionals: int = 3, n_params: int = 3) -> Program:
    params = [f"x{i}" for i in range(n_params)]
    body = random_stmt(rng, list(params), [max_conditionals], ["a", "b"])
    return Program("gen", tuple(params), body)


def ranges_for(p: Program, lo=-10, hi=10):
    return {x: Interval(lo, hi) for x in p.params}
