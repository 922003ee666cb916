"""Collecting semantics: every real/float path combination as a tuple.

A :class:`ConditionalTuple` ``<eta, eta~, r, r~>_t`` says that when the real
path condition ``eta`` and the float path condition ``eta~`` both hold, the
real computation returns ``r`` and the float computation returns ``r~``;
``t`` records whether the two computations followed the same branches.
The warning output is represented by :data:`~fpguard.lang.WARNING`.

Tuple sets are tuples of distinct elements in a deterministic order; the
join is order-preserving union.
"""

from __future__ import annotations

from itertools import product
from typing import Dict, Iterable, Mapping, NamedTuple, Optional, Tuple

from .analysis import Interval, LetEnv, analyze_let_env
from .errors import TupleLimitExceeded
from .fp import DOUBLE, Format
from .lang import (
    TRUE, FloatConst, FloatOp, FloatVar, If, IfN, Let, Not, RealOp, RealVar,
    Warn, WARNING, conj, free_vars, let_bindings, real_counterpart_arith,
    real_counterpart_bool, real_name,
)
from .refute import is_possibly_sat

STABLE = "s"
UNSTABLE = "u"
DEFAULT_CAP = 100_000


class ConditionalTuple(NamedTuple):
    real_cond: object
    float_cond: object
    real_out: object
    float_out: object
    flag: str

    @property
    def stable(self) -> bool:
        return self.flag == STABLE


TupleSet = Tuple[ConditionalTuple, ...]
SemEnv = Mapping[str, TupleSet]


class _Ctx:
    def __init__(self, chi, ranges, fmt, cap, lets):
        self.chi = chi
        self.ranges = ranges
        self.fmt = fmt
        self.cap = cap
        self.lets = lets
        self.chi_inverse = {}

    def sat(self, real_cond, float_cond) -> bool:
        return is_possibly_sat(real_cond, float_cond, self.ranges, lets=self.lets,
                               fmt=self.fmt, chi_inverse=self.chi_inverse)

    def check(self, n: int):
        if n > self.cap:
            raise TupleLimitExceeded(f"more than {self.cap} conditional tuples")


def _join(parts: Iterable[Iterable[ConditionalTuple]], ctx: _Ctx) -> TupleSet:
    out: Dict[ConditionalTuple, None] = {}
    for part in parts:
        for c in part:
            out[c] = None
            ctx.check(len(out))
    return tuple(out)


def propagate_condition(b, bt, c: ConditionalTuple, ctx: Optional[_Ctx] = None,
                        **kwargs) -> Optional[ConditionalTuple]:
    """``<eta and b, eta~ and b~, r, r~>_t``, or None when provably infeasible."""
    real_cond = conj(c.real_cond, b)
    float_cond = conj(c.float_cond, bt)
    feasible = ctx.sat(real_cond, float_cond) if ctx else is_possibly_sat(real_cond, float_cond, **kwargs)
    if not feasible:
        return None
    return ConditionalTuple(real_cond, float_cond, c.real_out, c.float_out, c.flag)


def propagate_set(b, bt, cs: Iterable[ConditionalTuple], ctx: Optional[_Ctx] = None,
                  **kwargs) -> TupleSet:
    out = (propagate_condition(b, bt, c, ctx, **kwargs) for c in cs)
    return tuple(dict.fromkeys(c for c in out if c is not None))


def semantics(s, env: Optional[SemEnv] = None, *, chi=real_name,
              ranges: Optional[Mapping[str, Interval]] = None, fmt: Format = DOUBLE,
              cap: int = DEFAULT_CAP) -> TupleSet:
    """Set of conditional tuples of the program expression ``s``.

    ``env`` maps let-bound variables to their tuple sets (empty by default).
    When ``ranges`` are given, infeasible combinations are also refuted with
    interval reasoning over the input ranges.
    """
    lets: LetEnv = {}
    if ranges is not None:
        try:
            lets = analyze_let_env(let_bindings(s), ranges, fmt)
        except (KeyError, ArithmeticError):
            lets = {}
    ctx = _Ctx(chi, ranges, fmt, cap, lets)
    ctx.chi_inverse = _chi_inverse(s, chi)
    return _sem(s, dict(env or {}), ctx)


def _chi_inverse(s, chi) -> Dict[str, str]:
    names = set(free_vars(s)) | {n for n, _ in let_bindings(s)}
    return {chi(n): n for n in names}


def _sem(s, env: Dict[str, TupleSet], ctx: _Ctx) -> TupleSet:
    chi = ctx.chi
    if isinstance(s, FloatConst):
        return (ConditionalTuple(TRUE, TRUE, real_counterpart_arith(s, chi), s, STABLE),)
    if isinstance(s, Warn):
        return (ConditionalTuple(TRUE, TRUE, WARNING, WARNING, STABLE),)
    if isinstance(s, FloatVar):
        bound = env.get(s.name)
        if bound:
            return bound
        return (ConditionalTuple(TRUE, TRUE, RealVar(chi(s.name)), s, STABLE),)
    if isinstance(s, FloatOp):
        operands = [[c for c in _sem(a, env, ctx) if c.stable] for a in s.args]
        out = []
        for combo in product(*operands):
            real_cond = conj(*(c.real_cond for c in combo))
            float_cond = conj(*(c.float_cond for c in combo))
            if len(combo) > 1 and not ctx.sat(real_cond, float_cond):
                continue
            out.append(ConditionalTuple(
                real_cond, float_cond,
                RealOp(s.op, tuple(c.real_out for c in combo)),
                FloatOp(s.op, tuple(c.float_out for c in combo)),
                STABLE,
            ))
            ctx.check(len(out))
        return tuple(dict.fromkeys(out))
    if isinstance(s, Let):
        inner = dict(env)
        inner[s.name] = _sem(s.expr, env, ctx)
        return _sem(s.body, inner, ctx)
    if isinstance(s, If):
        return _sem_if(s, env, ctx)
    if isinstance(s, IfN):
        return _sem_ifn(s, env, ctx)
    raise TypeError(f"not a program expression: {s!r}")


def _sem_if(s: If, env, ctx: _Ctx) -> TupleSet:
    b = real_counterpart_bool(s.guard, ctx.chi)
    bt = s.guard
    then = _sem(s.then, env, ctx)
    orelse = _sem(s.orelse, env, ctx)
    stable_then = [c for c in then if c.stable]
    stable_else = [c for c in orelse if c.stable]
    # float takes then, real takes else
    float_then = [ConditionalTuple(c2.real_cond, c1.float_cond, c2.real_out, c1.float_out, UNSTABLE)
                  for c1 in stable_then for c2 in stable_else]
    # real takes then, float takes else
    real_then = [ConditionalTuple(c1.real_cond, c2.float_cond, c1.real_out, c2.float_out, UNSTABLE)
                 for c1 in stable_then for c2 in stable_else]
    return _join([
        propagate_set(b, bt, then, ctx),
        propagate_set(Not(b), Not(bt), orelse, ctx),
        propagate_set(Not(b), bt, float_then, ctx),
        propagate_set(b, Not(bt), real_then, ctx),
    ], ctx)


def _chains(guards):
    """Condition selecting each branch: its guard and the negation of all
    earlier guards; the final entry selects the ``else`` branch."""
    out = []
    for i, g in enumerate(guards):
        out.append(conj(g, *(Not(h) for h in guards[:i])))
    out.append(conj(*(Not(h) for h in guards)))
    return out


def _sem_ifn(s: IfN, env, ctx: _Ctx) -> TupleSet:
    float_guards = list(s.guards)
    real_guards = [real_counterpart_bool(g, ctx.chi) for g in float_guards]
    real_chain = _chains(real_guards)
    float_chain = _chains(float_guards)
    sems = [_sem(body, env, ctx) for body in s.bodies]
    stables = [[c for c in sem if c.stable] for sem in sems]
    parts = [propagate_set(real_chain[i], float_chain[i], sems[i], ctx) for i in range(len(sems))]
    # real computation takes branch i while the float one takes branch j
    for i in range(len(sems)):
        for j in range(len(sems)):
            if i == j:
                continue
            mixed = [ConditionalTuple(ci.real_cond, cj.float_cond, ci.real_out, cj.float_out, UNSTABLE)
                     for ci in stables[i] for cj in stables[j]]
            parts.append(propagate_set(real_chain[i], float_chain[j], mixed, ctx))
    return _join(parts, ctx)


def matching_tuples(tuples: Iterable[ConditionalTuple], env: Mapping, fmt: Format = DOUBLE):
    """Tuples whose real and float conditions both hold under ``env``."""
    from .interp import eval_bool

    return [c for c in tuples
            if eval_bool(c.real_cond, env, fmt) and eval_bool(c.float_cond, env, fmt)]
