"""Paired real/float execution and the stability classification of runs.

``eval_float`` runs a program with correctly rounded arithmetic in a format;
``eval_real`` runs its real counterpart over exact rationals.  A run is
unstable when, at some conditional both executions visit, the float guard
and the real guard disagree, which shows up as diverging branch traces.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from . import fp
from .analysis import Interval
from .fp import DOUBLE, Float, Format
from .lang import (
    And, BoolConst, FloatConst, FloatOp, FloatVar, If, IfN, Let, Not, Or, Program,
    RealConst, RealOp, RealVar, Rel, Warn, WARNING, guards, let_bindings, real_name,
    relations,
)

Output = Union[Float, Fraction, Warn]

STABLE = "stable"
UNSTABLE = "unstable"

_CMP = {
    "lt": lambda s: s < 0,
    "le": lambda s: s <= 0,
    "gt": lambda s: s > 0,
    "ge": lambda s: s >= 0,
    "eq": lambda s: s == 0,
}


# -- expression evaluation -------------------------------------------------

def eval_float_arith(e, env: Mapping[str, Float], fmt: Format = DOUBLE) -> Float:
    if isinstance(e, FloatVar):
        return env[e.name]
    if isinstance(e, FloatConst):
        return e.value
    if isinstance(e, FloatOp):
        return fp.exec_op(e.op, [eval_float_arith(a, env, fmt) for a in e.args], fmt)
    raise TypeError(f"not a float arithmetic expression: {e!r}")


def eval_real_arith(e, env: Mapping[str, Fraction]) -> Fraction:
    if isinstance(e, RealVar):
        return env[e.name]
    if isinstance(e, RealConst):
        return e.value
    if isinstance(e, RealOp):
        args = [eval_real_arith(a, env) for a in e.args]
        if e.op == "add":
            return args[0] + args[1]
        if e.op == "sub":
            return args[0] - args[1]
        if e.op == "mul":
            return args[0] * args[1]
        return -args[0]
    raise TypeError(f"not a real arithmetic expression: {e!r}")


def eval_bool(b, env: Mapping, fmt: Format = DOUBLE) -> bool:
    """Evaluate a Boolean of either flavor; ``env`` maps float variable names
    to Floats and real variable names to Fractions."""
    if isinstance(b, Rel):
        if b.is_float:
            s = fp.compare(eval_float_arith(b.lhs, env, fmt), eval_float_arith(b.rhs, env, fmt))
        else:
            d = eval_real_arith(b.lhs, env) - eval_real_arith(b.rhs, env)
            s = (d > 0) - (d < 0)
        return _CMP[b.rel](s)
    if isinstance(b, And):
        return all(eval_bool(a, env, fmt) for a in b.args)
    if isinstance(b, Or):
        return any(eval_bool(a, env, fmt) for a in b.args)
    if isinstance(b, Not):
        return not eval_bool(b.arg, env, fmt)
    if isinstance(b, BoolConst):
        return b.value
    raise TypeError(f"not a Boolean expression: {b!r}")


def _real_bool(b, env: Mapping[str, Fraction]) -> bool:
    """Evaluate the real counterpart of a float guard without building it."""
    if isinstance(b, Rel):
        d = _real_value(b.lhs, env) - _real_value(b.rhs, env)
        return _CMP[b.rel]((d > 0) - (d < 0))
    if isinstance(b, And):
        return all(_real_bool(a, env) for a in b.args)
    if isinstance(b, Or):
        return any(_real_bool(a, env) for a in b.args)
    if isinstance(b, Not):
        return not _real_bool(b.arg, env)
    return b.value


def _real_value(e, env: Mapping[str, Fraction]) -> Fraction:
    """Real counterpart of a float expression, evaluated exactly."""
    if isinstance(e, FloatVar):
        return env[e.name]
    if isinstance(e, FloatConst):
        return fp.to_real(e.value)
    args = [_real_value(a, env) for a in e.args]
    if e.op == "add":
        return args[0] + args[1]
    if e.op == "sub":
        return args[0] - args[1]
    if e.op == "mul":
        return args[0] * args[1]
    return -args[0]


# -- program execution -------------------------------------------------------

def _run(s, env: Dict, value, bool_of) -> Tuple[Output, List[int]]:
    path: List[int] = []
    while True:
        if isinstance(s, Warn):
            return WARNING, path
        if isinstance(s, Let):
            env = dict(env)
            env[s.name] = value(s.expr, env)
            s = s.body
        elif isinstance(s, If):
            taken = bool_of(s.guard, env)
            path.append(0 if taken else 1)
            s = s.then if taken else s.orelse
        elif isinstance(s, IfN):
            for i, (g, body) in enumerate(s.branches):
                if bool_of(g, env):
                    path.append(i)
                    s = body
                    break
            else:
                path.append(len(s.branches))
                s = s.orelse
        else:
            return value(s, env), path


def _bind(p: Program, inputs: Mapping) -> Dict:
    missing = [x for x in p.params if x not in inputs]
    if missing:
        raise KeyError(f"missing input(s): {', '.join(missing)}")
    return {x: inputs[x] for x in p.params}


def eval_float(p: Program, sigma_f: Mapping[str, Float], fmt: Format = DOUBLE):
    """Float output (or ``WARNING``) and the branch trace."""
    return _run(p.body, _bind(p, sigma_f),
                lambda e, env: eval_float_arith(e, env, fmt),
                lambda g, env: eval_bool(g, env, fmt))


def eval_real(p: Program, sigma: Mapping[str, Fraction]):
    """Exact real output (or ``WARNING``) and the branch trace.

    ``sigma`` is keyed by the float parameter names; the real counterpart of
    every expression is evaluated on the fly.
    """
    return _run(p.body, _bind(p, sigma), _real_value, _real_bool)


@dataclass(frozen=True)
class AssignmentPair:
    """Float inputs and their exact values, linked by ``real = R(float)``."""

    floats: Mapping[str, Float]
    reals: Mapping[str, Fraction] = field(default=None)

    def __post_init__(self):
        if self.reals is None:
            object.__setattr__(self, "reals", {k: fp.to_real(v) for k, v in self.floats.items()})
        for k, v in self.floats.items():
            if self.reals.get(k) != fp.to_real(v):
                raise ValueError(f"real value of {k!r} differs from its float value")

    @classmethod
    def from_values(cls, values: Mapping[str, object], fmt: Format = DOUBLE) -> "AssignmentPair":
        floats = {}
        for k, v in values.items():
            if isinstance(v, float):
                floats[k] = fp.from_float(v, fmt)
            else:
                floats[k] = fp.round_nearest(Fraction(v), fmt)
        return cls(floats)

    def real_env(self, chi=real_name) -> Dict[str, Fraction]:
        return {chi(k): v for k, v in self.reals.items()}


@dataclass(frozen=True)
class RunReport:
    float_output: Union[Float, Warn]
    real_output: Union[Fraction, Warn]
    float_path: Tuple[int, ...]
    real_path: Tuple[int, ...]

    @property
    def classification(self) -> str:
        return STABLE if self.float_path == self.real_path else UNSTABLE

    @property
    def unstable(self) -> bool:
        return self.float_path != self.real_path


def classify_run(p: Program, pair: AssignmentPair, fmt: Format = DOUBLE) -> RunReport:
    fout, fpath = eval_float(p, pair.floats, fmt)
    rout, rpath = eval_real(p, pair.reals)
    return RunReport(fout, rout, tuple(fpath), tuple(rpath))


# -- input generation ------------------------------------------------------------

def float_in(iv: Interval, x: Fraction, fmt: Format = DOUBLE) -> Float:
    """Nearest float to ``x`` that still lies inside ``iv``."""
    f = fp.round_nearest(x, fmt)
    v = fp.to_real(f)
    if v < iv.lo:
        f = fp.round_up(iv.lo, fmt)
    elif v > iv.hi:
        f = -fp.round_up(-iv.hi, fmt)
    v = fp.to_real(f)
    if not iv.lo <= v <= iv.hi:
        raise ValueError(f"no {fmt.name or 'format'} float inside {iv}")
    return f


def sample_uniform(params: Sequence[str], ranges: Mapping[str, Interval], rng: random.Random,
                   fmt: Format = DOUBLE) -> Dict[str, Float]:
    out = {}
    for x in params:
        iv = ranges[x]
        t = Fraction(rng.getrandbits(53), 1 << 53)
        out[x] = float_in(iv, iv.lo + (iv.hi - iv.lo) * t, fmt)
    return out


def guard_atoms(p: Program):
    """Arithmetic sides of every relation in the program's guards."""
    seen = {}
    for g in guards(p.body):
        for rel in relations(g):
            for side in (rel.lhs, rel.rhs):
                if not isinstance(side, FloatConst):
                    seen.setdefault(side, None)
    return list(seen)


def _atom_value(atom, p: Program, reals: Mapping[str, Fraction]) -> Fraction:
    env = dict(reals)
    for name, expr in let_bindings(p.body):
        env[name] = _real_value(expr, env)
    return _real_value(atom, env)


def near_root_sample(p: Program, ranges: Mapping[str, Interval], rng: random.Random,
                     fmt: Format = DOUBLE, atoms=None) -> Dict[str, Float]:
    """Uniform sample moved onto a sign change of a random guard atom.

    Bisects along one coordinate over floats until the two neighbouring
    inputs straddle the atom's real zero, then returns one of them.  Falls
    back to the uniform sample if the chosen line has no sign change.
    """
    atoms = guard_atoms(p) if atoms is None else atoms
    point = sample_uniform(p.params, ranges, rng, fmt)
    if not atoms or not p.params:
        return point
    atom = rng.choice(atoms)
    x = rng.choice(p.params)
    iv = ranges[x]

    def value_at(f: Float) -> Fraction:
        reals = {k: fp.to_real(v) for k, v in point.items()}
        reals[x] = fp.to_real(f)
        return _atom_value(atom, p, reals)

    lo, hi = float_in(iv, iv.lo, fmt), float_in(iv, iv.hi, fmt)
    vlo, vhi = value_at(lo), value_at(hi)
    if (vlo > 0) == (vhi > 0):
        return point
    for _ in range(2 * fmt.p + 64):
        mid = fp.round_nearest((fp.to_real(lo) + fp.to_real(hi)) / 2, fmt)
        if mid == lo or mid == hi:
            break
        vmid = value_at(mid)
        if (vmid > 0) == (vlo > 0):
            lo, vlo = mid, vmid
        else:
            hi = mid
    point[x] = lo if rng.random() < 0.5 else hi
    return point


def find_unstable_input(p: Program, ranges: Mapping[str, Interval], budget: int = 2000,
                        seed: int = 0, fmt: Format = DOUBLE) -> Optional[AssignmentPair]:
    """Search for an input whose run is unstable; ``None`` if none is found.

    Alternates uniform samples with samples pinned near real zeros of guard
    atoms, where instability lives.
    """
    rng = random.Random(seed)
    atoms = guard_atoms(p)
    if not atoms:
        return None
    for i in range(budget):
        if i % 4 == 0:
            point = sample_uniform(p.params, ranges, rng, fmt)
        else:
            point = near_root_sample(p, ranges, rng, fmt, atoms)
        pair = AssignmentPair(point)
        try:
            report = classify_run(p, pair, fmt)
        except ArithmeticError:
            continue
        if report.unstable:
            return pair
    return None
