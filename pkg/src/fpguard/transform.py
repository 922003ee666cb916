"""Program transformation that turns unstable conditionals into warnings.

Every conditional is rewritten into an ``if/elsif`` chain whose guards are
the ``beta_plus`` / ``beta_minus`` abstractions of the original guards, with a
trailing ``else warning``.  A branch of the result is taken only when the
float and the real computation of the original program agree on it.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional

from .abstraction import atom_errors, beta_minus, beta_plus, sign_test
from .analysis import LetEnv, RangeEnv, analyze
from .errors import PreconditionViolated
from .fp import DOUBLE, Format
from .lang import (
    TRUE, And, If, IfN, Let, Not, Program, Rel, Warn, WARNING, conj, contains_warning,
    guards, relations, walk,
)
from .refute import _as_bound, is_possibly_sat

_UPPER = ("lt", "le")
_LOWER = ("gt", "ge")


def _implies(a: Rel, b: Rel) -> bool:
    """Does the sign-shifted test ``a`` imply ``b`` (same atom, both bounds)?"""
    ka, ra, ca = _as_bound(a)
    kb, rb, cb = _as_bound(b)
    if ka != kb or ra == "eq" or rb == "eq":
        return False
    if ra in _UPPER and rb in _UPPER:
        return ca < cb or (ca == cb and (ra == "lt" or rb == "le"))
    if ra in _LOWER and rb in _LOWER:
        return ca > cb or (ca == cb and (ra == "gt" or rb == "ge"))
    return False


def simplify_conjunction(g):
    """Drop top-level relational conjuncts implied by another conjunct."""
    if not isinstance(g, And):
        return g
    parts = list(g.args)
    keep: List = []
    for i, p in enumerate(parts):
        if isinstance(p, Rel):
            redundant = any(
                isinstance(q, Rel) and _implies(q, p) and (not _implies(p, q) or j < i)
                for j, q in enumerate(parts) if j != i
            )
            if redundant:
                continue
        keep.append(p)
    return keep[0] if len(keep) == 1 else And(tuple(keep))


def _errors(phis, ranges: RangeEnv, fmt: Format, lets: LetEnv) -> Dict[object, Fraction]:
    errs: Dict[object, Fraction] = {}
    for phi in phis:
        errs.update(atom_errors(phi, ranges, fmt, lets))
    return errs


def transformed_guards(phis, ranges: RangeEnv, fmt: Format = DOUBLE,
                       lets: Optional[LetEnv] = None):
    """Guards of the rewritten chain for original guards ``phis``.

    Returns ``n + 1`` guards for ``n`` original ones: guard ``i`` is
    ``beta_plus(phi_i)`` conjoined with ``beta_minus`` of every earlier guard
    (latest first); the last guard selects the original ``else`` branch.
    """
    lets = lets or {}
    errs = _errors(phis, ranges, fmt, lets)
    minus = [beta_minus(phi, errs, fmt) for phi in phis]
    out = []
    for i, phi in enumerate(phis):
        plus = beta_plus(phi, errs, fmt)
        earlier = minus[:i][::-1]
        out.append(simplify_conjunction(And((plus, *earlier))) if earlier else plus)
    rest = minus[::-1]
    out.append(simplify_conjunction(And(tuple(rest))) if len(rest) > 1 else rest[0])
    return out


def _tau(s, ranges: RangeEnv, fmt: Format, lets: LetEnv):
    if isinstance(s, Let):
        inner = dict(lets)
        inner[s.name] = analyze(s.expr, ranges, fmt, lets)
        return Let(s.name, s.expr, _tau(s.body, ranges, fmt, inner))
    if isinstance(s, If):
        phis, bodies = [s.guard], [s.then, s.orelse]
    elif isinstance(s, IfN):
        phis, bodies = list(s.guards), list(s.bodies)
    else:
        return s
    new_guards = transformed_guards(phis, ranges, fmt, lets)
    new_bodies = [_tau(b, ranges, fmt, lets) for b in bodies]
    return IfN(tuple(zip(new_guards, new_bodies)), WARNING)


def transform_stmt(s, ranges: RangeEnv, fmt: Format = DOUBLE, lets: Optional[LetEnv] = None):
    if contains_warning(s):
        raise PreconditionViolated("input already contains a warning statement")
    for g in guards(s):
        _check_sign_tests(g)
    return _tau(s, ranges, fmt, dict(lets or {}))


def _check_sign_tests(g):
    for rel in relations(g):
        sign_test(rel)


def transform_program(p: Program, ranges: RangeEnv, fmt: Format = DOUBLE) -> Program:
    """Rewrite ``p`` so that it returns ``warning`` wherever a conditional
    might be unstable under the given input ranges."""
    return Program(p.name, p.params, transform_stmt(p.body, ranges, fmt))


# -- dead branch diagnostics -----------------------------------------------

class BranchRef(NamedTuple):
    """Branch ``branch`` (0-based, ``else`` last) of the ``conditional``-th
    conditional in pre-order."""

    conditional: int
    branch: int


def unreachable_branches(p: Program, ranges: RangeEnv, fmt: Format = DOUBLE) -> List[BranchRef]:
    """Branches whose float path condition is refuted under ``ranges``.

    The check is conservative: a listed branch can never be taken, while
    an unlisted one may still be dead.
    """
    out: List[BranchRef] = []
    counter = [0]

    def visit(s, path, lets):
        if isinstance(s, Let):
            inner = dict(lets)
            try:
                inner[s.name] = analyze(s.expr, ranges, fmt, lets)
            except (KeyError, ArithmeticError):
                pass
            visit(s.body, path, inner)
            return
        if isinstance(s, If):
            branches = [(s.guard, s.then), (TRUE, s.orelse)]
        elif isinstance(s, IfN):
            branches = list(s.branches) + [(TRUE, s.orelse)]
        else:
            return
        index = counter[0]
        counter[0] += 1
        earlier = []
        for k, (g, body) in enumerate(branches):
            cond = conj(path, g, *earlier)
            if not is_possibly_sat(TRUE, cond, ranges, lets=lets, fmt=fmt):
                out.append(BranchRef(index, k))
                counter[0] += sum(isinstance(n, (If, IfN)) for n in walk(body))
            else:
                visit(body, cond, lets)
            earlier.append(Not(g))

    visit(p.body, TRUE, {})
    return out


def is_transformed_shape(s) -> bool:
    """Every conditional is an ``if/elsif`` chain ending in ``else warning``."""
    for node in walk(s):
        if isinstance(node, If):
            return False
        if isinstance(node, IfN) and not isinstance(node.orelse, Warn):
            return False
    return True

