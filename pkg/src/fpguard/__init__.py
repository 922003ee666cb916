"""Detection and guarding of unstable floating-point conditionals.

A conditional is unstable when rounding makes the float computation take a
different branch than the same computation over the reals would.  This
package provides an exact float model, a round-off error analysis, the
collecting semantics that enumerates stable and unstable paths, and a
program transformation that replaces every potentially unstable decision
with an explicit ``warning`` result.
"""

from .abstraction import beta_minus, beta_plus
from .analysis import Bound, Interval, analyze, analyze_error, parse_ranges
from .errors import (
    FloatOverflow, FpGuardError, MissingRange, ParseError, PreconditionViolated,
    TupleLimitExceeded, UnsupportedGuard,
)
from .fp import DOUBLE, SINGLE, Float, Format, exec_op, round_nearest, to_real
from .interp import AssignmentPair, RunReport, classify_run, eval_float, eval_real, find_unstable_input
from .lang import WARNING, Program
from .refute import is_possibly_sat
from .semantics import ConditionalTuple, semantics
from .syntax import parse_program, print_program
from .transform import transform_program, unreachable_branches

__version__ = "0.1.0"

__all__ = [
    "AssignmentPair", "Bound", "ConditionalTuple", "DOUBLE", "Float", "FloatOverflow",
    "Format", "FpGuardError", "Interval", "MissingRange", "ParseError", "PreconditionViolated",
    "Program", "RunReport", "SINGLE", "TupleLimitExceeded", "UnsupportedGuard", "WARNING",
    "analyze", "analyze_error", "beta_minus", "beta_plus", "classify_run", "eval_float",
    "eval_real", "exec_op", "find_unstable_input", "is_possibly_sat", "parse_program",
    "parse_ranges", "print_program", "round_nearest", "semantics", "to_real",
    "transform_program", "unreachable_branches",
]
