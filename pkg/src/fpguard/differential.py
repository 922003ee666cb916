"""Differential check of a program against its transformed version.

On every sampled input the transformed program must either warn, or return
exactly what the original float program returns on a run that follows the
same path as the real computation.  Inputs on which the original run is
unstable must produce a warning.
"""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass, field
from typing import List, Mapping, Optional

from . import fp
from .analysis import Interval
from .fp import DOUBLE, Format
from .interp import (
    AssignmentPair, classify_run, eval_float, guard_atoms, near_root_sample, sample_uniform,
)
from .lang import Program, Warn
from .transform import transform_program


@dataclass
class CheckReport:
    runs: int = 0
    warnings: int = 0
    unstable: int = 0
    overflows: int = 0
    # non-warning output that differs from the original float output
    wrong_output: int = 0
    # unstable original run that the transformed program did not flag
    missed_unstable: int = 0
    # runs with at least one of the two failures above
    violations: int = 0
    examples: List[dict] = field(default_factory=list)

    def merge(self, other: "CheckReport") -> "CheckReport":
        out = CheckReport()
        for name in ("runs", "warnings", "unstable", "overflows", "wrong_output",
                     "missed_unstable", "violations"):
            setattr(out, name, getattr(self, name) + getattr(other, name))
        out.examples = (self.examples + other.examples)[:5]
        return out

    def as_dict(self) -> dict:
        return asdict(self)

    def summary(self) -> str:
        return (f"{self.runs} runs, {self.unstable} unstable, {self.warnings} warnings, "
                f"{self.violations} violations")


def check_pair(original: Program, transformed: Program, pair: AssignmentPair,
               report: CheckReport, fmt: Format = DOUBLE) -> None:
    """Run one input through both programs and record the outcome."""
    try:
        run = classify_run(original, pair, fmt)
        t_out, _ = eval_float(transformed, pair.floats, fmt)
    except ArithmeticError:
        report.overflows += 1
        return
    report.runs += 1
    report.unstable += run.unstable
    if isinstance(t_out, Warn):
        report.warnings += 1
        return
    wrong = t_out != run.float_output
    report.wrong_output += wrong
    report.missed_unstable += run.unstable
    if wrong or run.unstable:
        report.violations += 1
        if len(report.examples) < 5:
            report.examples.append({k: str(fp.to_float(v)) for k, v in pair.floats.items()})


def differential_check(p: Program, ranges: Mapping[str, Interval], trials: int,
                       seed: int = 0, fmt: Format = DOUBLE,
                       transformed: Optional[Program] = None) -> CheckReport:
    """Compare ``p`` with its transformation on ``trials`` sampled inputs.

    Half of the inputs are uniform over the ranges; the other half sit next
    to a real zero of a guard atom, where unstable runs live.
    """
    transformed = transformed or transform_program(p, ranges, fmt)
    rng = random.Random(seed)
    atoms = guard_atoms(p)
    report = CheckReport()
    for i in range(trials):
        if i % 2 == 0 or not atoms:
            point = sample_uniform(p.params, ranges, rng, fmt)
        else:
            point = near_root_sample(p, ranges, rng, fmt, atoms)
        check_pair(p, transformed, AssignmentPair(point), report, fmt)
    return report
