"""Point-in-polygon by summed edge contributions, and the near-edge experiment.

Each edge contributes the quarter turns made by the edge as seen from the
query point (``winding_number_edge`` in the corpus).  A simple polygon that
winds once around the point sums to 4 (or -4 when given clockwise); a point
outside sums to 0.

The experiment samples points at fixed distances from the polygon's edges and
compares three evaluations of every edge: the original program in floating
point, the original program over the reals, and the transformed program in
floating point.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from . import fp
from .analysis import Interval
from .fp import DOUBLE, FORMATS, Float, Format
from .interp import AssignmentPair, classify_run, eval_float, eval_real
from .lang import WARNING, Program, Warn
from .transform import transform_program

INSIDE = "inside"
OUTSIDE = "outside"
WARN = "warning"

MODES = ("original-float", "real", "transformed-float")

Point = Tuple[Float, Float]


@dataclass(frozen=True)
class Polygon:
    """Simple polygon given by its vertices in order; the last edge closes it."""

    vertices: Tuple[Point, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(tuple(v) for v in self.vertices))
        if len(self.vertices) < 3:
            raise ValueError("a polygon needs at least 3 vertices")
        if not is_simple(self.exact_vertices()):
            raise ValueError("polygon is not simple")

    @classmethod
    def from_json(cls, text: str, fmt: Format = DOUBLE) -> "Polygon":
        """Parse ``[[x, y], ...]`` with decimal-string (or number) coordinates."""
        raw = json.loads(text)
        verts = []
        for pair in raw:
            if len(pair) != 2:
                raise ValueError("each vertex must be an [x, y] pair")
            verts.append(tuple(fp.round_nearest(Fraction(str(c)), fmt) for c in pair))
        return cls(tuple(verts))

    def exact_vertices(self) -> List[Tuple[Fraction, Fraction]]:
        return [(fp.to_real(x), fp.to_real(y)) for x, y in self.vertices]

    def edges(self):
        n = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def bounding_box(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        pts = self.exact_vertices()
        xs = [x for x, _ in pts]
        ys = [y for _, y in pts]
        return min(xs), min(ys), max(xs), max(ys)

    @property
    def scale(self) -> Fraction:
        """Half the side of the square circumscribing the polygon."""
        x0, y0, x1, y1 = self.bounding_box()
        return max(x1 - x0, y1 - y0) / 2

    def square(self, margin: Fraction = Fraction(0)) -> Tuple[Fraction, Fraction, Fraction]:
        """Center and half side of the circumscribing square, widened by ``margin``."""
        x0, y0, x1, y1 = self.bounding_box()
        return (x0 + x1) / 2, (y0 + y1) / 2, self.scale + margin


def _orient(a, b, c) -> int:
    d = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (d > 0) - (d < 0)


def _on_segment(a, b, c) -> bool:
    return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])


def segments_intersect(a, b, c, d) -> bool:
    o1, o2, o3, o4 = _orient(a, b, c), _orient(a, b, d), _orient(c, d, a), _orient(c, d, b)
    if o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4):
        return True
    return ((o1 == 0 and _on_segment(a, b, c)) or (o2 == 0 and _on_segment(a, b, d))
            or (o3 == 0 and _on_segment(c, d, a)) or (o4 == 0 and _on_segment(c, d, b)))


def _folds_back(a, b, c) -> bool:
    """Consecutive edges a-b and b-c overlap beyond their shared vertex."""
    if _orient(a, b, c) != 0:
        return False
    return (a[0] - b[0]) * (c[0] - b[0]) + (a[1] - b[1]) * (c[1] - b[1]) > 0


def is_simple(pts) -> bool:
    """Brute-force check: only consecutive edges meet, and only at their shared vertex."""
    n = len(pts)
    if len(set(pts)) != n:
        return False
    for i in range(n):
        if _folds_back(pts[i - 1], pts[i], pts[(i + 1) % n]):
            return False
    edges = [(pts[i], pts[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            if segments_intersect(*edges[i], *edges[j]):
                return False
    return _signed_area(pts) != 0


def _signed_area(pts) -> Fraction:
    n = len(pts)
    return sum(pts[i][0] * pts[(i + 1) % n][1] - pts[(i + 1) % n][0] * pts[i][1] for i in range(n)) / 2


def contains_exact(poly: Polygon, p: Tuple[Fraction, Fraction]) -> bool:
    """Ray casting in exact arithmetic (points on the boundary are unspecified)."""
    inside = False
    pts = poly.exact_vertices()
    px, py = p
    for i in range(len(pts)):
        (x1, y1), (x2, y2) = pts[i], pts[(i + 1) % len(pts)]
        if (y1 > py) != (y2 > py):
            x_cross = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < x_cross:
                inside = not inside
    return inside


# -- winding number over the corpus edge function ----------------------------

def edge_program(fmt: Format = DOUBLE) -> Program:
    from .corpus import load_program

    return load_program("winding_number_edge", fmt)


def edge_ranges(poly: Polygon, margin: Fraction) -> Dict[str, Interval]:
    """Ranges of the edge function's inputs: the circumscribing square of
    ``poly`` widened by ``margin`` on every side, for every coordinate."""
    cx, cy, half = poly.square(margin)
    xs = Interval(cx - half, cx + half)
    ys = Interval(cy - half, cy + half)
    return {"vx": xs, "vy": ys, "wx": xs, "wy": ys, "px": xs, "py": ys}


def verdict(total: int) -> str:
    return INSIDE if total in (4, -4) else OUTSIDE


def _edge_inputs(v: Point, w: Point, p: Point) -> Dict[str, Float]:
    return {"vx": v[0], "vy": v[1], "wx": w[0], "wy": w[1], "px": p[0], "py": p[1]}


def _as_int(out) -> int:
    value = fp.to_real(out) if isinstance(out, Float) else out
    if value.denominator != 1:
        raise ValueError(f"edge contribution {value} is not an integer")
    return int(value)


def winding_number(poly: Polygon, p: Point, mode: str, fmt: Format = DOUBLE,
                   transformed: Optional[Program] = None) -> str:
    """Containment verdict for ``p`` under one evaluation ``mode``.

    ``transformed`` is the transformed edge program (required for the
    ``transformed-float`` mode); any edge returning ``warning`` turns the
    verdict into ``"warning"``.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    prog = edge_program(fmt)
    if mode == "transformed-float":
        if transformed is None:
            raise ValueError("transformed-float mode needs the transformed program")
        prog = transformed
    total = 0
    for v, w in poly.edges():
        inputs = _edge_inputs(v, w, p)
        if mode == "real":
            out, _ = eval_real(prog, {k: fp.to_real(f) for k, f in inputs.items()})
        else:
            out, _ = eval_float(prog, inputs, fmt)
        if isinstance(out, Warn):
            return WARN
        total += _as_int(out)
    return verdict(total)


# -- the experiment -------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    polygon: Polygon
    points: int = 10_000
    distances: Tuple[float, ...] = (1.0, 1e-8, 1e-10, 1e-12)
    seed: int = 0
    format: str = "double"

    def __post_init__(self):
        object.__setattr__(self, "distances", tuple(self.distances))
        if self.points <= 0:
            raise ValueError("point count must be positive")
        if not self.distances or any(d <= 0 for d in self.distances):
            raise ValueError("distances must be positive")
        if any(a <= b for a, b in zip(self.distances, self.distances[1:])):
            raise ValueError("distances must be strictly decreasing")
        if self.format not in FORMATS:
            raise ValueError(f"unknown format {self.format!r}")

    @property
    def fmt(self) -> Format:
        return FORMATS[self.format]


@dataclass
class BandReport:
    distance: float
    points: int = 0
    agreements: int = 0
    warnings: int = 0
    true_warnings: int = 0
    false_warnings: int = 0
    unstable_runs: int = 0
    unsound: int = 0

    @property
    def warning_rate(self) -> float:
        return self.warnings / self.points if self.points else 0.0

    @property
    def false_warning_fraction(self) -> Optional[float]:
        return self.false_warnings / self.warnings if self.warnings else None

    def as_dict(self) -> dict:
        d = asdict(self)
        d["warning_rate"] = self.warning_rate
        d["false_warning_fraction"] = self.false_warning_fraction
        return d


@dataclass
class ExperimentReport:
    format: str
    seed: int
    scale: float
    bands: List[BandReport] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"format": self.format, "seed": self.seed, "scale": self.scale,
                "bands": [b.as_dict() for b in self.bands]}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)


def sample_near_edge(poly: Polygon, distance: Fraction, rng: random.Random,
                     fmt: Format = DOUBLE) -> Point:
    """Point at ``distance`` from a random edge, on a random side of it.

    The foot of the offset is uniform along the edge; the exact target is
    rounded to the format, which moves it by at most half an ulp per
    coordinate.
    """
    pts = poly.exact_vertices()
    i = rng.randrange(len(pts))
    (x1, y1), (x2, y2) = pts[i], pts[(i + 1) % len(pts)]
    t = Fraction(rng.getrandbits(53), 1 << 53)
    dx, dy = x2 - x1, y2 - y1
    length = Fraction(math.hypot(float(dx), float(dy)))
    side = 1 if rng.random() < 0.5 else -1
    ox = -dy / length * distance * side
    oy = dx / length * distance * side
    return (fp.round_nearest(x1 + t * dx + ox, fmt), fp.round_nearest(y1 + t * dy + oy, fmt))


@lru_cache(maxsize=8)
def _programs(poly: Polygon, margin: Fraction, fmt: Format):
    original = edge_program(fmt)
    return original, transform_program(original, edge_ranges(poly, margin), fmt)


def evaluate_point(poly: Polygon, p: Point, original: Program, transformed: Program,
                   fmt: Format = DOUBLE):
    """Verdicts of the three modes at ``p`` and whether any original edge run
    was unstable."""
    totals = {"original-float": 0, "real": 0}
    transformed_total: Optional[int] = 0
    unstable = False
    for v, w in poly.edges():
        pair = AssignmentPair(_edge_inputs(v, w, p))
        report = classify_run(original, pair, fmt)
        unstable = unstable or report.unstable
        totals["original-float"] += _as_int(report.float_output)
        totals["real"] += _as_int(report.real_output)
        if transformed_total is not None:
            out, _ = eval_float(transformed, pair.floats, fmt)
            transformed_total = None if out is WARNING else transformed_total + _as_int(out)
    return (verdict(totals["original-float"]), verdict(totals["real"]),
            WARN if transformed_total is None else verdict(transformed_total), unstable)


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Per distance band: how often the transformed program warns, and how
    many of those warnings flag a run that really was unstable."""
    fmt = cfg.fmt
    poly = cfg.polygon
    scale = poly.scale
    margin = Fraction(max(cfg.distances)) * scale * 2
    original, transformed = _programs(poly, margin, fmt)
    report = ExperimentReport(cfg.format, cfg.seed, float(scale))
    for k, d in enumerate(cfg.distances):
        band = BandReport(distance=d)
        rng = random.Random(cfg.seed * 1_000_003 + k)
        dist = Fraction(d) * scale
        for _ in range(cfg.points):
            p = sample_near_edge(poly, dist, rng, fmt)
            f, r, t, unstable = evaluate_point(poly, p, original, transformed, fmt)
            band.points += 1
            band.unstable_runs += unstable
            if t == WARN:
                band.warnings += 1
                if unstable:
                    band.true_warnings += 1
                else:
                    band.false_warnings += 1
            else:
                band.unsound += t != r
                band.agreements += f == r == t
        report.bands.append(band)
    return report
