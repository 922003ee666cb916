"""Bundled example programs, their input ranges and a test polygon."""

from __future__ import annotations

from importlib import resources
from typing import Dict

from ..analysis import Interval, parse_ranges
from ..fp import DOUBLE, Format
from ..lang import Program
from ..syntax import parse_program

PROGRAMS = ("eps_line", "winding_number_edge")


def read_text(name: str) -> str:
    return resources.files(__name__).joinpath(name).read_text(encoding="utf-8")


def load_program(name: str, fmt: Format = DOUBLE) -> Program:
    return parse_program(read_text(f"{name}.sfp"), fmt)


def load_ranges(name: str) -> Dict[str, Interval]:
    return parse_ranges(read_text(f"{name}.ranges"))


def polygon_text() -> str:
    return read_text("hexagon.json")
