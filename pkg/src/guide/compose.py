"""
Guidance sentences in the fixed spoken template:

    Head <instruction> but beware there is <label> is at <n> feet and <label> is at <n> feet ...

The clause wording is kept exactly as users hear it; do not "fix" its grammar.
"""

import math
from dataclasses import dataclass
from typing import List, Optional

from src import config
from src.errors import NegativeDistance
from src.models import ObjectReport, RouteStep

FEET_PER_METER = 3.28084
BEWARE = " but beware there is "
CLAUSE_JOIN = " and "


@dataclass(frozen=True)
class GuidanceMessage:
    text: str
    speaking_rate: float = 0.8

    def __post_init__(self):
        if not self.text:
            raise ValueError("guidance text must not be empty")
        if not 0 < self.speaking_rate <= 1:
            raise ValueError(f"speaking rate must be in (0, 1], got {self.speaking_rate}")

    def render(self) -> str:
        return f"SPEAK[rate={self.speaking_rate:g}]: {self.text}"


def meters_to_feet(m: float) -> int:
    """Whole feet, halves rounded away from zero."""
    if m < 0:
        raise NegativeDistance(f"distance {m} m is negative")
    return int(math.floor(m * FEET_PER_METER + 0.5))


def instruction_slot(step: RouteStep) -> str:
    """The part of a route step that follows "Head " in the template."""
    text = step.text.strip()
    if text.startswith("Head "):
        return text[len("Head "):]
    return text[:1].lower() + text[1:]


def _clause(report: ObjectReport) -> str:
    if report.distance is None:
        return f"{report.label} is at unknown distance"
    return f"{report.label} is at {meters_to_feet(report.distance)} feet"


def _ordered(reports: List[ObjectReport]) -> List[ObjectReport]:
    known = sorted((r for r in reports if r.distance_known), key=lambda r: (r.distance, r.label))
    unknown = sorted((r for r in reports if not r.distance_known), key=lambda r: r.label)
    return known + unknown


def compose_guidance(step: RouteStep, reports: List[ObjectReport],
                     speaking_rate: Optional[float] = None) -> GuidanceMessage:
    text = f"Head {instruction_slot(step)}"
    if reports:
        text += BEWARE + CLAUSE_JOIN.join(_clause(r) for r in _ordered(reports))
    rate = config.SPEAKING_RATE if speaking_rate is None else speaking_rate
    return GuidanceMessage(text, rate)
