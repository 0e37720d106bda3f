from typing import List

from src.models import RouteStep
from src.route.graph import RouteGraph, initial_bearing

COMPASS = ("north", "northeast", "east", "southeast", "south", "southwest", "west", "northwest")
TURN_THRESHOLD_DEGREES = 30.0
UNNAMED_WAY = "unnamed way"


def compass_sector(bearing: float) -> str:
    return COMPASS[int(((bearing % 360.0) + 22.5) // 45.0) % 8]


def signed_turn(from_bearing: float, to_bearing: float) -> float:
    """Heading change in (-180, 180]; positive turns clockwise (right)."""
    return ((to_bearing - from_bearing + 540.0) % 360.0) - 180.0


def _merge_continues(steps: List[RouteStep], ways: List[str]) -> List[RouteStep]:
    merged, merged_ways = [steps[0]], [ways[0]]
    for step, way in zip(steps[1:], ways[1:]):
        prev = merged[-1]
        if step.text.startswith("Continue on ") and way == merged_ways[-1]:
            merged[-1] = RouteStep(prev.text, prev.distance_m + step.distance_m, prev.bearing)
            continue
        merged.append(step)
        merged_ways.append(way)
    return merged


def generate_instructions(graph: RouteGraph, path: List[str], merge_continues: bool = False) -> List[RouteStep]:
    """
    Turn-by-turn steps along `path`: one per edge plus the arrival step.

    With merge_continues, a "Continue on" step is folded into the preceding
    step when both follow the same way.
    """
    if not path:
        raise ValueError("cannot describe an empty path")

    steps: List[RouteStep] = []
    ways: List[str] = []
    previous_bearing = 0.0
    for i, (a, b) in enumerate(zip(path, path[1:])):
        na, nb = graph.nodes[a], graph.nodes[b]
        edge = graph.edge_between(a, b)
        way = edge.way or UNNAMED_WAY
        bearing = initial_bearing(na.lat, na.lon, nb.lat, nb.lon)
        if i == 0:
            text = f"Head {compass_sector(bearing)} on {way}"
        else:
            delta = signed_turn(previous_bearing, bearing)
            if delta > TURN_THRESHOLD_DEGREES:
                text = f"Turn right onto {way}"
            elif delta < -TURN_THRESHOLD_DEGREES:
                text = f"Turn left onto {way}"
            else:
                text = f"Continue on {way}"
        steps.append(RouteStep(text, edge.length_m, bearing))
        ways.append(way)
        previous_bearing = bearing

    if merge_continues and steps:
        steps = _merge_continues(steps, ways)
    steps.append(RouteStep(f"You have arrived at {graph.display_name(path[-1])}", 0.0, previous_bearing))
    return steps
