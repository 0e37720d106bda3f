"""
Companion-device session: the Give Input, Navigation and Speak Input buttons.

Give Input stores the destination the user asked for in a small JSON file;
Navigation turns it into route steps; Speak Input turns incoming report frames
into spoken guidance lines, one route step per batch.
"""

import json
import logging
import os
from datetime import datetime
from typing import Callable, Iterable, List, Optional

from src.errors import ConfigError
from src.guide.compose import compose_guidance
from src.models import LabelMap, RouteStep
from src.route.graph import RouteGraph
from src.route.instructions import generate_instructions
from src.route.planner import geocode, shortest_path
from src.wire.codec import FrameKind, WireFrame, batch_to_reports, decode_batch

logger = logging.getLogger(__name__)

DEFAULT_SESSION_PATH = ".guide_session.json"
BEEP_LINE = "BEEP"
DESTINATION_PROMPT = "Where would you like to go? "


def looks_like_place(value: str) -> bool:
    """Destinations are names: at least one letter, no commas or line breaks."""
    return any(c.isalpha() for c in value) and "," not in value and "\n" not in value


def place_names(graph: RouteGraph) -> List[str]:
    return sorted({node.name for node in graph.nodes.values() if node.name})


def match_place(value: str, known_places: Iterable[str]) -> Optional[str]:
    """Spelling of `value` as stored in `known_places` (case-insensitive), or None."""
    wanted = value.strip().casefold()
    for place in known_places:
        if place.casefold() == wanted:
            return place
    return None


def ask_destination(known_places: Optional[List[str]] = None,
                    input_fn: Optional[Callable[[str], str]] = None) -> str:
    """
    Ask until the user names a destination.

    Blank answers and answers that are not place names are asked again. When
    `known_places` is given the answer must be one of them, and the stored
    spelling is returned.
    """
    ask = input_fn or input
    while True:
        value = ask(DESTINATION_PROMPT).strip()

        if not value:
            print("⚠ Please say where you would like to go.")
            continue

        if not looks_like_place(value):
            print(f"⚠ {value!r} is not a place name. Please try again.")
            continue

        if known_places:
            place = match_place(value, known_places)
            if place is None:
                print(f"⚠ No place called {value!r} on the map. Known places: {', '.join(known_places)}")
                continue
            return place

        return value


def save_destination(destination: str, path: str = DEFAULT_SESSION_PATH):
    session = {
        "destination": destination,
        "updated_at": datetime.now().strftime("%H:%M, %d.%m.%Y"),
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(session, f, indent=2)
    logger.info("✓ Destination %r saved to %s", destination, path)


def load_destination(path: str = DEFAULT_SESSION_PATH) -> str:
    if not os.path.isfile(path):
        raise ConfigError(f"no destination set yet ({path} missing); run give-input first")
    try:
        with open(path, encoding="utf-8") as f:
            session = json.load(f)
        destination = session["destination"]
    except (ValueError, KeyError, TypeError) as e:
        raise ConfigError(f"session file {path} is unreadable: {e}")
    if not isinstance(destination, str) or not destination.strip():
        raise ConfigError(f"session file {path} holds no destination")
    return destination


def plan_route(graph: RouteGraph, source: str, destination: str) -> List[RouteStep]:
    """Route steps from node `source` to the place named `destination`; raises RouteError."""
    if source not in graph.nodes:
        raise ConfigError(f"start node {source!r} is not in the route graph")
    target = geocode(graph, destination)
    path, length = shortest_path(graph, source, target)
    logger.info("✓ Route to %s: %d nodes, %.1f m", destination, len(path), length)
    return generate_instructions(graph, path)


class SpeakInput:
    """Frame handler printing one guidance line per report batch and BEEP for beep frames."""

    def __init__(self, steps: List[RouteStep], label_map: LabelMap, speaking_rate: Optional[float] = None,
                 emit: Callable[[str], None] = print):
        if not steps:
            raise ValueError("need at least one route step")
        self.steps = steps
        self.label_map = label_map
        self.speaking_rate = speaking_rate
        self.emit = emit
        self.batches = 0
        self.beeps = 0

    def __call__(self, frame: WireFrame):
        if frame.kind == FrameKind.HEARTBEAT:
            logger.debug("heartbeat")
            return
        if frame.kind == FrameKind.BEEP:
            self.beeps += 1
            self.emit(BEEP_LINE)
            return
        reports = batch_to_reports(decode_batch(frame.payload), self.label_map)
        step = self.steps[min(self.batches, len(self.steps) - 1)]
        self.batches += 1
        self.emit(compose_guidance(step, reports, self.speaking_rate).render())
