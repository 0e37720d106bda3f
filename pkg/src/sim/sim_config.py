"""
Simulation run description, read from a dotenv-style KEY=VALUE file.

    CALIBRATION_REPORT=calibration.txt
    FRAMES=f1:frames/f1_left.pgm:frames/f1_right.pgm,f2:...
    ANNOTATIONS=annotations.csv
    LABEL_MAP=label_map.csv
    ROUTE_GRAPH=route.csv
    SOURCE_NODE=gate
    DESTINATION=Library

Optional: MIN_CONFIDENCE, WINDOW, D_MIN, D_MAX, UNIQUENESS.
Relative paths resolve against the directory holding the file.
"""

import os
from dataclasses import dataclass, field
from typing import List, Optional

from dotenv import dotenv_values

from src.errors import ConfigError
from src.models import MatchParams

REQUIRED_KEYS = ("CALIBRATION_REPORT", "FRAMES", "ANNOTATIONS", "LABEL_MAP", "ROUTE_GRAPH", "SOURCE_NODE", "DESTINATION")


@dataclass(frozen=True)
class FramePair:
    frame_id: str
    left: str
    right: str


@dataclass
class SimulationConfig:
    calibration_report: str
    frames: List[FramePair]
    annotations: str
    label_map: str
    route_graph: str
    source_node: str
    destination: str
    min_confidence: Optional[float] = None
    match: MatchParams = field(default_factory=MatchParams)

    def paths(self) -> List[str]:
        files = [self.calibration_report, self.annotations, self.label_map, self.route_graph]
        for pair in self.frames:
            files += [pair.left, pair.right]
        return files


def _resolve(base_dir: str, path: str) -> str:
    return path if os.path.isabs(path) else os.path.normpath(os.path.join(base_dir, path))


def _parse_frames(text: str, base_dir: str, problems: List[str]) -> List[FramePair]:
    frames = []
    for item in (part.strip() for part in text.split(",")):
        if not item:
            continue
        pieces = [p.strip() for p in item.split(":")]
        if len(pieces) != 3 or not all(pieces):
            problems.append(f"FRAMES entry {item!r} (expected frame_id:left.pgm:right.pgm)")
            continue
        frames.append(FramePair(pieces[0], _resolve(base_dir, pieces[1]), _resolve(base_dir, pieces[2])))
    if not frames and not problems:
        problems.append("FRAMES lists no frame pairs")
    return frames


def _number(values: dict, key: str, kind, problems: List[str]):
    raw = values.get(key)
    if raw is None or raw.strip() == "":
        return None
    try:
        return kind(raw)
    except ValueError:
        problems.append(f"{key}={raw} (not a valid {kind.__name__})")
        return None


def load_simulation_config(path: str) -> SimulationConfig:
    """Read and check a simulation file; every referenced file must exist."""
    if not os.path.isfile(path):
        raise ConfigError(f"simulation config {path} does not exist")
    values = {k: (v or "").strip() for k, v in dotenv_values(path).items()}
    base_dir = os.path.dirname(os.path.abspath(path))

    problems = [f"{key} (missing)" for key in REQUIRED_KEYS if not values.get(key)]
    frames = _parse_frames(values.get("FRAMES", ""), base_dir, problems) if values.get("FRAMES") else []

    min_confidence = _number(values, "MIN_CONFIDENCE", float, problems)
    if min_confidence is not None and not 0 <= min_confidence <= 1:
        problems.append(f"MIN_CONFIDENCE={min_confidence} (must be in [0, 1])")
    defaults = MatchParams()
    window = _number(values, "WINDOW", int, problems)
    d_min = _number(values, "D_MIN", int, problems)
    d_max = _number(values, "D_MAX", int, problems)
    ratio = _number(values, "UNIQUENESS", float, problems)
    match = defaults
    try:
        match = MatchParams(
            window=defaults.window if window is None else window,
            d_min=defaults.d_min if d_min is None else d_min,
            d_max=defaults.d_max if d_max is None else d_max,
            uniqueness_ratio=defaults.uniqueness_ratio if ratio is None else ratio,
        )
    except ValueError as e:
        problems.append(f"matching parameters ({e})")

    if problems:
        raise _config_error(path, problems)

    cfg = SimulationConfig(
        calibration_report=_resolve(base_dir, values["CALIBRATION_REPORT"]),
        frames=frames,
        annotations=_resolve(base_dir, values["ANNOTATIONS"]),
        label_map=_resolve(base_dir, values["LABEL_MAP"]),
        route_graph=_resolve(base_dir, values["ROUTE_GRAPH"]),
        source_node=values["SOURCE_NODE"],
        destination=values["DESTINATION"],
        min_confidence=min_confidence,
        match=match,
    )
    missing = [p for p in cfg.paths() if not os.path.isfile(p)]
    if missing:
        raise _config_error(path, [f"{p} (file not found)" for p in missing])
    return cfg


def _config_error(path: str, problems: List[str]) -> ConfigError:
    return ConfigError(
        f"\n{'=' * 60}\n"
        f"SIMULATION CONFIG ERROR - {path}\n"
        f"{'=' * 60}\n"
        + "\n".join(f"  - {p}" for p in problems)
        + f"\n{'=' * 60}"
    )
