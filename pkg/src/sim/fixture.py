"""
Three-frame demo scenario written to disk: rendered stereo frames, annotations,
label map, route graph, calibration report and the simulation file tying them together.
"""

import logging
import os
import shutil
from typing import Dict, List

import numpy as np

from src.calib.report import format_stereo_report
from src.calib.stereo_calib import StereoCalibration
from src.media_io.annotations import DEFAULT_LABEL_MAP_PATH, format_annotation_csv
from src.media_io.pgm import write_pgm
from src.models import AnnotationSet, BBox, CameraIntrinsics, Detection, StereoRig
from src.route.graph import RouteGraph, RouteNode, format_route_graph
from src.sim.scene import SceneLayer, inset_box, render_layered_scene

logger = logging.getLogger(__name__)

FRAME_WIDTH = 240
FRAME_HEIGHT = 120
BACKGROUND_DISPARITY = 4
BOX_MARGIN = 6
D_MAX = 40

# (label, layer box, disparity, confidence) per frame
DEMO_FRAMES: Dict[str, List[tuple]] = {
    "f1": [("chair", BBox(100, 30, 70, 60), 20, 0.97)],
    "f2": [("person", BBox(60, 20, 50, 80), 30, 0.91), ("chair", BBox(150, 30, 60, 60), 15, 0.88)],
    "f3": [("dog", BBox(120, 40, 50, 40), 25, 0.30)],
}

DEMO_TRANSCRIPT = [
    "SPEAK[rate=0.8]: Head north on Main Way but beware there is chair is at 10 feet",
    "SPEAK[rate=0.8]: Head turn right onto Library Road but beware there is person is at 7 feet and chair is at 13 feet",
    "SPEAK[rate=0.8]: Head continue on Library Road",
]


def demo_rig() -> StereoRig:
    """fx = 600 px and a 0.1 m baseline: b * fx = 60, so disparity 20 sits at 3 m."""
    intr = CameraIntrinsics(600.0, 600.0, FRAME_WIDTH / 2, FRAME_HEIGHT / 2, 0.003)
    return StereoRig(intr, intr, np.zeros(3), np.array([-0.1, 0.0, 0.0]))


def demo_route_graph() -> RouteGraph:
    graph = RouteGraph()
    graph.add_node(RouteNode("gate", "Main Gate", 40.0, -75.0))
    graph.add_node(RouteNode("junction", None, 40.001, -75.0))
    graph.add_node(RouteNode("corner", None, 40.001, -74.999))
    graph.add_node(RouteNode("library", "Library", 40.001, -74.998))
    graph.add_edge("gate", "junction", "Main Way")
    graph.add_edge("junction", "corner", "Library Road")
    graph.add_edge("corner", "library", "Library Road")
    return graph


def build_demo_fixture(directory: str) -> str:
    """Write the scenario under `directory`; returns the simulation file path."""
    frames_dir = os.path.join(directory, "frames")
    os.makedirs(frames_dir, exist_ok=True)

    entries = {}
    frame_specs = []
    for seed, (frame_id, objects) in enumerate(DEMO_FRAMES.items(), start=1):
        layers = [SceneLayer(box, disparity) for _, box, disparity, _ in objects]
        left, right = render_layered_scene(FRAME_WIDTH, FRAME_HEIGHT, BACKGROUND_DISPARITY, layers, seed=seed)
        write_pgm(os.path.join(frames_dir, f"{frame_id}_left.pgm"), left)
        write_pgm(os.path.join(frames_dir, f"{frame_id}_right.pgm"), right)
        entries[frame_id] = [Detection(label, inset_box(box, BOX_MARGIN), confidence)
                             for label, box, _, confidence in objects]
        frame_specs.append(f"{frame_id}:frames/{frame_id}_left.pgm:frames/{frame_id}_right.pgm")

    _write(directory, "annotations.csv", format_annotation_csv(AnnotationSet(entries)))
    shutil.copyfile(DEFAULT_LABEL_MAP_PATH, os.path.join(directory, "label_map.csv"))
    _write(directory, "route.csv", format_route_graph(demo_route_graph()))
    _write(directory, "calibration.txt", format_stereo_report(StereoCalibration(demo_rig(), 0.0)))

    config_path = os.path.join(directory, "simulation.env")
    _write(directory, "simulation.env", "\n".join([
        "CALIBRATION_REPORT=calibration.txt",
        f"FRAMES={','.join(frame_specs)}",
        "ANNOTATIONS=annotations.csv",
        "LABEL_MAP=label_map.csv",
        "ROUTE_GRAPH=route.csv",
        "SOURCE_NODE=gate",
        "DESTINATION=Library",
        "MIN_CONFIDENCE=0.5",
        "WINDOW=9",
        f"D_MAX={D_MAX}",
    ]) + "\n")
    logger.info("✓ Demo scenario written to %s", directory)
    return config_path


def _write(directory: str, name: str, text: str):
    with open(os.path.join(directory, name), "w", encoding="utf-8") as f:
        f.write(text)
