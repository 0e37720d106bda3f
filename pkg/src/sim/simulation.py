"""
End-to-end walk: destination lookup, per-frame perception, spoken guidance.

Transcript lines go to the caller; a failed destination lookup yields a single
"BEEP" and ends the run, a failed frame yields "BEEP" for that frame only.
"""

import logging
from dataclasses import dataclass, field
from typing import Iterator, List

from src.calib.report import read_stereo_report
from src.detect.detector import AnnotationDetector, report_objects
from src.errors import GuideSystemError, RouteError
from src.guide.compose import compose_guidance
from src.guide.session import BEEP_LINE, plan_route
from src.media_io.annotations import read_annotation_csv, read_label_map
from src.media_io.pgm import read_pgm
from src.models import LabelMap, ObjectReport, StereoRig
from src.route.graph import read_route_graph
from src.sim.sim_config import FramePair, SimulationConfig
from src.sim.timing import DETECTION, DISPARITY_DEPTH, IMAGE_LOAD, SETUP, StageTimer, TimingReport
from src.stereo.depth import depth_map
from src.stereo.disparity import compute_disparity
from src.wire.codec import FrameKind, batch_frame, batch_to_reports, beep, decode_batch, decode_frame, encode_frame, reports_to_batch
from src.wire.server import StreamItem

logger = logging.getLogger(__name__)


@dataclass
class SimulationResult:
    transcript: List[str] = field(default_factory=list)
    timing: TimingReport = field(default_factory=TimingReport)
    destination_found: bool = False

    @property
    def exit_code(self) -> int:
        return 0 if self.destination_found else 1


def _over_the_link(sequence: int, reports: List[ObjectReport], label_map: LabelMap) -> List[ObjectReport]:
    """Send reports through the wire codec the way the companion device receives them."""
    data = encode_frame(batch_frame(reports_to_batch(sequence, reports, label_map)))
    frame, _ = decode_frame(data)
    if frame.kind != FrameKind.REPORT_BATCH:
        raise GuideSystemError(f"expected a report batch, got {frame.kind.name}")
    return batch_to_reports(decode_batch(frame.payload), label_map)


class FramePerception:
    """Per-frame stereo depth plus detection against a fixed rig and detector."""

    def __init__(self, cfg: SimulationConfig, rig: StereoRig, detector: AnnotationDetector, label_map: LabelMap,
                 timer: StageTimer):
        self.cfg = cfg
        self.rig = rig
        self.detector = detector
        self.label_map = label_map
        self.timer = timer

    def perceive(self, pair: FramePair) -> List[ObjectReport]:
        with self.timer.measure(IMAGE_LOAD):
            left, right = read_pgm(pair.left), read_pgm(pair.right)
        with self.timer.measure(DISPARITY_DEPTH):
            depth = depth_map(compute_disparity(left, right, self.cfg.match), self.rig)
        with self.timer.measure(DETECTION):
            detections = self.detector.detect(pair.frame_id, self.cfg.min_confidence)
            reports = report_objects(detections, depth)
        return reports

    def frame_reports(self, sequence: int, pair: FramePair) -> List[ObjectReport]:
        return _over_the_link(sequence, self.perceive(pair), self.label_map)


def run_simulation(cfg: SimulationConfig) -> SimulationResult:
    timer = StageTimer()
    result = SimulationResult()

    # Phase 1: destination and route
    with timer.measure(SETUP):
        rig, _ = read_stereo_report(cfg.calibration_report)
        label_map = read_label_map(cfg.label_map)
        detector = AnnotationDetector(read_annotation_csv(cfg.annotations, label_map))
        graph = read_route_graph(cfg.route_graph)
        try:
            steps = plan_route(graph, cfg.source_node, cfg.destination)
        except RouteError as e:
            logger.warning("⚠ Destination %r rejected: %s", cfg.destination, e)
            steps = None

    if steps is None:
        result.transcript.append(BEEP_LINE)
        result.timing = timer.report()
        return result
    result.destination_found = True

    # Phases 2 and 3: perceive each frame, then speak
    perception = FramePerception(cfg, rig, detector, label_map, timer)
    for i, pair in enumerate(cfg.frames):
        step = steps[min(i, len(steps) - 1)]
        try:
            reports = perception.frame_reports(i, pair)
        except (GuideSystemError, OSError) as e:
            logger.warning("⚠ Frame %s failed: %s", pair.frame_id, e)
            result.transcript.append(BEEP_LINE)
            continue
        result.transcript.append(compose_guidance(step, reports).render())

    result.timing = timer.report()
    logger.info("✓ Simulation finished: %d frames, %d beeps", len(cfg.frames),
                result.transcript.count(BEEP_LINE))
    return result


def stream_reports(cfg: SimulationConfig) -> Iterator[StreamItem]:
    """Report batches for each configured frame, in order; a failed frame becomes a beep."""
    timer = StageTimer()
    rig, _ = read_stereo_report(cfg.calibration_report)
    label_map = read_label_map(cfg.label_map)
    detector = AnnotationDetector(read_annotation_csv(cfg.annotations, label_map))
    perception = FramePerception(cfg, rig, detector, label_map, timer)
    for i, pair in enumerate(cfg.frames):
        try:
            reports = perception.perceive(pair)
        except (GuideSystemError, OSError) as e:
            logger.warning("⚠ Frame %s failed: %s", pair.frame_id, e)
            yield beep()
            continue
        logger.info("✓ Frame %s: %d objects", pair.frame_id, len(reports))
        yield reports_to_batch(i, reports, label_map)
