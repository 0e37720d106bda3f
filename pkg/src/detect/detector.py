"""
Object detection boundary.

Any detector plugs in by implementing `Detector.detections_for`; the bundled
`AnnotationDetector` replays labelled boxes from an annotation CSV.
"""

import logging
from abc import ABC, abstractmethod
from typing import List, Optional

from src import config
from src.errors import NoValidDepth
from src.models import AnnotationSet, DepthMap, Detection, ObjectReport
from src.stereo.depth import object_distance

logger = logging.getLogger(__name__)


def _order_key(d: Detection):
    return -d.confidence, d.label, d.box.x, d.box.y


class Detector(ABC):
    @abstractmethod
    def detections_for(self, frame_id: str) -> List[Detection]:
        """Raw detections for a frame, any order, any confidence."""

    def detect(self, frame_id: str, min_confidence: Optional[float] = None) -> List[Detection]:
        threshold = config.MIN_CONFIDENCE if min_confidence is None else min_confidence
        kept = [d for d in self.detections_for(frame_id) if d.confidence >= threshold]
        return sorted(kept, key=_order_key)


class AnnotationDetector(Detector):
    def __init__(self, annotations: AnnotationSet):
        self.annotations = annotations

    def detections_for(self, frame_id: str) -> List[Detection]:
        return self.annotations.for_frame(frame_id)


def detect(frame_id: str, source: AnnotationSet, min_confidence: Optional[float] = None) -> List[Detection]:
    """
    Detections for `frame_id` with confidence >= min_confidence, most confident first.

    Ties are ordered by (label, x, y). Unknown frame ids yield an empty list.
    """
    return AnnotationDetector(source).detect(frame_id, min_confidence)


def report_objects(detections: List[Detection], depth: DepthMap) -> List[ObjectReport]:
    """One report per detection; boxes without valid depth keep an unknown distance."""
    reports = []
    for det in detections:
        try:
            distance = object_distance(depth, det.box)
        except NoValidDepth as e:
            logger.warning("⚠ %s: %s", det.label, e)
            distance = None
        reports.append(ObjectReport(det.label, distance, det.box))
    return reports
