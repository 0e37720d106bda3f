"""
Checkerboard coverage buckets: did the capture session show the board at the
frame edges, at an angle, filling the view and far away?
"""

import logging
import math
from typing import Iterable, Tuple

import numpy as np

from src.models import CoverageBuckets, Pose

logger = logging.getLogger(__name__)

EDGE_BAND = 0.20
SKEW_DEGREES = 15.0
FILL_FRACTION = 0.70
FAR_FRACTION = 0.25
TILT_DEGREES = 10.0


def classify_coverage(view_corners: np.ndarray, pose: Pose, image_size: Tuple[int, int]) -> CoverageBuckets:
    """Buckets a single view falls into; image_size is (width, height) in pixels."""
    corners = np.asarray(view_corners, dtype=np.float64).reshape(-1, 2)
    if len(corners) == 0:
        raise ValueError("coverage needs at least one corner")
    width, height = image_size

    u, v = corners.mean(axis=0)
    span = corners.max(axis=0) - corners.min(axis=0)
    size_ratio = math.hypot(*span) / math.hypot(width, height)

    normal = pose.rotation_matrix()[:, 2]
    if normal[2] < 0:
        normal = -normal
    skew_angle = math.degrees(math.acos(min(1.0, normal[2])))
    tilt_about_x = math.degrees(math.atan2(abs(normal[1]), normal[2]))
    tilt_about_y = math.degrees(math.atan2(abs(normal[0]), normal[2]))

    return CoverageBuckets(
        x_left=u < EDGE_BAND * width,
        x_right=u > (1.0 - EDGE_BAND) * width,
        y_top=v < EDGE_BAND * height,
        y_bottom=v > (1.0 - EDGE_BAND) * height,
        skew=skew_angle > SKEW_DEGREES,
        size_fill=size_ratio >= FILL_FRACTION,
        size_far=size_ratio < FAR_FRACTION,
        overall_tilt=max(tilt_about_x, tilt_about_y) > TILT_DEGREES,
    )


def aggregate_coverage(buckets: Iterable[CoverageBuckets]) -> CoverageBuckets:
    """OR over all views, warning once per bucket no view filled."""
    total = CoverageBuckets()
    for b in buckets:
        total = total.merged(b)
    for name in total.unfilled():
        logger.warning("⚠ Coverage bucket not filled: %s", name)
    return total
