"""
Depth from disparity and per-object mean distance.

    D = (b * f) / (d * px)

with baseline b in meters, focal length f and pixel size px in millimeters,
so D comes out in meters. Equivalently b * fx / d with fx = f / px.
"""

import math

import numpy as np

from src.errors import NonPositiveDisparity, NoValidDepth
from src.models import BBox, DepthMap, DisparityMap, StereoRig


def depth_from_disparity(d: float, rig: StereoRig, camera: str = "left") -> float:
    if not d > 0:
        raise NonPositiveDisparity(f"disparity {d} gives no finite depth")
    intr = rig.camera(camera)
    return rig.baseline * intr.focal_mm / (d * intr.pixel_size)


def depth_map(disp: DisparityMap, rig: StereoRig, camera: str = "left") -> DepthMap:
    """Per-pixel depth; invalid or non-positive disparities stay invalid."""
    intr = rig.camera(camera)
    d = disp.values.astype(np.float64)
    usable = disp.valid & (d > 0)
    depth = np.full(d.shape, np.nan)
    depth[usable] = rig.baseline * intr.focal_mm / (d[usable] * intr.pixel_size)
    return DepthMap(depth, usable)


def object_distance(depth: DepthMap, box: BBox) -> float:
    """
    Mean depth over the valid pixels of [x, x+w) x [y, y+h), clipped to the image.

    Raises NoValidDepth when the clipped region holds no valid pixel or the
    box misses the image entirely.
    """
    region = box.clip(depth.width, depth.height)
    if region is None:
        raise NoValidDepth(f"box {box} lies outside the {depth.width}x{depth.height} depth map")
    x0, y0, x1, y1 = region
    values = depth.values[y0:y1, x0:x1]
    samples = values[depth.valid[y0:y1, x0:x1]]
    if samples.size == 0:
        raise NoValidDepth(f"no valid depth inside box {box}")
    return math.fsum(samples.tolist()) / samples.size
