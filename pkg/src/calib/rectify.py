"""
Stereo rectification: rotate both cameras so the baseline lies along the
rectified x-axis and epipolar lines become image rows.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import ndimage
from scipy.spatial.transform import Rotation

from src.models import CameraIntrinsics, GrayImage, StereoRig


@dataclass(eq=False)
class RectifiedPair:
    """X_rect = rotation @ X_cam for each camera; both rectified cameras share `intrinsics`."""
    left_rotation: np.ndarray
    right_rotation: np.ndarray
    intrinsics: CameraIntrinsics
    rig: StereoRig


def rectify_pair(rig: StereoRig) -> RectifiedPair:
    # Half of the relative rotation goes to each camera
    half = Rotation.from_rotvec(np.asarray(rig.relative_rotation) / 2.0).as_matrix()
    t = half.T @ rig.baseline_vector

    e1 = -t / np.linalg.norm(t)
    e2 = np.cross([0.0, 0.0, 1.0], e1)
    if np.linalg.norm(e2) < 1e-9:
        # Baseline along the optical axis
        e2 = np.cross(e1, [1.0, 0.0, 0.0])
    e2 /= np.linalg.norm(e2)
    e3 = np.cross(e1, e2)
    rect = np.vstack([e1, e2, e3])

    left, right = rig.left, rig.right
    shared = CameraIntrinsics(
        (left.fx + right.fx) / 2.0,
        (left.fy + right.fy) / 2.0,
        (left.cx + right.cx) / 2.0,
        (left.cy + right.cy) / 2.0,
        left.pixel_size,
    )
    rectified_rig = StereoRig(shared, shared, np.zeros(3), np.array([-np.linalg.norm(t), 0.0, 0.0]))
    return RectifiedPair(rect @ half, rect @ half.T, shared, rectified_rig)


def rectify_image(image: GrayImage, original: CameraIntrinsics, rotation: np.ndarray,
                  rectified: CameraIntrinsics, output_size: Optional[Tuple[int, int]] = None) -> GrayImage:
    """
    Resample `image` into the rectified camera (bilinear, zero outside the source).

    output_size is (width, height); defaults to the input size.
    """
    width, height = output_size or (image.width, image.height)
    vs, us = np.mgrid[0:height, 0:width].astype(np.float64)
    rays = np.stack([(us - rectified.cx) / rectified.fx, (vs - rectified.cy) / rectified.fy, np.ones_like(us)])
    cam = np.einsum("ji,jhw->ihw", np.asarray(rotation, dtype=np.float64), rays)

    with np.errstate(divide="ignore", invalid="ignore"):
        src_u = original.fx * cam[0] / cam[2] + original.cx
        src_v = original.fy * cam[1] / cam[2] + original.cy
    behind = ~(cam[2] > 0)
    src_u[behind] = -1.0
    src_v[behind] = -1.0

    sampled = ndimage.map_coordinates(image.pixels.astype(np.float64), [src_v, src_u],
                                      order=1, mode="constant", cval=0.0)
    return GrayImage(np.clip(np.rint(sampled), 0, 255).astype(np.uint8))
