"""Pinhole projection without lens distortion."""

import numpy as np
from scipy.spatial.transform import Rotation

from src.errors import BehindCamera
from src.models import CameraIntrinsics, Pose


def project_points(intr: CameraIntrinsics, pose: Pose, points: np.ndarray) -> np.ndarray:
    """Project (N, 3) board points through `pose` and `intr` to (N, 2) pixels."""
    cam = pose.apply(np.asarray(points, dtype=np.float64).reshape(-1, 3))
    z = cam[:, 2]
    if np.any(z <= 0):
        raise BehindCamera(f"{int(np.sum(z <= 0))} point(s) have non-positive depth after the pose transform")
    u = intr.fx * cam[:, 0] / z + intr.cx
    v = intr.fy * cam[:, 1] / z + intr.cy
    return np.column_stack([u, v])


def project_point(intr: CameraIntrinsics, pose: Pose, point) -> np.ndarray:
    return project_points(intr, pose, np.asarray(point, dtype=np.float64).reshape(1, 3))[0]


def project_views(fx, fy, cx, cy, rvecs: np.ndarray, tvecs: np.ndarray, points: np.ndarray):
    """
    Project the same (N, 3) board through V poses at once.

    Returns (pixels (V, N, 2), depths (V, N)); callers decide what to do with non-positive depths.
    """
    rotations = Rotation.from_rotvec(np.asarray(rvecs).reshape(-1, 3)).as_matrix()
    cam = np.einsum("vij,nj->vni", rotations, points) + np.asarray(tvecs).reshape(-1, 1, 3)
    z = cam[..., 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        u = fx * cam[..., 0] / z + cx
        v = fy * cam[..., 1] / z + cy
    return np.stack([u, v], axis=-1), z


def compose_poses(relative_rotation, relative_translation, pose: Pose) -> Pose:
    """Board-to-right pose from a board-to-left pose and the left-to-right transform."""
    rel = Rotation.from_rotvec(relative_rotation)
    rot = rel * Rotation.from_rotvec(pose.rotation)
    return Pose(rot.as_rotvec(), rel.apply(pose.translation) + np.asarray(relative_translation))
