"""
Synthetic checkerboard captures with known ground truth.

Stands in for photographing a physical board: poses are chosen to sweep the
frame edges, tilts and distances, corners are projected exactly and then
perturbed by isotropic Gaussian pixel noise.
"""

import math
from typing import List, Optional

import numpy as np
from scipy.spatial.transform import Rotation

from src.calib.geometry import compose_poses, project_points
from src.models import BoardModel, CameraIntrinsics, CornerObservationSet, Pose, StereoRig, ViewObservation


def make_view_poses(count: int, board: BoardModel, seed: int = 0,
                    min_distance: float = 0.35, max_distance: float = 0.9) -> List[Pose]:
    """
    Deterministic board poses in front of the camera.

    Every pose is tilted by at least 10 degrees so homography-based
    initialization stays well conditioned.
    """
    rng = np.random.default_rng(seed)
    center = np.array([(board.cols - 1) * board.square_size / 2, (board.rows - 1) * board.square_size / 2, 0.0])
    poses = []
    for _ in range(count):
        while True:
            tilt = np.radians(rng.uniform(-35.0, 35.0, size=2))
            if math.degrees(np.linalg.norm(tilt)) >= 10.0:
                break
        spin = math.radians(rng.uniform(-15.0, 15.0))
        rot = Rotation.from_rotvec([tilt[0], tilt[1], spin])
        z = rng.uniform(min_distance, max_distance)
        target = np.array([z * rng.uniform(-0.3, 0.3), z * rng.uniform(-0.22, 0.22), z])
        poses.append(Pose(rot.as_rotvec(), target - rot.apply(center)))
    return poses


def _noisy(points: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    if sigma <= 0:
        return points
    return points + rng.normal(0.0, sigma, size=points.shape)


def generate_synthetic_observations(intr_truth: CameraIntrinsics, poses: List[Pose], board: BoardModel,
                                    noise_sigma_px: float, seed: int,
                                    rig_truth: Optional[StereoRig] = None) -> CornerObservationSet:
    """
    Corner observations of `board` seen from every pose.

    Left-camera views use `intr_truth`; when `rig_truth` is given each view is
    also observed by its right camera. Views are numbered 0..len(poses)-1.
    """
    rng = np.random.default_rng(seed)
    obj = board.object_points()
    views = []
    for i, pose in enumerate(poses):
        left = project_points(intr_truth, pose, obj)
        views.append(ViewObservation(str(i), "L", _noisy(left, noise_sigma_px, rng)))
        if rig_truth is not None:
            right_pose = compose_poses(rig_truth.relative_rotation, rig_truth.baseline_vector, pose)
            right = project_points(rig_truth.right, right_pose, obj)
            views.append(ViewObservation(str(i), "R", _noisy(right, noise_sigma_px, rng)))
    return CornerObservationSet(board, views)
