"""
Stereo extrinsics: left-to-right rotation and baseline from views of the same
board seen by both cameras. Intrinsics stay fixed during refinement.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from scipy.spatial.transform import Rotation

from src.calib.geometry import project_views
from src.calib.homography import estimate_homography, pose_from_homography
from src.calib.lm import levenberg_marquardt
from src.calib.refine import pack_poses, rms_of, unpack_poses
from src.errors import DegenerateBaseline, DivergedPose, ViewMismatch
from src.models import CameraIntrinsics, CornerObservationSet, Pose, StereoRig, ViewObservation

logger = logging.getLogger(__name__)

MIN_BASELINE_M = 1e-6


@dataclass(eq=False)
class StereoCalibration:
    rig: StereoRig
    rms_px: float
    left_poses: Dict[str, Pose] = field(default_factory=dict)
    cost_history: List[float] = field(default_factory=list)
    iterations: int = 0


def _views_for(obs: CornerObservationSet, camera: str) -> Dict[str, ViewObservation]:
    cameras = {v.camera for v in obs.views}
    views = [v for v in obs.views if v.camera == camera] if len(cameras) > 1 else list(obs.views)
    by_id = {}
    for v in views:
        if v.view_id in by_id:
            raise ViewMismatch(f"view {v.view_id!r} appears twice for camera {camera}")
        by_id[v.view_id] = v
    return by_id


def _check_baseline(translation: np.ndarray, stage: str):
    baseline = float(np.linalg.norm(translation))
    if baseline < MIN_BASELINE_M:
        raise DegenerateBaseline(f"{stage} baseline {baseline:.3g} m is below {MIN_BASELINE_M:g} m; cameras coincide")


def _right_poses(rel_rvec: np.ndarray, rel_t: np.ndarray, rvecs: np.ndarray, tvecs: np.ndarray):
    rel = Rotation.from_rotvec(rel_rvec)
    right_rot = rel * Rotation.from_rotvec(rvecs)
    return right_rot.as_rotvec().reshape(-1, 3), rel.apply(tvecs).reshape(-1, 3) + rel_t


def calibrate_stereo(left_obs: CornerObservationSet, right_obs: CornerObservationSet,
                     left_intr: CameraIntrinsics, right_intr: CameraIntrinsics) -> StereoCalibration:
    """
    Relative transform X_right = R @ X_left + t between two calibrated cameras.

    Each shared view gives one estimate of (R, t); the estimates are averaged
    and then refined jointly with the left board poses over both cameras'
    reprojection error.
    """
    if left_obs.board != right_obs.board:
        raise ViewMismatch(f"boards differ: {left_obs.board} vs {right_obs.board}")
    left_views, right_views = _views_for(left_obs, "L"), _views_for(right_obs, "R")
    if set(left_views) != set(right_views):
        missing = sorted(set(left_views) ^ set(right_views))
        raise ViewMismatch(f"views not seen by both cameras: {', '.join(missing)}")
    if not left_views:
        raise ViewMismatch("no shared views")

    view_ids = list(left_views)
    board_xy = left_obs.board.object_points()[:, :2]
    points = left_obs.board.object_points()
    k_left, k_right = left_intr.matrix(), right_intr.matrix()

    left_poses, rotations, translations = [], [], []
    for vid in view_ids:
        pl = pose_from_homography(k_left, estimate_homography(board_xy, left_views[vid].corners))
        pr = pose_from_homography(k_right, estimate_homography(board_xy, right_views[vid].corners))
        rel = Rotation.from_matrix(pr.rotation_matrix() @ pl.rotation_matrix().T)
        left_poses.append(pl)
        rotations.append(rel)
        translations.append(pr.translation - rel.apply(pl.translation))

    rel_rot0 = Rotation.concatenate(rotations).mean()
    rel_t0 = np.mean(translations, axis=0)
    _check_baseline(rel_t0, "initial")

    observed_left = np.array([left_views[v].corners for v in view_ids])
    observed_right = np.array([right_views[v].corners for v in view_ids])

    def residual_fn(x: np.ndarray) -> np.ndarray:
        rvecs, tvecs = unpack_poses(x[6:])
        r_rvecs, r_tvecs = _right_poses(x[:3], x[3:6], rvecs, tvecs)
        proj_l, z_l = project_views(left_intr.fx, left_intr.fy, left_intr.cx, left_intr.cy, rvecs, tvecs, points)
        proj_r, z_r = project_views(right_intr.fx, right_intr.fy, right_intr.cx, right_intr.cy,
                                    r_rvecs, r_tvecs, points)
        if np.any(z_l <= 0) or np.any(z_r <= 0):
            return np.full(observed_left.size + observed_right.size, np.inf)
        return np.concatenate([(observed_left - proj_l).ravel(), (observed_right - proj_r).ravel()])

    x0 = np.concatenate([rel_rot0.as_rotvec(), rel_t0, pack_poses(left_poses)])
    if not np.all(np.isfinite(residual_fn(x0))):
        raise DivergedPose("averaged stereo transform puts board corners behind a camera")
    result = levenberg_marquardt(residual_fn, x0)

    x = result.x
    _check_baseline(x[3:6], "refined")
    rig = StereoRig(left_intr, right_intr, Pose(x[:3], x[3:6]).rotation, x[3:6])
    rvecs, tvecs = unpack_poses(x[6:])
    rms = rms_of(residual_fn(x))
    logger.info("✓ Stereo calibrated over %d views: baseline %.6f m, rms %.6f px",
                len(view_ids), rig.baseline, rms)
    return StereoCalibration(
        rig=rig,
        rms_px=rms,
        left_poses={vid: Pose(r, t) for vid, r, t in zip(view_ids, rvecs, tvecs)},
        cost_history=result.cost_history,
        iterations=result.iterations,
    )
