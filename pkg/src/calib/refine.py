"""
Mono camera calibration: homography initialization followed by joint
refinement of {fx, fy, cx, cy} and every view's pose against reprojection error.
"""

import logging
from typing import Dict, List, Optional, Tuple

import numpy as np

from src import config
from src.calib.coverage import aggregate_coverage, classify_coverage
from src.calib.geometry import project_views
from src.calib.homography import estimate_homography, pose_from_homography
from src.calib.intrinsics import init_intrinsics
from src.calib.lm import levenberg_marquardt
from src.errors import CalibrationError, DivergedPose
from src.models import CalibrationReport, CameraIntrinsics, CornerObservationSet, Pose, ViewObservation

logger = logging.getLogger(__name__)


def _single_camera_views(obs: CornerObservationSet, camera: Optional[str]) -> List[ViewObservation]:
    if camera is not None:
        views = [v for v in obs.views if v.camera == camera]
    else:
        views = list(obs.views)
        cameras = {v.camera for v in views}
        if len(cameras) > 1:
            raise CalibrationError(f"observation set mixes cameras {sorted(cameras)}; choose one")
    if not views:
        raise CalibrationError(f"no views for camera {camera!r}")
    return views


def view_homographies(obs: CornerObservationSet, camera: Optional[str] = None) -> List[np.ndarray]:
    board_xy = obs.board.object_points()[:, :2]
    return [estimate_homography(board_xy, v.corners) for v in _single_camera_views(obs, camera)]


def initial_poses(intr: CameraIntrinsics, obs: CornerObservationSet, views: List[ViewObservation]) -> List[Pose]:
    board_xy = obs.board.object_points()[:, :2]
    k = intr.matrix()
    return [pose_from_homography(k, estimate_homography(board_xy, v.corners)) for v in views]


def pack_poses(poses: List[Pose]) -> np.ndarray:
    return np.concatenate([np.concatenate([p.rotation, p.translation]) for p in poses])


def unpack_poses(flat: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    blocks = flat.reshape(-1, 6)
    return blocks[:, :3], blocks[:, 3:]


def reprojection_residuals(intr: CameraIntrinsics, poses: List[Pose], points: np.ndarray,
                           observed: np.ndarray) -> np.ndarray:
    """Per-corner residual vectors (V, N, 2) = observed - projected."""
    rvecs = np.array([p.rotation for p in poses])
    tvecs = np.array([p.translation for p in poses])
    projected, _ = project_views(intr.fx, intr.fy, intr.cx, intr.cy, rvecs, tvecs, points)
    return observed - projected


def rms_of(residuals: np.ndarray) -> float:
    """sqrt of the mean squared per-corner residual norm."""
    squared_norms = np.sum(residuals.reshape(-1, 2) ** 2, axis=1)
    return float(np.sqrt(np.mean(squared_norms)))


def refine_calibration(obs: CornerObservationSet, init: CameraIntrinsics, camera: Optional[str] = None,
                       image_size: Optional[Tuple[int, int]] = None) -> CalibrationReport:
    views = _single_camera_views(obs, camera)
    image_size = image_size or (config.IMAGE_WIDTH, config.IMAGE_HEIGHT)
    points = obs.board.object_points()
    observed = np.array([v.corners for v in views])

    poses0 = initial_poses(init, obs, views)
    _, depths = project_views(init.fx, init.fy, init.cx, init.cy,
                              np.array([p.rotation for p in poses0]), np.array([p.translation for p in poses0]),
                              points)
    if np.any(depths <= 0):
        raise DivergedPose("initial poses put board corners behind the camera")

    def residual_fn(x: np.ndarray) -> np.ndarray:
        rvecs, tvecs = unpack_poses(x[4:])
        projected, z = project_views(x[0], x[1], x[2], x[3], rvecs, tvecs, points)
        if np.any(z <= 0) or x[0] <= 0 or x[1] <= 0:
            return np.full(observed.size, np.inf)
        return (observed - projected).ravel()

    x0 = np.concatenate([[init.fx, init.fy, init.cx, init.cy], pack_poses(poses0)])
    result = levenberg_marquardt(residual_fn, x0)

    x = result.x
    rvecs, tvecs = unpack_poses(x[4:])
    try:
        intrinsics = CameraIntrinsics(x[0], x[1], x[2], x[3], init.pixel_size)
        poses = [Pose(r, t) for r, t in zip(rvecs, tvecs)]
    except ValueError as e:
        raise DivergedPose(f"refinement left the valid parameter space: {e}")

    residuals = reprojection_residuals(intrinsics, poses, points, observed)
    rms = rms_of(residuals)
    coverage = aggregate_coverage(
        classify_coverage(v.corners, p, image_size) for v, p in zip(views, poses)
    )
    logger.info("✓ Calibrated %d views in %d iterations: rms %.6f px, fx=%.3f fy=%.3f",
                len(views), result.iterations, rms, intrinsics.fx, intrinsics.fy)
    return CalibrationReport(
        intrinsics=intrinsics,
        poses={v.view_id: p for v, p in zip(views, poses)},
        rms_px=rms,
        coverage=coverage,
        cost_history=result.cost_history,
        iterations=result.iterations,
    )


def calibrate_camera(obs: CornerObservationSet, camera: Optional[str] = None,
                     image_size: Optional[Tuple[int, int]] = None,
                     pixel_size: Optional[float] = None) -> CalibrationReport:
    """Full mono calibration: per-view homographies, closed-form initialization, refinement."""
    init = init_intrinsics(view_homographies(obs, camera), pixel_size=pixel_size)
    return refine_calibration(obs, init, camera=camera, image_size=image_size)
