import numpy as np

from src.errors import DegenerateConfiguration
from src.models import Pose

# Relative singular-value floor below which a point cloud counts as collinear
COLLINEAR_TOL = 1e-9


def _normalizing_transform(points: np.ndarray) -> np.ndarray:
    """Similarity moving the centroid to the origin with mean distance sqrt(2)."""
    centroid = points.mean(axis=0)
    mean_dist = np.mean(np.linalg.norm(points - centroid, axis=1))
    scale = np.sqrt(2.0) / mean_dist
    return np.array([[scale, 0.0, -scale * centroid[0]],
                     [0.0, scale, -scale * centroid[1]],
                     [0.0, 0.0, 1.0]])


def _check_spread(points: np.ndarray, name: str):
    centered = points - points.mean(axis=0)
    s = np.linalg.svd(centered, compute_uv=False)
    if s[0] == 0 or s[1] / s[0] < COLLINEAR_TOL:
        raise DegenerateConfiguration(f"{name} points are collinear")


def estimate_homography(board_pts, img_pts) -> np.ndarray:
    """
    Normalized DLT homography mapping board-plane points to pixels, scaled so H[2, 2] == 1.
    """
    src = np.asarray(board_pts, dtype=np.float64).reshape(-1, 2)
    dst = np.asarray(img_pts, dtype=np.float64).reshape(-1, 2)
    if len(src) != len(dst):
        raise DegenerateConfiguration(f"{len(src)} board points vs {len(dst)} image points")
    if len(src) < 4:
        raise DegenerateConfiguration(f"homography needs >= 4 correspondences, got {len(src)}")
    _check_spread(src, "board")
    _check_spread(dst, "image")

    t_src, t_dst = _normalizing_transform(src), _normalizing_transform(dst)
    s = np.column_stack([src, np.ones(len(src))]) @ t_src.T
    d = np.column_stack([dst, np.ones(len(dst))]) @ t_dst.T

    a = np.zeros((2 * len(s), 9))
    a[0::2, 0:3] = -s
    a[0::2, 6:9] = s * d[:, 0:1]
    a[1::2, 3:6] = -s
    a[1::2, 6:9] = s * d[:, 1:2]
    _, _, vt = np.linalg.svd(a)
    h_norm = vt[-1].reshape(3, 3)

    h = np.linalg.inv(t_dst) @ h_norm @ t_src
    if abs(h[2, 2]) < 1e-12 * np.abs(h).max():
        raise DegenerateConfiguration("homography maps the board origin to infinity")
    return h / h[2, 2]


def pose_from_homography(camera_matrix: np.ndarray, h: np.ndarray) -> Pose:
    """Board-to-camera pose from a plane homography and known intrinsics, board in front of the camera."""
    k_inv = np.linalg.inv(camera_matrix)
    h1, h2, h3 = k_inv @ h[:, 0], k_inv @ h[:, 1], k_inv @ h[:, 2]
    lam = 1.0 / np.linalg.norm(h1)
    if h3[2] * lam < 0:
        lam = -lam
    r1, r2, t = lam * h1, lam * h2, lam * h3
    r = np.column_stack([r1, r2, np.cross(r1, r2)])
    u, _, vt = np.linalg.svd(r)
    r = u @ vt
    if np.linalg.det(r) < 0:
        r = u @ np.diag([1.0, 1.0, -1.0]) @ vt
    return Pose.from_matrix(r, t)
