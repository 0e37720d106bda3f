"""Closed-form intrinsics from plane homographies (absolute-conic constraints)."""

import logging
from typing import Sequence

import numpy as np

from src import config
from src.errors import DegenerateConfiguration, IllConditioned
from src.models import CameraIntrinsics

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e8


def _v(h: np.ndarray, i: int, j: int) -> np.ndarray:
    return np.array([
        h[0, i] * h[0, j],
        h[0, i] * h[1, j] + h[1, i] * h[0, j],
        h[1, i] * h[1, j],
        h[2, i] * h[0, j] + h[0, i] * h[2, j],
        h[2, i] * h[1, j] + h[1, i] * h[2, j],
        h[2, i] * h[2, j],
    ])


def init_intrinsics(homographies: Sequence[np.ndarray], pixel_size: float = None) -> CameraIntrinsics:
    if len(homographies) < 3:
        raise DegenerateConfiguration(f"intrinsics initialization needs >= 3 homographies, got {len(homographies)}")
    pixel_size = config.PIXEL_SIZE_MM if pixel_size is None else pixel_size

    # Work in image coordinates scaled to ~1 so the linear system is balanced
    scale = float(np.mean([np.linalg.norm(h[:2, 2] / h[2, 2]) for h in homographies]))
    if not np.isfinite(scale) or scale < 1e-9:
        scale = 1.0
    n = np.diag([1.0 / scale, 1.0 / scale, 1.0])

    rows = []
    for h in homographies:
        hn = n @ np.asarray(h, dtype=np.float64)
        hn = hn / np.linalg.norm(hn)
        rows.append(_v(hn, 0, 1))
        rows.append(_v(hn, 0, 0) - _v(hn, 1, 1))
    v = np.array(rows)

    _, s, vt = np.linalg.svd(v)
    condition = s[0] / s[-2] if s[-2] > 0 else np.inf
    if condition > CONDITION_LIMIT:
        raise IllConditioned(
            f"absolute-conic system has condition {condition:.3g} (> {CONDITION_LIMIT:g}); "
            f"views are too close to fronto-parallel"
        )
    b11, b12, b22, b13, b23, b33 = vt[-1]

    denom = b11 * b22 - b12 * b12
    with np.errstate(divide="ignore", invalid="ignore"):
        v0 = (b12 * b13 - b11 * b23) / denom
        lam = b33 - (b13 * b13 + v0 * (b12 * b13 - b11 * b23)) / b11
        alpha_sq = lam / b11
        beta_sq = lam * b11 / denom
    if not (np.isfinite(alpha_sq) and np.isfinite(beta_sq) and alpha_sq > 0 and beta_sq > 0):
        raise IllConditioned("absolute-conic solution is not positive definite")
    alpha, beta = np.sqrt(alpha_sq), np.sqrt(beta_sq)
    gamma = -b12 * alpha * alpha * beta / lam
    u0 = gamma * v0 / beta - b13 * alpha * alpha / lam

    intr = CameraIntrinsics(alpha * scale, beta * scale, u0 * scale, v0 * scale, pixel_size)
    logger.debug("Initial intrinsics fx=%.3f fy=%.3f cx=%.3f cy=%.3f (skew %.3g dropped)",
                 intr.fx, intr.fy, intr.cx, intr.cy, gamma * scale)
    return intr
