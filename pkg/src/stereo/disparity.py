"""
Dense block matching between row-aligned grayscale images.

For each left pixel the sum of absolute differences (SAD) over a square
window is evaluated at every disparity in [d_min, d_max]; the smallest cost
wins, ties going to the smaller disparity. Window sums come from integral
images so the cost of a disparity is independent of the window size.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Tuple

import numpy as np

from src import config
from src.errors import SizeMismatch
from src.models import DisparityMap, GrayImage, MatchParams

logger = logging.getLogger(__name__)

BAND_ROWS = 32


def _box_sums(values: np.ndarray, window: int) -> np.ndarray:
    """Sums of every window x window block; result[i, j] covers values[i:i+window, j:j+window]."""
    integral = np.zeros((values.shape[0] + 1, values.shape[1] + 1), dtype=np.int64)
    integral[1:, 1:] = values.cumsum(axis=0).cumsum(axis=1)
    return (integral[window:, window:] - integral[:-window, window:]
            - integral[window:, :-window] + integral[:-window, :-window])


def _match_band(left: np.ndarray, right: np.ndarray, rows: Tuple[int, int], cols: Tuple[int, int],
                p: MatchParams) -> Tuple[np.ndarray, np.ndarray]:
    """Best disparity and validity for left pixels in rows [r0, r1) x cols [u0, u1)."""
    r0, r1 = rows
    u0, u1 = cols
    half = p.window // 2
    band_l = left[r0 - half:r1 + half]
    band_r = right[r0 - half:r1 + half]
    width = band_l.shape[1]

    disparities = range(p.d_min, p.d_max + 1)
    costs = np.empty((len(disparities), r1 - r0, u1 - u0), dtype=np.int64)
    for k, d in enumerate(disparities):
        # column j of diff pairs left u = j + d with right u - d
        diff = np.abs(band_l[:, d:] - band_r[:, :width - d])
        box = _box_sums(diff, p.window)
        costs[k] = box[:, u0 - half - d:u1 - half - d]

    best = np.argmin(costs, axis=0)
    best_cost = np.take_along_axis(costs, best[None], axis=0)[0]

    # Runner-up must sit more than one step away from the winner
    index = np.arange(len(disparities))[:, None, None]
    far = np.abs(index - best[None]) > 1
    if far.any():
        runner_up = np.where(far, costs, np.iinfo(np.int64).max).min(axis=0).astype(np.float64)
    else:
        runner_up = np.full(best_cost.shape, np.inf)
    valid = best_cost * p.uniqueness_ratio < runner_up
    return (best + p.d_min).astype(np.float32), valid


def compute_disparity(left: GrayImage, right: GrayImage, p: Optional[MatchParams] = None,
                      workers: Optional[int] = None) -> DisparityMap:
    """
    Left-referenced disparity map.

    A pixel is valid only when its window fits inside both images at every
    candidate disparity and the winning cost passes the uniqueness test.
    Row bands are matched independently, so any worker count gives the same map.
    """
    p = p or MatchParams()
    if (left.width, left.height) != (right.width, right.height):
        raise SizeMismatch(f"left is {left.width}x{left.height}, right is {right.width}x{right.height}")
    workers = workers or config.DISPARITY_WORKERS

    height, width = left.height, left.width
    half = p.window // 2
    values = np.full((height, width), np.nan, dtype=np.float32)
    valid = np.zeros((height, width), dtype=bool)

    v0, v1 = half, height - half
    u0, u1 = half + p.d_max, width - half
    if v0 >= v1 or u0 >= u1:
        logger.warning("⚠ Image %dx%d too small for window %d and d_max %d; no valid disparities",
                       width, height, p.window, p.d_max)
        return DisparityMap(values, valid)

    l_px = left.pixels.astype(np.int32)
    r_px = right.pixels.astype(np.int32)
    bands = [(r, min(r + BAND_ROWS, v1)) for r in range(v0, v1, BAND_ROWS)]

    def run(band):
        return band, _match_band(l_px, r_px, band, (u0, u1), p)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, bands))
    else:
        results = [run(b) for b in bands]

    for (r0, r1), (band_values, band_valid) in results:
        values[r0:r1, u0:u1] = band_values
        valid[r0:r1, u0:u1] = band_valid

    disp = DisparityMap(values, valid)
    logger.debug("Disparity %dx%d: %d of %d pixels valid", width, height, int(disp.valid.sum()), width * height)
    return disp
