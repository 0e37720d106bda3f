"""
Synthetic rectified stereo pairs made of fronto-parallel textured layers.

Each layer is a rectangle in the left image with an integer disparity; the
right image shows the same texture shifted left by that disparity. Nearer
layers (larger disparity) are painted over farther ones.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from src.models import BBox, GrayImage


@dataclass(frozen=True)
class SceneLayer:
    box: BBox
    disparity: int


def _texture(rng: np.random.Generator, height: int, width: int) -> np.ndarray:
    return rng.integers(0, 256, size=(height, width), dtype=np.uint8)


def render_layered_scene(width: int, height: int, background_disparity: int, layers: Sequence[SceneLayer],
                         seed: int = 0) -> Tuple[GrayImage, GrayImage]:
    """Left and right images of a background plane plus `layers`."""
    if background_disparity < 0 or any(layer.disparity < 0 for layer in layers):
        raise ValueError("disparities must be >= 0")
    rng = np.random.default_rng(seed)

    background = _texture(rng, height, width + background_disparity)
    left = background[:, :width].copy()
    right = background[:, background_disparity:background_disparity + width].copy()

    for layer in sorted(layers, key=lambda l: l.disparity):
        b, d = layer.box, layer.disparity
        texture = _texture(rng, b.h, b.w)
        _paste(left, texture, b.x, b.y)
        _paste(right, texture, b.x - d, b.y)
    return GrayImage(left), GrayImage(right)


def _paste(image: np.ndarray, texture: np.ndarray, x: int, y: int):
    height, width = image.shape
    x0, y0 = max(x, 0), max(y, 0)
    x1, y1 = min(x + texture.shape[1], width), min(y + texture.shape[0], height)
    if x0 >= x1 or y0 >= y1:
        return
    image[y0:y1, x0:x1] = texture[y0 - y:y1 - y, x0 - x:x1 - x]


def inset_box(box: BBox, margin: int) -> BBox:
    """Box shrunk by `margin` on every side (at least 1x1)."""
    w = max(box.w - 2 * margin, 1)
    h = max(box.h - 2 * margin, 1)
    return BBox(box.x + margin, box.y + margin, w, h)


def disparity_for_distance(distance_m: float, baseline_focal_px: float) -> int:
    """Nearest integer disparity for a plane at `distance_m` given b * fx."""
    return max(int(round(baseline_focal_px / distance_m)), 1)
