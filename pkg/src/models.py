"""
Value types shared across pipeline stages.

Images and maps hold numpy arrays in row-major (height, width) layout.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
from scipy.spatial.transform import Rotation

from src.errors import DegenerateBaseline


# --- images and maps ---------------------------------------------------------

@dataclass(eq=False)
class GrayImage:
    pixels: np.ndarray

    def __post_init__(self):
        self.pixels = np.ascontiguousarray(self.pixels, dtype=np.uint8)
        if self.pixels.ndim != 2 or self.pixels.shape[0] < 1 or self.pixels.shape[1] < 1:
            raise ValueError(f"GrayImage needs a non-empty 2-D array, got shape {self.pixels.shape}")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(np.array_equal(self.pixels, other.pixels))


@dataclass(eq=False)
class DisparityMap:
    """Disparity in pixels; invalid pixels are stored as NaN and flagged False in `valid`."""
    values: np.ndarray
    valid: np.ndarray

    def __post_init__(self):
        self.values = np.array(self.values, dtype=np.float32)
        self.valid = np.array(self.valid, dtype=bool)
        if self.values.shape != self.valid.shape or self.values.ndim != 2:
            raise ValueError("disparity values and mask must be 2-D with equal shape")
        self.valid &= np.isfinite(self.values)
        self.values[~self.valid] = np.nan

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    def __eq__(self, other):
        if not isinstance(other, DisparityMap):
            return NotImplemented
        return (
            self.values.shape == other.values.shape
            and bool(np.array_equal(self.valid, other.valid))
            and bool(np.array_equal(self.values[self.valid], other.values[other.valid]))
        )


@dataclass(eq=False)
class DepthMap:
    values: np.ndarray
    valid: np.ndarray

    def __post_init__(self):
        self.values = np.array(self.values, dtype=np.float64)
        self.valid = np.array(self.valid, dtype=bool)
        self.valid &= np.isfinite(self.values) & (self.values > 0)
        self.values[~self.valid] = np.nan

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class BBox:
    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ValueError(f"bounding box needs w,h >= 1, got {self.w}x{self.h}")

    def clip(self, width: int, height: int) -> Optional[Tuple[int, int, int, int]]:
        """Half-open [x0, x1) x [y0, y1) clipped to the image, or None when fully outside."""
        x0, y0 = max(self.x, 0), max(self.y, 0)
        x1, y1 = min(self.x + self.w, width), min(self.y + self.h, height)
        if x0 >= x1 or y0 >= y1:
            return None
        return x0, y0, x1, y1


@dataclass(frozen=True)
class MatchParams:
    window: int = 9
    d_min: int = 0
    d_max: int = 64
    uniqueness_ratio: float = 1.15

    def __post_init__(self):
        if self.window < 3 or self.window % 2 == 0:
            raise ValueError(f"match window must be odd and >= 3, got {self.window}")
        if not 0 <= self.d_min < self.d_max:
            raise ValueError(f"need 0 <= d_min < d_max, got {self.d_min}..{self.d_max}")
        if self.uniqueness_ratio < 1.0:
            raise ValueError(f"uniqueness ratio must be >= 1, got {self.uniqueness_ratio}")


# --- calibration -------------------------------------------------------------

@dataclass(frozen=True)
class BoardModel:
    cols: int
    rows: int
    square_size: float

    def __post_init__(self):
        if self.cols < 2 or self.rows < 2:
            raise ValueError(f"board needs at least 2x2 inner corners, got {self.cols}x{self.rows}")
        if not self.square_size > 0:
            raise ValueError(f"square size must be > 0, got {self.square_size}")

    @property
    def corner_count(self) -> int:
        return self.cols * self.rows

    def object_points(self) -> np.ndarray:
        """Board-plane corner coordinates (N, 3) in meters; corner i sits at column i % cols, row i // cols."""
        idx = np.arange(self.corner_count)
        pts = np.zeros((self.corner_count, 3))
        pts[:, 0] = (idx % self.cols) * self.square_size
        pts[:, 1] = (idx // self.cols) * self.square_size
        return pts


@dataclass(eq=False)
class ViewObservation:
    view_id: str
    camera: str
    corners: np.ndarray

    def __post_init__(self):
        self.corners = np.asarray(self.corners, dtype=np.float64).reshape(-1, 2)


@dataclass(eq=False)
class CornerObservationSet:
    board: BoardModel
    views: List[ViewObservation] = field(default_factory=list)

    def for_camera(self, camera: str) -> "CornerObservationSet":
        return CornerObservationSet(self.board, [v for v in self.views if v.camera == camera])

    def view_ids(self) -> List[str]:
        return [v.view_id for v in self.views]

    def view(self, view_id: str, camera: str) -> ViewObservation:
        for v in self.views:
            if v.view_id == view_id and v.camera == camera:
                return v
        raise KeyError((view_id, camera))


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole intrinsics; `pixel_size` is mm per pixel so that focal_mm = fx * pixel_size."""
    fx: float
    fy: float
    cx: float
    cy: float
    pixel_size: float

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise ValueError(f"focal lengths must be positive, got fx={self.fx}, fy={self.fy}")
        if not self.pixel_size > 0:
            raise ValueError(f"pixel size must be positive, got {self.pixel_size}")

    @property
    def focal_mm(self) -> float:
        return self.fx * self.pixel_size

    @classmethod
    def from_physical(cls, focal_mm: float, pixel_size: float, cx: float, cy: float) -> "CameraIntrinsics":
        f_px = focal_mm / pixel_size
        return cls(f_px, f_px, cx, cy, pixel_size)

    def matrix(self) -> np.ndarray:
        return np.array([[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]])

    def scaled(self, s: float) -> "CameraIntrinsics":
        """Same camera seen through an image scaled by s (pixel pitch shrinks by s)."""
        return CameraIntrinsics(self.fx * s, self.fy * s, self.cx * s, self.cy * s, self.pixel_size / s)


@dataclass(eq=False)
class Pose:
    """Board-to-camera rigid transform: X_cam = R(rotation) @ X_board + translation."""
    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        rot = np.asarray(self.rotation, dtype=np.float64).reshape(3)
        self.translation = np.asarray(self.translation, dtype=np.float64).reshape(3)
        if not (np.all(np.isfinite(rot)) and np.all(np.isfinite(self.translation))):
            raise ValueError("pose must be finite")
        # as_rotvec keeps the magnitude in [0, pi]
        self.rotation = Rotation.from_rotvec(rot).as_rotvec() if np.linalg.norm(rot) > math.pi else rot

    @classmethod
    def from_matrix(cls, rotation_matrix: np.ndarray, translation) -> "Pose":
        return cls(Rotation.from_matrix(rotation_matrix).as_rotvec(), translation)

    def rotation_matrix(self) -> np.ndarray:
        return Rotation.from_rotvec(self.rotation).as_matrix()

    def apply(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points, dtype=np.float64) @ self.rotation_matrix().T + self.translation


@dataclass(eq=False)
class StereoRig:
    """Left/right intrinsics plus X_right = R(relative_rotation) @ X_left + baseline_vector."""
    left: CameraIntrinsics
    right: CameraIntrinsics
    relative_rotation: np.ndarray
    baseline_vector: np.ndarray

    def __post_init__(self):
        self.relative_rotation = np.asarray(self.relative_rotation, dtype=np.float64).reshape(3)
        self.baseline_vector = np.asarray(self.baseline_vector, dtype=np.float64).reshape(3)
        norm = np.linalg.norm(self.baseline_vector)
        if not (np.isfinite(norm) and norm > 0):
            raise DegenerateBaseline(
                f"stereo rig needs a finite non-zero baseline, got {self.baseline_vector.tolist()}"
            )

    @property
    def baseline(self) -> float:
        return float(np.linalg.norm(self.baseline_vector))

    def camera(self, side: str) -> CameraIntrinsics:
        if side not in ("left", "right"):
            raise ValueError(f"camera must be 'left' or 'right', got {side!r}")
        return self.left if side == "left" else self.right


@dataclass
class CoverageBuckets:
    x_left: bool = False
    x_right: bool = False
    y_top: bool = False
    y_bottom: bool = False
    skew: bool = False
    size_fill: bool = False
    size_far: bool = False
    overall_tilt: bool = False

    BUCKETS = ("x_left", "x_right", "y_top", "y_bottom", "skew", "size_fill", "size_far", "overall_tilt")

    def merged(self, other: "CoverageBuckets") -> "CoverageBuckets":
        return CoverageBuckets(**{b: getattr(self, b) or getattr(other, b) for b in self.BUCKETS})

    def unfilled(self) -> List[str]:
        return [b for b in self.BUCKETS if not getattr(self, b)]

    def items(self) -> Iterable[Tuple[str, bool]]:
        return ((b, getattr(self, b)) for b in self.BUCKETS)


@dataclass(eq=False)
class CalibrationReport:
    intrinsics: CameraIntrinsics
    poses: Dict[str, Pose]
    rms_px: float
    coverage: CoverageBuckets
    cost_history: List[float] = field(default_factory=list)
    iterations: int = 0


# --- detection and guidance --------------------------------------------------

@dataclass(frozen=True)
class Detection:
    label: str
    box: BBox
    confidence: float


@dataclass(frozen=True)
class ObjectReport:
    """A detected object with its mean distance in meters (None when unknown)."""
    label: str
    distance: Optional[float]
    box: BBox

    def __post_init__(self):
        if self.distance is not None and not self.distance > 0:
            raise ValueError(f"known distance must be > 0, got {self.distance}")

    @property
    def distance_known(self) -> bool:
        return self.distance is not None


@dataclass(frozen=True)
class RouteStep:
    text: str
    distance_m: float
    bearing: float

    def __post_init__(self):
        if self.distance_m < 0:
            raise ValueError(f"step distance must be >= 0, got {self.distance_m}")


class LabelMap:
    """Bijection between numeric class ids and label strings."""

    def __init__(self, pairs: Iterable[Tuple[int, str]] = ()):
        self._by_id: Dict[int, str] = {}
        self._by_label: Dict[str, int] = {}
        for label_id, label in pairs:
            if label_id in self._by_id:
                raise ValueError(f"duplicate label id {label_id}")
            if label in self._by_label:
                raise ValueError(f"duplicate label {label!r}")
            self._by_id[label_id] = label
            self._by_label[label] = label_id

    def __len__(self) -> int:
        return len(self._by_id)

    def __contains__(self, label: str) -> bool:
        return label in self._by_label

    def id_of(self, label: str) -> int:
        return self._by_label[label]

    def label_of(self, label_id: int) -> str:
        return self._by_id[label_id]

    def labels(self) -> List[str]:
        return [self._by_id[i] for i in sorted(self._by_id)]


@dataclass(eq=False)
class AnnotationSet:
    """Stand-in detector output: frame id -> detections in file order."""
    entries: Dict[str, List[Detection]] = field(default_factory=dict)

    def frame_ids(self) -> List[str]:
        return list(self.entries)

    def for_frame(self, frame_id: str) -> List[Detection]:
        return list(self.entries.get(frame_id, []))
