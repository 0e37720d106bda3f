import numpy as np
import pytest

from src.media_io.annotations import default_label_map
from src.models import BoardModel, CameraIntrinsics, GrayImage, StereoRig


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def label_map():
    return default_label_map()


@pytest.fixture
def board():
    return BoardModel(8, 6, 0.03)


@pytest.fixture
def camera_truth():
    """f = 2.0 mm at 0.003 mm pixels, 640x480 sensor."""
    return CameraIntrinsics.from_physical(2.0, 0.003, 320.0, 240.0)


@pytest.fixture
def stereo_truth(camera_truth):
    """Right camera 6 cm to the right of the left one."""
    return StereoRig(camera_truth, camera_truth, np.zeros(3), np.array([-0.06, 0.0, 0.0]))


@pytest.fixture
def textured_image(rng):
    return GrayImage(rng.integers(0, 256, size=(60, 120), dtype=np.uint8))
