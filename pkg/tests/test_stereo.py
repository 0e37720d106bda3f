import numpy as np
import pytest

from src.errors import NonPositiveDisparity, NoValidDepth, SizeMismatch
from src.models import BBox, CameraIntrinsics, DepthMap, DisparityMap, GrayImage, MatchParams, StereoRig
from src.sim.scene import SceneLayer, disparity_for_distance, inset_box, render_layered_scene
from src.stereo.depth import depth_from_disparity, depth_map, object_distance
from src.stereo.disparity import compute_disparity

FEET_PER_METER = 3.28084


def _rig(baseline: float, focal_mm: float, pixel_size: float) -> StereoRig:
    intr = CameraIntrinsics.from_physical(focal_mm, pixel_size, 0.0, 0.0)
    return StereoRig(intr, intr, np.zeros(3), np.array([-baseline, 0.0, 0.0]))


def _shifted_pair(rng, shift: int, width: int = 120, height: int = 60):
    base = rng.integers(0, 256, size=(height, width + shift), dtype=np.uint8)
    return GrayImage(base[:, :width]), GrayImage(base[:, shift:shift + width])


# --- disparity ---------------------------------------------------------------

def test_uniform_shift_is_recovered(rng):
    left, right = _shifted_pair(rng, 7)
    disp = compute_disparity(left, right, MatchParams(window=9, d_min=0, d_max=16))
    values = disp.values[disp.valid]
    assert values.size > 0
    assert np.mean(np.abs(values - 7) <= 1) >= 0.95


def test_identical_images_have_zero_disparity(textured_image):
    disp = compute_disparity(textured_image, textured_image, MatchParams(d_max=16))
    assert disp.valid.any()
    assert np.all(disp.values[disp.valid] == 0)


def test_uniform_images_are_all_invalid():
    flat = GrayImage(np.full((40, 80), 128, dtype=np.uint8))
    disp = compute_disparity(flat, flat, MatchParams(d_max=16))
    assert not disp.valid.any()


def test_border_pixels_are_invalid(textured_image):
    p = MatchParams(window=9, d_max=16)
    disp = compute_disparity(textured_image, textured_image, p)
    half = p.window // 2
    assert not disp.valid[:half].any()
    assert not disp.valid[-half:].any()
    assert not disp.valid[:, :half + p.d_max].any()
    assert not disp.valid[:, -half:].any()


def test_worker_count_does_not_change_result(rng):
    left, right = _shifted_pair(rng, 5, width=140, height=100)
    p = MatchParams(d_max=20)
    assert compute_disparity(left, right, p, workers=1) == compute_disparity(left, right, p, workers=4)


def test_size_mismatch(textured_image):
    smaller = GrayImage(textured_image.pixels[:, :-1])
    with pytest.raises(SizeMismatch):
        compute_disparity(textured_image, smaller)


def test_image_smaller_than_search_range_is_all_invalid():
    tiny = GrayImage(np.arange(100, dtype=np.uint8).reshape(10, 10))
    assert not compute_disparity(tiny, tiny, MatchParams(d_max=16)).valid.any()


# --- depth -------------------------------------------------------------------

def test_depth_unit_identity():
    assert depth_from_disparity(1.0, _rig(1.0, 1.0, 1.0)) == pytest.approx(1.0)


def test_depth_for_small_camera():
    assert depth_from_disparity(50.0, _rig(0.1, 2.0, 0.003)) == pytest.approx(1.3333, abs=1e-4)


def test_depth_with_recovered_focal_length():
    nominal = depth_from_disparity(50.0, _rig(0.1, 2.0, 0.003))
    recovered = depth_from_disparity(50.0, _rig(0.1, 1.9333, 0.003))
    assert recovered / nominal == pytest.approx(0.96665, abs=1e-4)


@pytest.mark.parametrize("d", [0.0, -3.0])
def test_depth_needs_positive_disparity(d):
    with pytest.raises(NonPositiveDisparity):
        depth_from_disparity(d, _rig(0.1, 2.0, 0.003))


def test_depth_scaling_laws():
    d = np.array([5.0, 10.0, 20.0, 40.0])
    base = np.array([depth_from_disparity(x, _rig(0.1, 2.0, 0.003)) for x in d])
    assert np.all(np.diff(base) < 0)
    doubled_baseline = np.array([depth_from_disparity(x, _rig(0.2, 2.0, 0.003)) for x in d])
    np.testing.assert_allclose(doubled_baseline, 2 * base)
    doubled_pixel = np.array([depth_from_disparity(x, _rig(0.1, 2.0, 0.006)) for x in d])
    np.testing.assert_allclose(doubled_pixel, base / 2)


def test_depth_map_all_invalid():
    disp = DisparityMap(np.full((3, 4), np.nan), np.zeros((3, 4), dtype=bool))
    assert not depth_map(disp, _rig(0.1, 2.0, 0.003)).valid.any()


def test_depth_map_constant_disparity():
    rig = _rig(1.0, 1.0, 0.01)  # b * fx = 100
    disp = DisparityMap(np.full((4, 5), 10.0), np.ones((4, 5), dtype=bool))
    depth = depth_map(disp, rig)
    np.testing.assert_allclose(depth.values, 10.0)


def test_depth_map_drops_non_positive_disparities():
    values = np.array([[0.0, 2.0, -1.0], [4.0, np.nan, 8.0]])
    valid = np.array([[True, True, True], [True, False, True]])
    depth = depth_map(DisparityMap(values, valid), _rig(1.0, 1.0, 0.01))
    assert depth.valid.tolist() == [[False, True, False], [True, False, True]]


# --- object distance ---------------------------------------------------------

def test_object_distance_mean_of_region():
    depth = DepthMap(np.array([[1.0, 2.0], [3.0, 4.0]]), np.ones((2, 2), dtype=bool))
    assert object_distance(depth, BBox(0, 0, 2, 2)) == pytest.approx(2.5)


def test_object_distance_constant_region():
    depth = DepthMap(np.full((10, 10), 7.0), np.ones((10, 10), dtype=bool))
    for box in (BBox(0, 0, 1, 1), BBox(2, 3, 5, 4), BBox(-5, -5, 30, 30)):
        assert object_distance(depth, box) == pytest.approx(7.0)


def test_object_distance_skips_invalid_pixels():
    depth = DepthMap(np.array([[2.0, 4.0], [np.nan, 6.0]]), np.array([[True, True], [False, True]]))
    assert object_distance(depth, BBox(0, 0, 2, 2)) == pytest.approx(4.0)


def test_object_distance_is_bounded_and_order_independent(rng):
    values = rng.uniform(0.5, 9.0, size=(20, 30))
    valid = rng.random((20, 30)) > 0.2
    depth = DepthMap(values, valid)
    box = BBox(3, 2, 20, 15)
    distance = object_distance(depth, box)
    region = depth.values[2:17, 3:23][depth.valid[2:17, 3:23]]
    assert region.min() <= distance <= region.max()
    transposed = DepthMap(values.T, valid.T)
    assert object_distance(transposed, BBox(2, 3, 15, 20)) == pytest.approx(distance, abs=1e-9)


def test_object_distance_without_valid_pixels():
    depth = DepthMap(np.full((4, 4), np.nan), np.zeros((4, 4), dtype=bool))
    with pytest.raises(NoValidDepth):
        object_distance(depth, BBox(0, 0, 2, 2))


def test_object_distance_box_outside_image():
    depth = DepthMap(np.ones((4, 4)), np.ones((4, 4), dtype=bool))
    with pytest.raises(NoValidDepth):
        object_distance(depth, BBox(10, 10, 2, 2))


# --- synthetic scenes --------------------------------------------------------

@pytest.mark.parametrize("feet", [5, 8, 10, 12, 15])
def test_object_distance_within_two_feet(feet):
    rig = _rig(0.1, 1.8, 0.003)  # fx = 600, b * fx = 60
    meters = feet / FEET_PER_METER
    box = BBox(70, 15, 60, 50)
    layer = SceneLayer(box, disparity_for_distance(meters, 60.0))
    left, right = render_layered_scene(160, 80, 4, [layer], seed=feet)

    disp = compute_disparity(left, right, MatchParams(window=9, d_max=48))
    measured = object_distance(depth_map(disp, rig), inset_box(box, 6))
    assert abs(measured - meters) * FEET_PER_METER <= 2.0


def test_frontal_plane_within_quantization_bound():
    rig = _rig(0.1, 1.8, 0.003)
    true_distance = 3.1
    d = disparity_for_distance(true_distance, 60.0)
    left, right = render_layered_scene(160, 80, d, [], seed=3)
    disp = compute_disparity(left, right, MatchParams(window=9, d_max=32))
    measured = object_distance(depth_map(disp, rig), BBox(0, 0, 160, 80))
    assert abs(measured - true_distance) <= 60.0 * (1 / d - 1 / (d + 1))


def test_render_layered_scene_shifts_layer():
    left, right = render_layered_scene(60, 30, 2, [SceneLayer(BBox(20, 5, 10, 10), 6)], seed=1)
    np.testing.assert_array_equal(left.pixels[5:15, 20:30], right.pixels[5:15, 14:24])
    np.testing.assert_array_equal(left.pixels[20:, 2:], right.pixels[20:, :-2])
