from src.calib.coverage import aggregate_coverage, classify_coverage
from src.calib.geometry import compose_poses, project_point, project_points
from src.calib.homography import estimate_homography, pose_from_homography
from src.calib.intrinsics import init_intrinsics
from src.calib.lm import LMResult, levenberg_marquardt
from src.calib.rectify import RectifiedPair, rectify_image, rectify_pair
from src.calib.refine import calibrate_camera, refine_calibration
from src.calib.report import (
    format_calibration_report,
    format_stereo_report,
    parse_calibration_report,
    parse_report,
    parse_stereo_report,
    read_stereo_report,
)
from src.calib.stereo_calib import StereoCalibration, calibrate_stereo
from src.calib.synthetic import generate_synthetic_observations, make_view_poses
