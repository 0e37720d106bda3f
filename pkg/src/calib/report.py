"""
Line-oriented calibration reports:

    param,<name>,<value>
    rms_px,<value>
    coverage,<bucket>,<true|false>

Floats are written with repr() so reading a report back is exact.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.calib.stereo_calib import StereoCalibration
from src.errors import DegenerateBaseline, ReportFormatError
from src.models import CalibrationReport, CameraIntrinsics, CoverageBuckets, StereoRig

_INTRINSIC_FIELDS = ("fx", "fy", "cx", "cy", "pixel_size")
_AXES = ("x", "y", "z")


@dataclass
class ParsedReport:
    params: Dict[str, float] = field(default_factory=dict)
    rms_px: Optional[float] = None
    coverage: Optional[CoverageBuckets] = None


def _intrinsic_lines(prefix: str, intr: CameraIntrinsics) -> List[str]:
    lines = [f"param,{prefix}{name},{float(getattr(intr, name))!r}" for name in _INTRINSIC_FIELDS]
    lines.append(f"param,{prefix}focal_mm,{float(intr.focal_mm)!r}")
    return lines


def _coverage_lines(coverage: CoverageBuckets) -> List[str]:
    return [f"coverage,{name},{'true' if filled else 'false'}" for name, filled in coverage.items()]


def format_calibration_report(report: CalibrationReport) -> str:
    lines = _intrinsic_lines("", report.intrinsics)
    for view_id, pose in report.poses.items():
        for axis, value in zip(_AXES, pose.rotation):
            lines.append(f"param,view.{view_id}.r{axis},{float(value)!r}")
        for axis, value in zip(_AXES, pose.translation):
            lines.append(f"param,view.{view_id}.t{axis},{float(value)!r}")
    lines.append(f"rms_px,{float(report.rms_px)!r}")
    lines.extend(_coverage_lines(report.coverage))
    return "\n".join(lines) + "\n"


def format_stereo_report(calibration: StereoCalibration, coverage: Optional[CoverageBuckets] = None) -> str:
    rig = calibration.rig
    lines = _intrinsic_lines("left.", rig.left) + _intrinsic_lines("right.", rig.right)
    lines += [f"param,rotation.{a},{float(v)!r}" for a, v in zip(_AXES, rig.relative_rotation)]
    lines += [f"param,translation.{a},{float(v)!r}" for a, v in zip(_AXES, rig.baseline_vector)]
    lines.append(f"param,baseline,{rig.baseline!r}")
    lines.append(f"rms_px,{calibration.rms_px!r}")
    if coverage is not None:
        lines.extend(_coverage_lines(coverage))
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> ParsedReport:
    parsed = ParsedReport()
    buckets: Dict[str, bool] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split(",")
        kind = fields[0]
        try:
            if kind == "param" and len(fields) == 3:
                if fields[1] in parsed.params:
                    raise ReportFormatError(f"parameter {fields[1]!r} repeated", lineno)
                parsed.params[fields[1]] = float(fields[2])
            elif kind == "rms_px" and len(fields) == 2:
                parsed.rms_px = float(fields[1])
            elif kind == "coverage" and len(fields) == 3:
                if fields[1] not in CoverageBuckets.BUCKETS or fields[2] not in ("true", "false"):
                    raise ReportFormatError(f"bad coverage line {line!r}", lineno)
                buckets[fields[1]] = fields[2] == "true"
            else:
                raise ReportFormatError(f"unrecognized report line {line!r}", lineno)
        except ValueError:
            raise ReportFormatError(f"bad number in {line!r}", lineno)
    if buckets:
        parsed.coverage = CoverageBuckets(**buckets)
    return parsed


def _require(params: Dict[str, float], name: str) -> float:
    if name not in params:
        raise ReportFormatError(f"report is missing parameter {name!r}")
    return params[name]


def _intrinsics_from(params: Dict[str, float], prefix: str) -> CameraIntrinsics:
    try:
        return CameraIntrinsics(*(_require(params, prefix + name) for name in _INTRINSIC_FIELDS))
    except ValueError as e:
        raise ReportFormatError(f"invalid {prefix or 'camera '}intrinsics: {e}")


def parse_calibration_report(text: str) -> Tuple[CameraIntrinsics, Optional[float]]:
    parsed = parse_report(text)
    return _intrinsics_from(parsed.params, ""), parsed.rms_px


def parse_stereo_report(text: str) -> Tuple[StereoRig, Optional[float]]:
    """Rig and rms from a stereo report; raises ReportFormatError on missing or invalid parameters."""
    parsed = parse_report(text)
    p = parsed.params
    left, right = _intrinsics_from(p, "left."), _intrinsics_from(p, "right.")
    rotation = np.array([_require(p, f"rotation.{a}") for a in _AXES])
    translation = np.array([_require(p, f"translation.{a}") for a in _AXES])
    try:
        rig = StereoRig(left, right, rotation, translation)
    except DegenerateBaseline as e:
        raise ReportFormatError(f"stereo report: {e}")
    return rig, parsed.rms_px


def read_stereo_report(path) -> Tuple[StereoRig, Optional[float]]:
    with open(path, "r", encoding="utf-8") as f:
        return parse_stereo_report(f.read())
