"""DSP1 disparity container: magic, u32-LE width, u32-LE height, float32-LE row-major values; NaN marks invalid."""

import struct

import numpy as np

from src.errors import BadMagic, SizeMismatch
from src.models import DisparityMap

MAGIC = b"DSP1"
_HEADER = struct.Struct("<4sII")


def encode_dispmap(disp: DisparityMap) -> bytes:
    values = np.where(disp.valid, disp.values, np.nan).astype("<f4")
    return _HEADER.pack(MAGIC, disp.width, disp.height) + values.tobytes(order="C")


def decode_dispmap(data: bytes) -> DisparityMap:
    if data[:4] != MAGIC:
        raise BadMagic(f"expected disparity magic 'DSP1', got {data[:4]!r}")
    if len(data) < _HEADER.size:
        raise SizeMismatch(f"DSP1 header needs {_HEADER.size} bytes, got {len(data)}")
    _, width, height = _HEADER.unpack_from(data)
    expected = _HEADER.size + 4 * width * height
    if len(data) != expected:
        raise SizeMismatch(f"DSP1 {width}x{height} needs {expected} bytes, got {len(data)}")
    if width < 1 or height < 1:
        raise SizeMismatch(f"DSP1 dimensions must be >= 1, got {width}x{height}")
    values = np.frombuffer(data, dtype="<f4", offset=_HEADER.size).reshape(height, width)
    return DisparityMap(values.astype(np.float32), np.isfinite(values))


def read_dispmap(path) -> DisparityMap:
    with open(path, "rb") as f:
        return decode_dispmap(f.read())


def write_dispmap(path, disp: DisparityMap):
    with open(path, "wb") as f:
        f.write(encode_dispmap(disp))
