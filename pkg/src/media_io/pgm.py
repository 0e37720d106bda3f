"""Binary PGM (P5) codec, maxval <= 255."""

import numpy as np

from src.errors import BadMagic, MaxvalUnsupported, PixelAboveMaxval, TruncatedData
from src.models import GrayImage

_WHITESPACE = b" \t\r\n\v\f"


def _read_header_token(data: bytes, pos: int):
    """Return (token, position after token), skipping whitespace and # comments."""
    n = len(data)
    while pos < n:
        if data[pos] in _WHITESPACE:
            pos += 1
        elif data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        else:
            break
    start = pos
    while pos < n and data[pos] not in _WHITESPACE and data[pos:pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise TruncatedData("PGM header ended early")
    return data[start:pos], pos


def decode_pgm(data: bytes) -> GrayImage:
    if data[:2] != b"P5":
        raise BadMagic(f"expected binary PGM magic 'P5', got {data[:2]!r}")
    pos = 2
    fields = []
    for name in ("width", "height", "maxval"):
        token, pos = _read_header_token(data, pos)
        try:
            fields.append(int(token))
        except ValueError:
            raise TruncatedData(f"PGM {name} is not an integer: {token!r}")
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise TruncatedData(f"PGM dimensions must be >= 1, got {width}x{height}")
    if maxval > 255:
        raise MaxvalUnsupported(f"maxval {maxval} needs 16-bit samples; only <= 255 is supported")
    if maxval < 1:
        raise MaxvalUnsupported(f"maxval must be >= 1, got {maxval}")
    # exactly one whitespace byte separates the header from the raster
    if pos >= len(data):
        raise TruncatedData("PGM header is not followed by pixel data")
    pos += 1
    expected = width * height
    raster = data[pos:pos + expected]
    if len(raster) < expected:
        raise TruncatedData(f"PGM raster holds {len(raster)} bytes, header claims {expected}")
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    if maxval < 255 and int(pixels.max()) > maxval:
        raise PixelAboveMaxval(f"PGM sample {int(pixels.max())} exceeds maxval {maxval}")
    return GrayImage(pixels.copy())


def encode_pgm(img: GrayImage) -> bytes:
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes(order="C")


def read_pgm(path) -> GrayImage:
    with open(path, "rb") as f:
        return decode_pgm(f.read())


def write_pgm(path, img: GrayImage):
    with open(path, "wb") as f:
        f.write(encode_pgm(img))
