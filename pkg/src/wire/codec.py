"""
Frame format for the perception-unit to companion-device link.

    "DRSH" | version u8 (1) | kind u8 | payload length u16 | payload

All integers little-endian. A report batch payload is

    frame_id u32 | count u16 | count x (label_id u16, distance_mm u32, x u16, y u16, w u16, h u16)

with distance_mm 0xFFFFFFFF meaning the distance is unknown. Heartbeat and
beep frames carry no payload.
"""

import struct
from dataclasses import dataclass, field
from enum import IntEnum
from typing import List, Optional, Tuple, Union

from src.errors import (
    PayloadLengthMismatch,
    PayloadTooLarge,
    UnknownKind,
    UnknownVersion,
    WireBadMagic,
    WireError,
)
from src.models import BBox, LabelMap, ObjectReport

MAGIC = b"DRSH"
VERSION = 1
HEADER = struct.Struct("<4sBBH")
BATCH_HEADER = struct.Struct("<IH")
BATCH_OBJECT = struct.Struct("<HIHHHH")
MAX_PAYLOAD = 0xFFFF
UNKNOWN_DISTANCE_MM = 0xFFFFFFFF
U16_MAX = 0xFFFF


class FrameKind(IntEnum):
    REPORT_BATCH = 0x01
    HEARTBEAT = 0x02
    BEEP = 0x03


@dataclass(frozen=True)
class WireFrame:
    kind: FrameKind
    payload: bytes = b""
    # Raised on the client itself (link failure), never seen on the wire
    local: bool = field(default=False, compare=False)


class NeedMoreBytes:
    def __repr__(self):
        return "NEED_MORE_BYTES"


NEED_MORE_BYTES = NeedMoreBytes()
_KINDS = frozenset(k.value for k in FrameKind)


@dataclass(frozen=True)
class WireObject:
    label_id: int
    distance_mm: Optional[int]
    x: int
    y: int
    w: int
    h: int


@dataclass(frozen=True)
class ReportBatch:
    frame_id: int
    objects: Tuple[WireObject, ...] = ()


def heartbeat() -> WireFrame:
    return WireFrame(FrameKind.HEARTBEAT)


def beep(local: bool = False) -> WireFrame:
    return WireFrame(FrameKind.BEEP, b"", local=local)


def _check_payload(kind: FrameKind, payload: bytes):
    if kind == FrameKind.REPORT_BATCH:
        if len(payload) < BATCH_HEADER.size:
            raise PayloadLengthMismatch(f"batch payload of {len(payload)} bytes has no header")
        _, count = BATCH_HEADER.unpack_from(payload)
        expected = BATCH_HEADER.size + BATCH_OBJECT.size * count
        if len(payload) != expected:
            raise PayloadLengthMismatch(f"batch declares {count} objects ({expected} bytes) but carries {len(payload)}")
    elif payload:
        raise PayloadLengthMismatch(f"{kind.name} frame must be empty, got {len(payload)} bytes")


def encode_frame(f: WireFrame) -> bytes:
    if len(f.payload) > MAX_PAYLOAD:
        raise PayloadTooLarge(f"payload of {len(f.payload)} bytes exceeds {MAX_PAYLOAD}")
    try:
        kind = FrameKind(f.kind)
    except ValueError:
        raise UnknownKind(f"frame kind {f.kind!r} is not defined")
    _check_payload(kind, f.payload)
    return HEADER.pack(MAGIC, VERSION, kind, len(f.payload)) + bytes(f.payload)


def decode_frame(stream: bytes) -> Union[NeedMoreBytes, Tuple[WireFrame, int]]:
    """
    Decode one frame from the front of `stream`.

    Returns NEED_MORE_BYTES while the buffer holds only part of a frame, else
    (frame, bytes consumed). Header errors surface as soon as the offending
    byte has arrived.
    """
    head = bytes(stream[:HEADER.size])
    if head[:len(MAGIC)] != MAGIC[:len(head)]:
        raise WireBadMagic(f"bad magic {head[:len(MAGIC)]!r}")
    if len(head) > 4 and head[4] != VERSION:
        raise UnknownVersion(f"protocol version {head[4]} is not supported")
    if len(head) > 5 and head[5] not in _KINDS:
        raise UnknownKind(f"frame kind 0x{head[5]:02x} is not defined")
    if len(head) < HEADER.size:
        return NEED_MORE_BYTES

    _, _, kind, length = HEADER.unpack(head)
    end = HEADER.size + length
    if len(stream) < end:
        return NEED_MORE_BYTES
    payload = bytes(stream[HEADER.size:end])
    kind = FrameKind(kind)
    _check_payload(kind, payload)
    return WireFrame(kind, payload), end


class FrameDecoder:
    """Incremental decoder for a byte stream; errors are final for the stream."""

    def __init__(self):
        self._buffer = bytearray()

    @property
    def pending(self) -> int:
        return len(self._buffer)

    def feed(self, data: bytes) -> List[WireFrame]:
        self._buffer.extend(data)
        frames = []
        while self._buffer:
            result = decode_frame(self._buffer)
            if result is NEED_MORE_BYTES:
                break
            frame, consumed = result
            del self._buffer[:consumed]
            frames.append(frame)
        return frames


# --- report batches ----------------------------------------------------------

def encode_batch(batch: ReportBatch) -> bytes:
    if len(batch.objects) > U16_MAX:
        raise PayloadTooLarge(f"{len(batch.objects)} objects do not fit one batch")
    parts = [BATCH_HEADER.pack(batch.frame_id, len(batch.objects))]
    try:
        for o in batch.objects:
            mm = UNKNOWN_DISTANCE_MM if o.distance_mm is None else o.distance_mm
            parts.append(BATCH_OBJECT.pack(o.label_id, mm, o.x, o.y, o.w, o.h))
    except struct.error as e:
        raise WireError(f"batch field out of range: {e}")
    payload = b"".join(parts)
    if len(payload) > MAX_PAYLOAD:
        raise PayloadTooLarge(f"batch payload of {len(payload)} bytes exceeds {MAX_PAYLOAD}")
    return payload


def decode_batch(payload: bytes) -> ReportBatch:
    _check_payload(FrameKind.REPORT_BATCH, payload)
    frame_id, count = BATCH_HEADER.unpack_from(payload)
    objects = []
    for i in range(count):
        label_id, mm, x, y, w, h = BATCH_OBJECT.unpack_from(payload, BATCH_HEADER.size + i * BATCH_OBJECT.size)
        objects.append(WireObject(label_id, None if mm == UNKNOWN_DISTANCE_MM else mm, x, y, w, h))
    return ReportBatch(frame_id, tuple(objects))


def batch_frame(batch: ReportBatch) -> WireFrame:
    return WireFrame(FrameKind.REPORT_BATCH, encode_batch(batch))


def _u16(value: int) -> int:
    return min(max(int(value), 0), U16_MAX)


def reports_to_batch(frame_id: int, reports: List[ObjectReport], label_map: LabelMap) -> ReportBatch:
    """
    Wire form of a frame's reports: labels become ids, meters become whole millimeters.

    Box corners left of or above the image are clamped to 0.
    """
    objects = []
    for r in reports:
        if r.distance is None:
            mm = None
        else:
            mm = min(max(int(round(r.distance * 1000.0)), 1), UNKNOWN_DISTANCE_MM - 1)
        objects.append(WireObject(label_map.id_of(r.label), mm, _u16(r.box.x), _u16(r.box.y),
                                  _u16(r.box.w), _u16(r.box.h)))
    return ReportBatch(frame_id, tuple(objects))


def batch_to_reports(batch: ReportBatch, label_map: LabelMap) -> List[ObjectReport]:
    reports = []
    for o in batch.objects:
        try:
            label = label_map.label_of(o.label_id)
        except KeyError:
            raise WireError(f"label id {o.label_id} is not in the label map")
        if o.w < 1 or o.h < 1:
            raise WireError(f"object box {o.w}x{o.h} is empty")
        distance = None if o.distance_mm is None else max(o.distance_mm, 1) / 1000.0
        reports.append(ObjectReport(label, distance, BBox(o.x, o.y, o.w, o.h)))
    return reports
