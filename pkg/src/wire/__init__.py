from src.wire.client import CompanionClient, receive
from src.wire.codec import (
    NEED_MORE_BYTES,
    FrameDecoder,
    FrameKind,
    ReportBatch,
    WireFrame,
    WireObject,
    batch_frame,
    batch_to_reports,
    beep,
    decode_batch,
    decode_frame,
    encode_batch,
    encode_frame,
    heartbeat,
    reports_to_batch,
)
from src.wire.endpoint import format_endpoint, parse_endpoint
from src.wire.server import ReportServer, serve
