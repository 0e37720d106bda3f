import socket
import struct
import threading
import time

import numpy as np
import pytest

from src import config
from src.errors import BindFailure, ConfigError, ConnectFailure, PayloadLengthMismatch, UnknownKind, UnknownVersion, \
    WireBadMagic, WireError
from src.guide import SpeakInput
from src.models import BBox, ObjectReport, RouteStep
from src.wire import (
    NEED_MORE_BYTES,
    CompanionClient,
    FrameDecoder,
    FrameKind,
    ReportBatch,
    ReportServer,
    WireFrame,
    WireObject,
    batch_frame,
    batch_to_reports,
    beep,
    decode_batch,
    decode_frame,
    encode_frame,
    format_endpoint,
    heartbeat,
    parse_endpoint,
    receive,
    reports_to_batch,
)
from src.wire.codec import BATCH_HEADER, BATCH_OBJECT, HEADER, MAGIC


def _random_batch(rng) -> ReportBatch:
    objects = []
    for _ in range(int(rng.integers(0, 6))):
        mm = None if rng.random() < 0.2 else int(rng.integers(1, 0xFFFFFFFF))
        x, y, w, h = (int(v) for v in rng.integers(0, 0x10000, size=4))
        objects.append(WireObject(int(rng.integers(1, 91)), mm, x, y, w, h))
    return ReportBatch(int(rng.integers(0, 2 ** 32)), tuple(objects))


def _random_frame(rng) -> WireFrame:
    kind = rng.integers(0, 3)
    if kind == 0:
        return batch_frame(_random_batch(rng))
    return heartbeat() if kind == 1 else beep()


# --- codec -------------------------------------------------------------------

def test_heartbeat_bytes():
    assert encode_frame(heartbeat()) == bytes([0x44, 0x52, 0x53, 0x48, 0x01, 0x02, 0x00, 0x00])


def test_beep_bytes():
    assert encode_frame(beep()) == b"DRSH\x01\x03\x00\x00"


def test_frame_roundtrip(rng):
    for _ in range(1000):
        frame = _random_frame(rng)
        data = encode_frame(frame)
        assert decode_frame(data) == (frame, len(data))
        if frame.kind == FrameKind.REPORT_BATCH:
            assert encode_frame(batch_frame(decode_batch(frame.payload))) == data


def test_decode_fuzz_never_crashes():
    rng = np.random.default_rng(99)
    for i in range(10_000):
        junk = rng.integers(0, 256, size=int(rng.integers(0, 40)), dtype=np.uint8).tobytes()
        if i % 2:
            junk = MAGIC + bytes([1, int(rng.integers(0, 5))]) + junk
        try:
            result = decode_frame(junk)
        except WireError:
            continue
        assert result is NEED_MORE_BYTES or isinstance(result[0], WireFrame)


def test_partial_header_needs_more_bytes():
    assert decode_frame(encode_frame(heartbeat())[:7]) is NEED_MORE_BYTES
    assert decode_frame(b"") is NEED_MORE_BYTES


def test_partial_payload_needs_more_bytes():
    data = encode_frame(batch_frame(ReportBatch(1, (WireObject(62, 1524, 1, 2, 3, 4),))))
    assert decode_frame(data[:-1]) is NEED_MORE_BYTES


def test_bad_magic():
    with pytest.raises(WireBadMagic):
        decode_frame(b"XRSH\x01\x02\x00\x00")
    with pytest.raises(WireBadMagic):
        decode_frame(b"DX")


def test_unknown_version_and_kind():
    with pytest.raises(UnknownVersion):
        decode_frame(b"DRSH\x02\x02\x00\x00")
    with pytest.raises(UnknownKind):
        decode_frame(b"DRSH\x01\x09\x00\x00")


def test_batch_count_mismatch():
    payload = BATCH_HEADER.pack(7, 2) + BATCH_OBJECT.pack(62, 1000, 0, 0, 5, 5)
    with pytest.raises(PayloadLengthMismatch):
        decode_frame(HEADER.pack(MAGIC, 1, FrameKind.REPORT_BATCH, len(payload)) + payload)


def test_heartbeat_with_payload_rejected():
    with pytest.raises(PayloadLengthMismatch):
        decode_frame(HEADER.pack(MAGIC, 1, FrameKind.HEARTBEAT, 1) + b"\x00")


def test_corrupted_batch_frames_are_rejected_or_consistent(label_map):
    rng = np.random.default_rng(12)
    source = encode_frame(batch_frame(ReportBatch(9, (WireObject(62, 1524, 120, 80, 60, 90),
                                                     WireObject(1, None, 0, 0, 5, 5)))))
    for _ in range(3000):
        data = bytearray(source)
        if rng.random() < 0.3:
            data = data[:int(rng.integers(0, len(data)))]
        else:
            data[int(rng.integers(0, len(data)))] ^= 1 << int(rng.integers(0, 8))
        data = bytes(data)
        try:
            result = decode_frame(data)
        except WireError:
            continue
        if result is NEED_MORE_BYTES:
            continue
        frame, consumed = result
        assert encode_frame(frame) == data[:consumed]
        if frame.kind != FrameKind.REPORT_BATCH:
            continue
        try:
            reports = batch_to_reports(decode_batch(frame.payload), label_map)
        except WireError:
            continue
        for report in reports:
            assert report.label in label_map
            assert report.box.w >= 1 and report.box.h >= 1
            assert report.distance is None or report.distance > 0


def test_decoder_handles_byte_by_byte_delivery(rng):
    frames = [_random_frame(rng) for _ in range(20)]
    stream = b"".join(encode_frame(f) for f in frames)
    decoder = FrameDecoder()
    received = []
    for i in range(len(stream)):
        received.extend(decoder.feed(stream[i:i + 1]))
    assert received == frames
    assert decoder.pending == 0


def test_reports_survive_the_link(label_map):
    reports = [
        ObjectReport("chair", 1.524, BBox(120, 80, 60, 90)),
        ObjectReport("person", None, BBox(0, 0, 5, 5)),
    ]
    batch = reports_to_batch(3, reports, label_map)
    assert batch.objects[0] == WireObject(62, 1524, 120, 80, 60, 90)
    assert batch.objects[1].distance_mm is None
    back = batch_to_reports(decode_batch(batch_frame(batch).payload), label_map)
    assert back == reports


def test_negative_box_corner_is_clamped(label_map):
    batch = reports_to_batch(0, [ObjectReport("chair", 2.0, BBox(-4, -1, 10, 10))], label_map)
    assert (batch.objects[0].x, batch.objects[0].y) == (0, 0)


def test_unknown_label_id_on_the_wire(label_map):
    with pytest.raises(WireError):
        batch_to_reports(ReportBatch(0, (WireObject(999, 10, 0, 0, 1, 1),)), label_map)


# --- endpoints ---------------------------------------------------------------

def test_parse_endpoint():
    assert parse_endpoint("10.0.0.2:5321") == ("10.0.0.2", 5321)
    assert parse_endpoint(":0") == (config.HOST, 0)
    assert parse_endpoint("8080") == (config.HOST, 8080)
    assert format_endpoint(("10.0.0.2", 5321)) == "10.0.0.2:5321"


@pytest.mark.parametrize("text", ["host:", "host:http", "host:70000"])
def test_bad_endpoint(text):
    with pytest.raises(ConfigError):
        parse_endpoint(text)


# --- live link ---------------------------------------------------------------

def _start_server(stream, heartbeat_seconds=1.0):
    server = ReportServer(("127.0.0.1", 0), heartbeat_seconds)
    address = server.bind()
    thread = threading.Thread(target=server.run, args=(stream,), daemon=True)
    thread.start()
    return server, address, thread


def _one_shot_peer(behaviour):
    """Raw TCP peer that runs `behaviour(conn)` for the first client, then closes."""
    listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    listener.bind(("127.0.0.1", 0))
    listener.listen(1)

    def run():
        conn, _ = listener.accept()
        with conn:
            behaviour(conn)
        listener.close()

    threading.Thread(target=run, daemon=True).start()
    return listener.getsockname()


def test_batches_arrive_in_order():
    server, address, thread = _start_server([ReportBatch(i) for i in range(3)])
    frames = []
    receive(address, frames.append, link_timeout=3.5)
    thread.join(timeout=5)

    assert not thread.is_alive()
    batches = [decode_batch(f.payload).frame_id for f in frames if f.kind == FrameKind.REPORT_BATCH]
    assert batches == [0, 1, 2]
    assert not any(f.kind == FrameKind.BEEP for f in frames)
    assert server.stream_frames_sent == 3


def test_heartbeats_while_idle():
    def slow_stream():
        time.sleep(2.5)
        yield ReportBatch(1)

    server, address, thread = _start_server(slow_stream(), heartbeat_seconds=1.0)
    frames = []
    receive(address, frames.append, link_timeout=3.5)
    thread.join(timeout=5)

    kinds = [f.kind for f in frames]
    assert kinds.count(FrameKind.HEARTBEAT) >= 2
    assert kinds[-1] == FrameKind.REPORT_BATCH
    assert FrameKind.BEEP not in kinds


def test_beep_items_are_forwarded():
    _, address, thread = _start_server([ReportBatch(0), beep(), ReportBatch(1)])
    frames = []
    receive(address, frames.append, link_timeout=3.5)
    thread.join(timeout=5)
    assert [f.kind for f in frames] == [FrameKind.REPORT_BATCH, FrameKind.BEEP, FrameKind.REPORT_BATCH]
    assert not frames[1].local


def test_disconnect_mid_frame_beeps_locally():
    data = encode_frame(batch_frame(ReportBatch(5, (WireObject(62, 1524, 1, 2, 3, 4),))))
    address = _one_shot_peer(lambda conn: conn.sendall(data[:10]))
    frames = []
    with CompanionClient(address, link_timeout=3.5) as client:
        client.listen(frames.append)
        assert client.beeped
    assert len(frames) == 1
    assert frames[0].kind == FrameKind.BEEP and frames[0].local


def test_close_at_frame_boundary_is_not_a_beep():
    address = _one_shot_peer(lambda conn: conn.sendall(encode_frame(heartbeat())))
    frames = []
    with CompanionClient(address, link_timeout=3.5) as client:
        client.listen(frames.append)
        assert not client.beeped
    assert [f.kind for f in frames] == [FrameKind.HEARTBEAT]


def test_silent_link_times_out_with_beep():
    done = threading.Event()
    address = _one_shot_peer(lambda conn: done.wait(5))
    frames = []
    receive(address, frames.append, link_timeout=0.3)
    done.set()
    assert [f.kind for f in frames] == [FrameKind.BEEP]
    assert frames[0].local


def test_garbage_stream_beeps():
    address = _one_shot_peer(lambda conn: conn.sendall(b"HTTP/1.1 200 OK\r\n"))
    frames = []
    receive(address, frames.append, link_timeout=3.5)
    assert [f.kind for f in frames] == [FrameKind.BEEP]


def test_connect_failure():
    vacant = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    vacant.bind(("127.0.0.1", 0))
    address = vacant.getsockname()
    vacant.close()
    with pytest.raises(ConnectFailure):
        with CompanionClient(address, link_timeout=1.0):
            pass


def test_thousand_frame_soak():
    _, address, thread = _start_server(ReportBatch(i, (WireObject(1, i + 1, 0, 0, 1, 1),)) for i in range(1000))
    ids = []

    def collect(frame):
        if frame.kind == FrameKind.REPORT_BATCH:
            ids.append(decode_batch(frame.payload).frame_id)

    receive(address, collect, link_timeout=3.5)
    thread.join(timeout=10)
    assert ids == list(range(1000))


def test_undecodable_batch_beeps_through_the_speaker(label_map):
    bad = ReportBatch(0, (WireObject(999, 1000, 0, 0, 1, 1),))
    address = _one_shot_peer(lambda conn: conn.sendall(encode_frame(batch_frame(bad))))
    lines = []
    speak = SpeakInput([RouteStep("Head north on Main Way", 111.2, 0.0)], label_map, emit=lines.append)
    with CompanionClient(address, link_timeout=3.5) as client:
        client.listen(speak)
        assert client.beeped
    assert lines == ["BEEP"]


def _read_frames(sock, count):
    decoder = FrameDecoder()
    frames = []
    while len(frames) < count:
        data = sock.recv(4096)
        if not data:
            break
        frames.extend(decoder.feed(data))
    return frames


def _batch_ids(frames):
    return [decode_batch(f.payload).frame_id for f in frames if f.kind == FrameKind.REPORT_BATCH]


def _gated_stream(gate, first=1, total=3):
    for i in range(total):
        if i == first:
            gate.wait(5)
        yield ReportBatch(i)


def test_frame_in_flight_is_redelivered_to_next_client():
    gate = threading.Event()
    server, address, thread = _start_server(_gated_stream(gate), heartbeat_seconds=10.0)
    with socket.create_connection(address, timeout=5) as first:
        assert _batch_ids(_read_frames(first, 1)) == [0]
    time.sleep(0.2)
    gate.set()

    frames = []
    receive(address, frames.append, link_timeout=3.5)
    thread.join(timeout=5)

    assert _batch_ids(frames) == [1, 2]
    assert server.disconnects == 1
    assert server.stream_frames_sent == 3


def test_second_client_waits_until_first_is_done():
    gate = threading.Event()
    server, address, thread = _start_server(_gated_stream(gate), heartbeat_seconds=10.0)
    first = socket.create_connection(address, timeout=5)
    assert _batch_ids(_read_frames(first, 1)) == [0]
    second = socket.create_connection(address, timeout=0.5)
    with pytest.raises(socket.timeout):
        second.recv(4096)

    gate.set()
    assert _batch_ids(_read_frames(first, 2)) == [1, 2]
    assert first.recv(4096) == b""
    thread.join(timeout=5)

    second.settimeout(5)
    try:
        leftover = second.recv(4096)
    except ConnectionResetError:
        leftover = b""
    assert leftover == b""
    assert server.clients_served == 1
    first.close()
    second.close()


def test_client_bytes_are_ignored():
    gate = threading.Event()
    server, address, thread = _start_server(_gated_stream(gate, first=0), heartbeat_seconds=10.0)
    with socket.create_connection(address, timeout=5) as conn:
        conn.sendall(b"GET / HTTP/1.1\r\n\r\n" * 50)
        time.sleep(0.3)
        gate.set()
        assert _batch_ids(_read_frames(conn, 3)) == [0, 1, 2]
    thread.join(timeout=5)
    assert server.disconnects == 0


def test_bind_failure_on_busy_port():
    busy = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    busy.bind(("127.0.0.1", 0))
    busy.listen(1)
    try:
        with pytest.raises(BindFailure):
            ReportServer(busy.getsockname()).bind()
    finally:
        busy.close()
