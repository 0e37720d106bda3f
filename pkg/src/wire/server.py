"""
Push-only report server for the perception unit.

Accepts one companion client at a time and streams report batches to it in
order, with a heartbeat after every idle interval. Nothing the client sends is
interpreted. When the client goes away the server keeps the undelivered frame
and goes back to accepting; it returns once the report stream has ended and
every frame has been delivered.
"""

import logging
import queue
import select
import signal
import socket
import threading
import time
from datetime import datetime
from typing import Iterable, Optional, Tuple, Union

from src import config
from src.errors import BindFailure
from src.wire.codec import ReportBatch, WireFrame, batch_frame, encode_frame, heartbeat

logger = logging.getLogger(__name__)

ACCEPT_POLL_SECONDS = 0.2
_END = object()

StreamItem = Union[ReportBatch, WireFrame]


class ReportServer:
    """
    Report server bound to a single endpoint.

    Handles:
    - Ordered handoff from a producer thread
    - One client at a time (others wait in the listen backlog)
    - Heartbeats while idle
    - Graceful shutdown on SIGTERM/SIGINT when run from the command line
    """

    def __init__(self, endpoint: Tuple[str, int], heartbeat_seconds: Optional[float] = None,
                 install_signal_handlers: bool = False):
        self.endpoint = endpoint
        self.heartbeat_seconds = heartbeat_seconds or config.HEARTBEAT_SECONDS
        self.running = True
        self.clients_served = 0
        self.stream_frames_sent = 0
        self.frames_sent = 0
        self.heartbeats_sent = 0
        self.disconnects = 0
        self.started_at = None
        self._listener: Optional[socket.socket] = None
        self._queue: "queue.Queue" = queue.Queue()
        self._held: Optional[WireFrame] = None
        self._stream_done = False

        if install_signal_handlers:
            signal.signal(signal.SIGTERM, self._handle_shutdown)
            signal.signal(signal.SIGINT, self._handle_shutdown)

    def _handle_shutdown(self, signum, frame):
        logger.info("Received shutdown signal (%s); closing the link", signal.Signals(signum).name)
        self.running = False

    def stop(self):
        self.running = False

    def bind(self) -> Tuple[str, int]:
        """Bind and listen; returns the bound address (useful with port 0)."""
        if self._listener is not None:
            return self._listener.getsockname()[:2]
        try:
            listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
            listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
            listener.bind(self.endpoint)
            listener.listen(1)
        except OSError as e:
            raise BindFailure(f"cannot bind {self.endpoint[0]}:{self.endpoint[1]}: {e}")
        listener.settimeout(ACCEPT_POLL_SECONDS)
        self._listener = listener
        address = listener.getsockname()[:2]
        logger.info("✓ Report server listening on %s:%d", *address)
        return address

    @property
    def address(self) -> Tuple[str, int]:
        return self.bind()

    def _produce(self, report_stream: Iterable[StreamItem]):
        try:
            for item in report_stream:
                self._queue.put(batch_frame(item) if isinstance(item, ReportBatch) else item)
        except Exception as e:
            logger.error("✗ Report stream failed: %s", e)
        finally:
            self._queue.put(_END)

    def _next_frame(self) -> Optional[WireFrame]:
        """Next frame to push, a heartbeat after an idle interval, or None once the stream is exhausted."""
        if self._held is not None:
            return self._held
        if self._stream_done:
            return None
        try:
            item = self._queue.get(timeout=self.heartbeat_seconds)
        except queue.Empty:
            return heartbeat()
        if item is _END:
            self._stream_done = True
            return None
        self._held = item
        return item

    @staticmethod
    def _peer_closed(conn: socket.socket) -> bool:
        # Inbound bytes are drained and dropped; only end-of-stream matters
        try:
            while select.select([conn], [], [], 0)[0]:
                if not conn.recv(4096):
                    return True
        except OSError:
            return True
        return False

    def _serve_client(self, conn: socket.socket, peer) -> bool:
        """Push frames to one client; True when the stream is finished, False on disconnect."""
        self.clients_served += 1
        logger.info("✓ Client %s:%d connected", *peer[:2])
        with conn:
            while self.running:
                frame = self._next_frame()
                if frame is None:
                    logger.info("Report stream finished; closing client %s:%d", *peer[:2])
                    try:
                        conn.shutdown(socket.SHUT_RDWR)
                    except OSError:
                        pass
                    return True
                if self._peer_closed(conn):
                    break
                try:
                    conn.sendall(encode_frame(frame))
                except OSError as e:
                    logger.warning("⚠ Send to %s:%d failed: %s", peer[0], peer[1], e)
                    break
                self.frames_sent += 1
                if frame is self._held:
                    self._held = None
                    self.stream_frames_sent += 1
                else:
                    self.heartbeats_sent += 1
        if self.running:
            self.disconnects += 1
            logger.warning("⚠ Client %s:%d disconnected; waiting for the next client", *peer[:2])
        return False

    def run(self, report_stream: Iterable[StreamItem]):
        """Serve `report_stream` until it has been delivered in full or the server is stopped."""
        self.bind()
        self.started_at = datetime.now()
        producer = threading.Thread(target=self._produce, args=(report_stream,), daemon=True)
        producer.start()
        try:
            while self.running:
                try:
                    conn, peer = self._listener.accept()
                except socket.timeout:
                    continue
                conn.settimeout(None)
                if self._serve_client(conn, peer):
                    break
        except KeyboardInterrupt:
            logger.info("Keyboard interrupt received")
        finally:
            self._listener.close()
            self._listener = None
            self._print_statistics()

    def _print_statistics(self):
        elapsed = time.time() - self.started_at.timestamp() if self.started_at else 0.0
        logger.info("=" * 60)
        logger.info("Report Server Statistics")
        logger.info("=" * 60)
        logger.info("Clients served: %d", self.clients_served)
        logger.info("Frames sent: %d (%d from the stream, %d heartbeats)", self.frames_sent, self.stream_frames_sent,
                    self.heartbeats_sent)
        logger.info("Disconnects: %d", self.disconnects)
        logger.info("Uptime: %.2f seconds", elapsed)
        logger.info("=" * 60)


def serve(endpoint: Tuple[str, int], report_stream: Iterable[StreamItem],
          heartbeat_seconds: Optional[float] = None) -> ReportServer:
    server = ReportServer(endpoint, heartbeat_seconds)
    server.run(report_stream)
    return server
