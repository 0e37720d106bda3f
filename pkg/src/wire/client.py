"""
Receive-only companion client.

Frames are handed to a callback in arrival order. A broken link (connection
error, silence longer than the link timeout, a frame cut off mid-way, or
undecodable bytes, including a batch the handler cannot decode) is surfaced
as a locally generated Beep frame before the client stops.

The link carries no end-of-stream frame, so a close at a frame boundary looks
the same whether the server finished its stream or its process exited. It is
logged, not beeped.
"""

import logging
import socket
from typing import Callable, Optional, Tuple

from src import config
from src.errors import ConnectFailure, WireError
from src.wire.codec import FrameDecoder, WireFrame, beep

logger = logging.getLogger(__name__)

RECV_BYTES = 4096

FrameHandler = Callable[[WireFrame], None]


class CompanionClient:
    """Connection to the report server; use as a context manager."""

    def __init__(self, endpoint: Tuple[str, int], link_timeout: Optional[float] = None):
        self.endpoint = endpoint
        self.link_timeout = link_timeout or config.LINK_TIMEOUT_SECONDS
        self.frames_received = 0
        self.beeped = False
        self._sock: Optional[socket.socket] = None

    def _connect(self):
        try:
            self._sock = socket.create_connection(self.endpoint, timeout=self.link_timeout)
        except OSError as e:
            raise ConnectFailure(f"cannot reach {self.endpoint[0]}:{self.endpoint[1]}: {e}")
        self._sock.settimeout(self.link_timeout)
        logger.info("✓ Connected to report server at %s:%d", *self.endpoint)

    def close(self):
        if self._sock is not None:
            self._sock.close()
            self._sock = None

    def __enter__(self):
        self._connect()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()

    def get_connection_info(self) -> dict:
        return {
            "endpoint": f"{self.endpoint[0]}:{self.endpoint[1]}",
            "connected": self._sock is not None,
            "frames_received": self.frames_received,
            "link_timeout": self.link_timeout,
        }

    def _beep(self, handler: FrameHandler, reason: str):
        logger.warning("⚠ Link to report server lost: %s", reason)
        self.beeped = True
        handler(beep(local=True))

    def listen(self, handler: FrameHandler) -> int:
        """Deliver frames to `handler` until the server closes the link; returns the frame count."""
        if self._sock is None:
            self._connect()
        decoder = FrameDecoder()
        while True:
            try:
                data = self._sock.recv(RECV_BYTES)
            except socket.timeout:
                self._beep(handler, f"no frame for {self.link_timeout:g} s")
                break
            except OSError as e:
                self._beep(handler, str(e))
                break

            if not data:
                if decoder.pending:
                    self._beep(handler, f"connection closed inside a frame ({decoder.pending} bytes pending)")
                else:
                    logger.info("Report server closed the link")
                break

            try:
                for frame in decoder.feed(data):
                    self.frames_received += 1
                    handler(frame)
            except WireError as e:
                # Covers batch payloads the handler cannot decode as well as bad framing
                self._beep(handler, f"undecodable stream: {e}")
                break
        return self.frames_received


def receive(endpoint: Tuple[str, int], handler: FrameHandler, link_timeout: Optional[float] = None) -> int:
    with CompanionClient(endpoint, link_timeout) as client:
        return client.listen(handler)
