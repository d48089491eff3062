"""UDP transport for sensor frames: a threaded listener and a replay sender."""

from __future__ import annotations

import socket
import threading
import time
from typing import Callable, Optional

import numpy as np

from .core import Frame
from .errors import OscParseError
from .osc import DEFAULT_UDP_PORT, encode_osc_frame, parse_osc_packet

_RECV_BUFFER = 65535


class UdpListener:
    """Background thread that parses OSC datagrams and hands frames to a callback.

    Malformed packets are counted, never raised; the callback runs on the
    listener thread and must be quick (hand off to a queue for real work).
    """

    def __init__(self, callback: Callable[[Frame], None],
                 host: str = "127.0.0.1", port: int = DEFAULT_UDP_PORT):
        self.callback = callback
        self.host = host
        self.port = port
        self.frames_received = 0
        self.packets_rejected = 0
        self._sock: Optional[socket.socket] = None
        self._thread: Optional[threading.Thread] = None
        self._running = False

    def start(self) -> None:
        sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        try:
            sock.bind((self.host, self.port))
        except OSError:
            sock.close()
            raise
        self.port = sock.getsockname()[1]  # resolves port 0 to the real one
        sock.settimeout(0.2)
        self._sock = sock
        self._running = True
        self._thread = threading.Thread(target=self._run, name="udp-listener",
                                        daemon=True)
        self._thread.start()

    def _run(self) -> None:
        while self._running:
            try:
                data, _ = self._sock.recvfrom(_RECV_BUFFER)
            except socket.timeout:
                continue
            except OSError:
                break
            try:
                result = parse_osc_packet(data)
            except OscParseError:
                self.packets_rejected += 1
                continue
            for frame in result.frames:
                self.frames_received += 1
                self.callback(frame)

    def stop(self) -> None:
        self._running = False
        if self._thread is not None:
            self._thread.join(timeout=2.0)
            self._thread = None
        if self._sock is not None:
            self._sock.close()
            self._sock = None

    def __enter__(self) -> "UdpListener":
        self.start()
        return self

    def __exit__(self, *exc) -> None:
        self.stop()


def send_frames(frames, host: str = "127.0.0.1", port: int = DEFAULT_UDP_PORT,
                rate_hz: Optional[float] = None) -> int:
    """Send pressure frames as OSC datagrams, optionally paced to a frame rate.

    Accepts Frame objects or raw 81-value arrays; returns the count sent.
    Pacing is drift-free: each frame is scheduled against the stream start.
    """
    sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    period = 1.0 / rate_hz if rate_hz else 0.0
    start = time.perf_counter()
    sent = 0
    try:
        for values in frames:
            frame = values if isinstance(values, Frame) else Frame(
                pressures=np.asarray(values, dtype=np.float64))
            if period:
                target = start + sent * period
                delay = target - time.perf_counter()
                if delay > 0:
                    time.sleep(delay)
            sock.sendto(encode_osc_frame(frame), (host, port))
            sent += 1
    finally:
        sock.close()
    return sent
