"""Live recognition service: UDP + WebSocket intake, segmentation, prediction.

One asyncio loop hosts everything.  The UDP listener thread hands frames to
the loop through a bounded queue that drops the oldest entry when full, so a
slow classifier can never wedge intake.  Completed segments are classified on
a worker thread and the result goes to the console, every WebSocket client,
and an NDJSON log.
"""

from __future__ import annotations

import asyncio
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from websockets.asyncio.server import broadcast, serve

from .core import GESTURE_NAMES, TAXELS, Frame
from .errors import DomainError
from .osc import DEFAULT_UDP_PORT
from .segment import Segment, Segmenter, SegmenterConfig
from .udp import UdpListener

DEFAULT_WS_PORT = 8080
DEFAULT_RATE_HZ = 15.0
QUEUE_CAPACITY = 64


@dataclass
class ServeConfig:
    host: str = "127.0.0.1"
    udp_port: int = DEFAULT_UDP_PORT
    ws_port: int = DEFAULT_WS_PORT
    rate_hz: float = DEFAULT_RATE_HZ
    log_path: Optional[Path] = None
    queue_capacity: int = QUEUE_CAPACITY
    segmenter: SegmenterConfig = field(default_factory=SegmenterConfig)


@dataclass
class ServeStats:
    frames: int = 0
    overflows: int = 0
    predictions: int = 0
    rejected_packets: int = 0


class GestureService:
    """Owns the intake queue, segmenter, and fan-out for one serve session."""

    def __init__(self, model, config: ServeConfig = ServeConfig(),
                 console=None):
        self.model = model
        self.config = config
        self.console = console if console is not None else _print_line
        self.stats = ServeStats()
        self.segmenter = Segmenter(config.segmenter)
        self._queue: Optional[asyncio.Queue] = None
        self._loop: Optional[asyncio.AbstractEventLoop] = None
        self._listener: Optional[UdpListener] = None
        self._ws_server = None
        self._consumer: Optional[asyncio.Task] = None
        self._clients = set()
        self._log_file = None
        self._epoch = time.perf_counter()

    # ------------------------------------------------------------ lifecycle

    async def start(self) -> None:
        self._loop = asyncio.get_running_loop()
        self._queue = asyncio.Queue(maxsize=self.config.queue_capacity)
        self._epoch = time.perf_counter()
        if self.config.log_path is not None:
            path = Path(self.config.log_path)
            path.parent.mkdir(parents=True, exist_ok=True)
            self._log_file = open(path, "a", encoding="ascii")
        try:
            self._ws_server = await serve(self._handle_client, self.config.host,
                                          self.config.ws_port)
        except OSError as exc:
            await self.stop()
            raise DomainError(
                f"WebSocket port {self.config.ws_port} unavailable: {exc}") from exc
        self._listener = UdpListener(self._on_udp_frame, host=self.config.host,
                                     port=self.config.udp_port)
        try:
            self._listener.start()
        except OSError as exc:
            self._listener = None
            await self.stop()
            raise DomainError(
                f"UDP port {self.config.udp_port} unavailable: {exc}") from exc
        self._consumer = asyncio.create_task(self._consume())

    async def stop(self) -> None:
        if self._consumer is not None:
            self._consumer.cancel()
            try:
                await self._consumer
            except asyncio.CancelledError:
                pass
            self._consumer = None
        if self._listener is not None:
            self._listener.stop()
            self.stats.rejected_packets = self._listener.packets_rejected
            self._listener = None
        if self._ws_server is not None:
            self._ws_server.close()
            await self._ws_server.wait_closed()
            self._ws_server = None
        if self._log_file is not None:
            self._log_file.close()
            self._log_file = None

    # --------------------------------------------------------------- intake

    def _now_ms(self) -> int:
        return round((time.perf_counter() - self._epoch) * 1000.0)

    def _on_udp_frame(self, frame: Frame) -> None:
        # runs on the listener thread
        self._loop.call_soon_threadsafe(self._enqueue, frame.pressures)

    def _enqueue(self, values: np.ndarray) -> None:
        if self._queue.full():
            self._queue.get_nowait()
            self.stats.overflows += 1
        self._queue.put_nowait((values, self._now_ms()))

    async def _consume(self) -> None:
        while True:
            values, stamp = await self._queue.get()
            self.stats.frames += 1
            was_active = self.segmenter.active
            segment = self.segmenter.feed(values, stamp)
            if self.segmenter.active != was_active:
                self._broadcast({"type": "state", "active": self.segmenter.active})
            if segment is not None:
                await self._classify(segment)

    async def _classify(self, segment: Segment) -> None:
        begin = time.perf_counter()
        rec = segment.to_recording(self.config.rate_hz)
        # classify off-loop so intake keeps draining during heavy predictions
        label_id, scores = await self._loop.run_in_executor(
            None, self._predict, rec)
        latency_ms = (time.perf_counter() - begin) * 1000.0
        span = segment.timestamps_ms
        segment_ms = float(span[-1] - span[0] + 1000.0 / self.config.rate_hz)
        payload = {
            "type": "prediction",
            "label": GESTURE_NAMES[label_id],
            "scores": {GESTURE_NAMES[c]: float(scores[c])
                       for c in range(len(scores))},
            "segment_ms": round(segment_ms, 3),
            "latency_ms": round(latency_ms, 3),
        }
        self.stats.predictions += 1
        self._broadcast(payload)
        if self._log_file is not None:
            self._log_file.write(json.dumps(payload, sort_keys=True) + "\n")
            self._log_file.flush()
        self.console(f"{payload['label']:<14s} p={scores[label_id]:.2f} "
                     f"segment={payload['segment_ms']:.0f}ms "
                     f"latency={payload['latency_ms']:.1f}ms")

    def _predict(self, rec) -> tuple:
        label_id = int(self.model.predict_ids([rec])[0])
        scores = self.model.predict_scores(rec)
        return label_id, scores

    # -------------------------------------------------------------- fan-out

    def _broadcast(self, payload: dict) -> None:
        if self._clients:
            broadcast(self._clients, json.dumps(payload, sort_keys=True))

    async def _handle_client(self, websocket) -> None:
        self._clients.add(websocket)
        try:
            await websocket.send(json.dumps(
                {"type": "state", "active": self.segmenter.active},
                sort_keys=True))
            async for message in websocket:
                self._on_client_message(message)
        except Exception:
            pass
        finally:
            self._clients.discard(websocket)

    def _on_client_message(self, message) -> None:
        try:
            obj = json.loads(message)
        except (json.JSONDecodeError, UnicodeDecodeError):
            return
        if not isinstance(obj, dict) or obj.get("type") != "frame":
            return
        values = obj.get("p")
        if not isinstance(values, list) or len(values) != TAXELS:
            return
        arr = np.asarray(values, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            return
        self._enqueue(np.clip(arr, 0.0, None))


def _print_line(text: str) -> None:
    print(text, flush=True)


async def run_service(model, config: ServeConfig, ready: Optional[asyncio.Event] = None,
                      stop: Optional[asyncio.Event] = None) -> ServeStats:
    """Run the service until `stop` is set (or forever); returns final stats."""
    service = GestureService(model, config)
    await service.start()
    if ready is not None:
        ready.set()
    try:
        if stop is None:
            await asyncio.Event().wait()
        else:
            await stop.wait()
    finally:
        await service.stop()
    return service.stats
