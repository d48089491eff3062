"""Single-pass activity segmentation of a live frame stream.

A frame is active when any taxel exceeds the taxel threshold or the frame
sum exceeds the sum threshold.  The segmenter is a two-state machine: the
first active frame opens a segment; `k_gap` consecutive inactive frames (or
hitting `max_segment` buffered frames) closes it.  Emitted segments are
trimmed of leading and trailing inactive frames but keep interior gaps, so a
double tap stays one segment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .core import TAXELS, Recording
from .errors import DomainError


@dataclass(frozen=True)
class SegmenterConfig:
    taxel_threshold: float = 0.15
    sum_threshold: float = 0.5
    k_gap: int = 8
    max_segment: int = 120

    def __post_init__(self):
        if self.k_gap < 1 or self.max_segment < 1:
            raise DomainError("k_gap and max_segment must be positive")


def frame_active(values: np.ndarray, config: SegmenterConfig = SegmenterConfig()) -> bool:
    values = np.asarray(values, dtype=np.float64)
    return bool(values.max() > config.taxel_threshold
                or values.sum() > config.sum_threshold)


@dataclass(frozen=True)
class Segment:
    """A contiguous activity burst cut from the stream."""

    pressures: np.ndarray        # (T, 81)
    timestamps_ms: np.ndarray    # (T,)
    start_index: int             # stream position of the first frame

    def to_recording(self, rate_hz: float = 15.0) -> Recording:
        return Recording(pressures=self.pressures, rate_hz=rate_hz,
                         timestamps_ms=self.timestamps_ms,
                         rec_id=f"segment@{self.start_index}")


class Segmenter:
    """Feed frames in arrival order; a completed Segment pops out occasionally."""

    def __init__(self, config: SegmenterConfig = SegmenterConfig()):
        self.config = config
        self._frames: List[np.ndarray] = []
        self._stamps: List[int] = []
        self._start_index = 0
        self._silence = 0
        self._position = 0

    @property
    def active(self) -> bool:
        return bool(self._frames)

    def feed(self, values: np.ndarray, timestamp_ms: int) -> Optional[Segment]:
        """Consume one frame; returns a Segment when one just completed."""
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (TAXELS,):
            raise DomainError(f"expected {TAXELS} values, got shape {values.shape}")
        position = self._position
        self._position += 1
        is_active = frame_active(values, self.config)
        if not self._frames:
            if not is_active:
                return None
            self._start_index = position
            self._silence = 0
        self._frames.append(values)
        self._stamps.append(int(timestamp_ms))
        self._silence = 0 if is_active else self._silence + 1
        if self._silence >= self.config.k_gap:
            return self._emit()
        if len(self._frames) >= self.config.max_segment:
            return self._emit()
        return None

    def flush(self) -> Optional[Segment]:
        """Close any open segment, e.g. at end of stream."""
        if not self._frames:
            return None
        return self._emit()

    def _emit(self) -> Optional[Segment]:
        frames = self._frames
        stamps = self._stamps
        start = self._start_index
        self._frames = []
        self._stamps = []
        self._silence = 0
        last = len(frames) - 1
        while last >= 0 and not frame_active(frames[last], self.config):
            last -= 1
        if last < 0:  # unreachable: segments always open on an active frame
            return None
        return Segment(pressures=np.stack(frames[:last + 1]),
                       timestamps_ms=np.asarray(stamps[:last + 1], dtype=np.int64),
                       start_index=start)
