"""Domain types for the 9x9 tactile grid: frames, recordings, labels, coordinates.

Conventions fixed here and relied on everywhere else:

* Pressure frames are stored row-major with row 0 at the TOP of the sensor,
  81 values per frame.
* Trajectory coordinates use a bottom-left origin, x in [0, 9) increasing
  rightward and y in [0, 9) increasing upward.  Conversion between the two
  is ``coord_to_index`` / ``index_to_coord``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError

GRID_N = 9
TAXELS = GRID_N * GRID_N

GESTURE_NAMES = (
    "tap",
    "double_tap",
    "swipe_down",
    "swipe_up",
    "swipe_right",
    "swipe_left",
    "circle_cw",
    "circle_ccw",
    "swipe_up_2f",
    "swipe_down_2f",
)
NUM_CLASSES = len(GESTURE_NAMES)

SPEEDS = ("slow", "regular", "fast")
TILTS = (0, 30, 60)


@dataclass(frozen=True)
class GestureClass:
    id: int
    name: str


_CLASSES = tuple(GestureClass(i, n) for i, n in enumerate(GESTURE_NAMES))
_NAME_TO_ID = {n: i for i, n in enumerate(GESTURE_NAMES)}


def label_of_id(class_id: int) -> GestureClass:
    """Return the gesture class for an integer id in 0..9."""
    if not isinstance(class_id, (int, np.integer)) or not 0 <= class_id < NUM_CLASSES:
        raise DomainError(f"gesture class id must be in 0..{NUM_CLASSES - 1}, got {class_id!r}")
    return _CLASSES[int(class_id)]


def id_of_label(name: str) -> int:
    """Return the integer id for a gesture class name."""
    try:
        return _NAME_TO_ID[name]
    except KeyError:
        raise DomainError(f"unknown gesture class name {name!r}") from None


@dataclass(frozen=True)
class SensorCoord:
    """Position on the pad, bottom-left origin, x rightward, y upward."""

    x: float
    y: float


def coord_to_index(coord: SensorCoord) -> int:
    """Map a sensor coordinate to its storage index (0..80).

    Column is floor(x), row is 8 - floor(y) because storage row 0 is the top
    sensor row while y grows upward from the bottom.
    """
    if not (0 <= coord.x < GRID_N and 0 <= coord.y < GRID_N):
        raise DomainError(f"coordinate out of bounds: ({coord.x}, {coord.y})")
    col = int(np.floor(coord.x))
    row = (GRID_N - 1) - int(np.floor(coord.y))
    return row * GRID_N + col


def index_to_coord(index: int) -> SensorCoord:
    """Inverse of coord_to_index over the 81 integer lattice cells."""
    if not 0 <= index < TAXELS:
        raise DomainError(f"taxel index out of range: {index}")
    row, col = divmod(int(index), GRID_N)
    return SensorCoord(x=float(col), y=float((GRID_N - 1) - row))


def _check_pressures(p: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(p)):
        raise DomainError(f"{what} contains non-finite values")
    if np.any(p < 0):
        raise DomainError(f"{what} contains negative values")


@dataclass(frozen=True)
class Frame:
    """One pressure snapshot: 81 nonnegative values plus a millisecond timestamp."""

    pressures: np.ndarray
    timestamp_ms: int = 0

    def __post_init__(self):
        p = np.asarray(self.pressures, dtype=np.float64)
        if p.shape != (TAXELS,):
            raise DomainError(f"frame must have exactly {TAXELS} values, got shape {p.shape}")
        _check_pressures(p, "frame")
        p.flags.writeable = False
        object.__setattr__(self, "pressures", p)

    def grid(self) -> np.ndarray:
        """The frame as a 9x9 array, row 0 = top sensor row."""
        return self.pressures.reshape(GRID_N, GRID_N)


@dataclass(frozen=True)
class Recording:
    """A variable-length gesture: (T, 81) pressures plus collection metadata.

    Timestamps are canonical (frame i at round(i * 1000 / rate_hz) ms) unless
    explicitly provided, e.g. for segments cut from a live stream.
    """

    pressures: np.ndarray
    label: Optional[GestureClass] = None
    participant_id: str = ""
    tilt_deg: int = 0
    speed: str = "regular"
    rate_hz: float = 15.0
    rec_id: str = ""
    timestamps_ms: Optional[np.ndarray] = None
    true_length: Optional[int] = None  # set by padding; frames beyond it are fill

    def __post_init__(self):
        p = np.asarray(self.pressures, dtype=np.float64)
        if p.ndim != 2 or p.shape[1] != TAXELS or p.shape[0] < 1:
            raise DomainError(f"recording must be (T, {TAXELS}) with T >= 1, got {p.shape}")
        _check_pressures(p, "recording")
        p.flags.writeable = False
        object.__setattr__(self, "pressures", p)
        if self.tilt_deg not in TILTS:
            raise DomainError(f"tilt must be one of {TILTS}, got {self.tilt_deg}")
        if self.speed not in SPEEDS:
            raise DomainError(f"speed must be one of {SPEEDS}, got {self.speed!r}")
        if self.rate_hz <= 0:
            raise DomainError("rate_hz must be positive")
        if self.timestamps_ms is not None:
            ts = np.asarray(self.timestamps_ms, dtype=np.int64)
            if ts.shape != (p.shape[0],):
                raise DomainError("timestamps length must match frame count")
            if np.any(np.diff(ts) < 0):
                raise DomainError("timestamps must be nondecreasing")
            ts.flags.writeable = False
            object.__setattr__(self, "timestamps_ms", ts)
        if self.true_length is not None and not 1 <= self.true_length <= p.shape[0]:
            raise DomainError("true_length must be in 1..T")

    @property
    def length(self) -> int:
        return self.pressures.shape[0]

    def timestamps(self) -> np.ndarray:
        """Timestamps in ms: stored ones if present, else derived from rate_hz."""
        if self.timestamps_ms is not None:
            return self.timestamps_ms
        return np.round(np.arange(self.length) * 1000.0 / self.rate_hz).astype(np.int64)

    def frame(self, t: int) -> Frame:
        return Frame(self.pressures[t], int(self.timestamps()[t]))

    def with_pressures(self, pressures: np.ndarray) -> "Recording":
        """Copy of this recording with the frame data replaced."""
        return replace(self, pressures=pressures, timestamps_ms=None)

    @property
    def source_id(self) -> str:
        """Id of the un-augmented recording this one derives from."""
        return self.rec_id.split("+", 1)[0]


@dataclass(frozen=True)
class Finger:
    coord: SensorCoord
    mass: float


@dataclass(frozen=True)
class TrajectoryFrame:
    """Up to three detected fingers, sorted by descending mass."""

    fingers: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if len(self.fingers) > 3:
            raise DomainError("at most 3 fingers per trajectory frame")
        masses = [f.mass for f in self.fingers]
        if masses != sorted(masses, reverse=True):
            raise DomainError("fingers must be sorted by descending mass")


def recordings_equal(a: Recording, b: Recording) -> bool:
    """Field-for-field equality over the persisted fields of a recording."""
    return (
        a.rec_id == b.rec_id
        and (a.label.id if a.label else None) == (b.label.id if b.label else None)
        and a.participant_id == b.participant_id
        and a.tilt_deg == b.tilt_deg
        and a.speed == b.speed
        and a.rate_hz == b.rate_hz
        and a.pressures.shape == b.pressures.shape
        and np.array_equal(a.pressures, b.pressures)
    )
