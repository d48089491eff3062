"""Temporal filtering, normalization, padding, and blob-centroid trajectories."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import GRID_N, Finger, Recording, SensorCoord, TrajectoryFrame
from .errors import DomainError


@dataclass(frozen=True)
class PreprocessConfig:
    window: int = 3  # running-average width, odd; 3 frames is 200 ms at 15 Hz
    pad_length: int = 64
    contact_threshold: float = 0.1

    def __post_init__(self):
        if self.window < 1 or self.window % 2 == 0:
            raise DomainError("window must be an odd integer >= 1")
        if not 0 < self.contact_threshold < 1:
            raise DomainError("contact_threshold must be in (0, 1)")


def running_average(rec: Recording, window: int = 3) -> Recording:
    """Per-taxel centered moving mean; the window shrinks at the edges."""
    if window < 1 or window % 2 == 0:
        raise DomainError("window must be an odd integer >= 1")
    T = rec.length
    if window > T:
        raise DomainError(f"window {window} exceeds recording length {T}")
    if window == 1:
        return rec
    half = window // 2
    cum = np.zeros((T + 1, rec.pressures.shape[1]))
    np.cumsum(rec.pressures, axis=0, out=cum[1:])
    idx = np.arange(T)
    lo = np.maximum(idx - half, 0)
    hi = np.minimum(idx + half, T - 1) + 1
    smoothed = (cum[hi] - cum[lo]) / (hi - lo)[:, None]
    return rec.with_pressures(smoothed)


def normalize(rec: Recording) -> Recording:
    """Min-max scale to [0, 1] over all taxels and frames jointly.

    An all-constant recording maps to all zeros.
    """
    p = rec.pressures
    lo, hi = p.min(), p.max()
    if hi - lo <= 0:
        return rec.with_pressures(np.zeros_like(p))
    return rec.with_pressures((p - lo) / (hi - lo))


def pad_to_length(rec: Recording, length: int = 64) -> Recording:
    """Append zero frames up to `length`; the true length rides along as metadata."""
    T = rec.length
    if T > length:
        raise DomainError(f"recording length {T} exceeds pad length {length}")
    if T == length:
        return replace(rec, true_length=rec.true_length or T, timestamps_ms=None,
                       pressures=rec.pressures)
    padded = np.zeros((length, rec.pressures.shape[1]))
    padded[:T] = rec.pressures
    return replace(rec, pressures=padded, true_length=rec.true_length or T,
                   timestamps_ms=None)


def preprocess(rec: Recording, cfg: PreprocessConfig = PreprocessConfig()) -> Recording:
    """The canonical cleanup applied before any featurization: filter then normalize."""
    return normalize(running_average(rec, cfg.window))


_NEIGHBOR_STEPS = ((-1, 0), (1, 0), (0, -1), (0, 1))


def extract_trajectory(pressures: np.ndarray, contact_threshold: float = 0.1) -> TrajectoryFrame:
    """Detect up to three fingers in one frame.

    Fingers are 4-connected components of taxels above the contact threshold;
    each is summarized by its mass-weighted centroid in sensor coordinates
    (bottom-left origin) and its total mass.  The heaviest three are kept,
    sorted by descending mass.
    """
    grid = np.asarray(pressures, dtype=np.float64).reshape(GRID_N, GRID_N)
    active = grid > contact_threshold
    seen = np.zeros_like(active, dtype=bool)
    blobs = []
    for r0 in range(GRID_N):
        for c0 in range(GRID_N):
            if not active[r0, c0] or seen[r0, c0]:
                continue
            stack = [(r0, c0)]
            seen[r0, c0] = True
            cells = []
            while stack:
                r, c = stack.pop()
                cells.append((r, c))
                for dr, dc in _NEIGHBOR_STEPS:
                    rr, cc = r + dr, c + dc
                    if 0 <= rr < GRID_N and 0 <= cc < GRID_N and active[rr, cc] and not seen[rr, cc]:
                        seen[rr, cc] = True
                        stack.append((rr, cc))
            rows = np.array([c[0] for c in cells])
            cols = np.array([c[1] for c in cells])
            weights = grid[rows, cols]
            mass = float(weights.sum())
            x = float(np.sum(weights * (cols + 0.5)) / mass)
            y = float(np.sum(weights * ((GRID_N - 1 - rows) + 0.5)) / mass)
            blobs.append(Finger(SensorCoord(x, y), mass))
    blobs.sort(key=lambda f: -f.mass)
    return TrajectoryFrame(fingers=tuple(blobs[:3]))


def trajectory_series(rec: Recording, contact_threshold: float = 0.1) -> list:
    """Per-frame finger detection over a whole recording."""
    return [extract_trajectory(rec.pressures[t], contact_threshold) for t in range(rec.length)]
