"""Parametric synthetic gesture corpus for a 9x9 pressure pad.

Every recording is built from a continuous finger path (or pulse schedule),
rendered per frame as Gaussian footprints, then passed through a participant
gain field, a tilt gradient, and clipped sensor noise.  Constructive
guarantees the rest of the system leans on:

* path progress is strictly monotone and positional jitter is applied only
  perpendicular to the motion, so swipe centroids advance every frame;
* circles sweep a full 2pi with the orientation sign applied last, so a
  clockwise/counterclockwise pair from one seed shares all other parameters;
* double-tap gaps stay well under the segmenter's silence window and presses
  ramp in and out, so a recording always forms exactly one segment.

Generation is deterministic: participant p is derived from
SeedSequence(corpus_seed, spawn_key=(p,)) and recording k from
SeedSequence((corpus_seed, k)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import (GESTURE_NAMES, GRID_N, SPEEDS, TAXELS, TILTS, Recording,
                   label_of_id)
from .errors import DomainError


@dataclass(frozen=True)
class SynthSpec:
    """Every constant of the generator, so properties are re-derivable."""

    participants: int = 34
    noise_sigma: float = 0.02
    rate_hz: float = 15.0
    durations: tuple = (("fast", (6, 10)), ("regular", (10, 18)), ("slow", (18, 30)))
    press_frames: tuple = (("fast", 2), ("regular", 3), ("slow", 4))
    # gaps sit in the allowed 2..5 band but stay <= 4 so noise cannot fake a
    # third pressure peak between the two presses
    gap_frames: tuple = (("fast", 2), ("regular", 3), ("slow", 4))
    circle_radius: tuple = (2.0, 3.2)
    finger_separation: tuple = (2.0, 3.0)
    swipe_length: tuple = (5.0, 6.0)
    # swipe endpoints stay this far from the pad edge; closer in, the
    # truncated footprint pins the blob centroid and the track stalls
    swipe_end_margin: float = 1.5
    # swipes are ballistic: even unhurried ones finish within ~1.5 s, and
    # capping the frame count keeps per-frame strides comfortably above the
    # blob-centroid wobble
    swipe_max_frames: int = 22
    path_jitter_sigma: float = 0.1
    step_weight: tuple = (0.8, 1.2)
    # steps grow along the path: fingers dwell near the start and sweep out
    # fast, which (with the pressure envelope) makes direction visible in
    # time-averaged features
    step_ramp: tuple = (0.6, 1.4)
    ramp_fraction: float = 0.5
    center_scatter_sigma: float = 0.6
    center_scatter_clip: float = 1.6
    tilt_gradient_max: float = 0.05
    # participant parameter ranges
    finger_sigma_range: tuple = (0.8, 1.2)
    amplitude_range: tuple = (0.5, 1.0)
    speed_bias_range: tuple = (0.8, 1.25)
    position_bias_limit: float = 1.0
    # pressure fades hard toward the lift-off end of a stroke
    envelope_end_range: tuple = (0.45, 0.6)
    gain_range: tuple = (0.9, 1.1)

    def duration_range(self, speed: str) -> tuple:
        return dict(self.durations)[speed]

    def press(self, speed: str) -> int:
        return dict(self.press_frames)[speed]

    def gap(self, speed: str) -> int:
        return dict(self.gap_frames)[speed]


@dataclass(frozen=True)
class VirtualParticipant:
    """One simulated user's motor characteristics and sensor coupling."""

    index: int
    finger_sigma: float
    amplitude: float
    speed_bias: float
    position_bias: tuple
    envelope_end: float
    gain_field: np.ndarray

    def __post_init__(self):
        # physical plausibility bounds, wider than any sampling range
        checks = (
            ("finger_sigma", self.finger_sigma, 0.2, 3.0),
            ("amplitude", self.amplitude, 0.05, 1.0),
            ("speed_bias", self.speed_bias, 0.5, 2.0),
            ("envelope_end", self.envelope_end, 0.1, 1.0),
        )
        for name, value, lo, hi in checks:
            if not lo <= value <= hi:
                raise DomainError(f"{name}={value} outside [{lo}, {hi}]")
        if max(abs(self.position_bias[0]), abs(self.position_bias[1])) > 2.0:
            raise DomainError("position bias outside the allowed offset")
        g = np.asarray(self.gain_field, dtype=np.float64)
        if g.shape != (TAXELS,) or g.min() < 0.5 or g.max() > 1.5:
            raise DomainError("gain field outside the allowed range")
        g.flags.writeable = False
        object.__setattr__(self, "gain_field", g)

    @property
    def participant_id(self) -> str:
        return f"p{self.index:02d}"


def make_participant(corpus_seed: int, index: int,
                     spec: SynthSpec = SynthSpec()) -> VirtualParticipant:
    rng = np.random.default_rng(np.random.SeedSequence(corpus_seed, spawn_key=(index,)))
    return VirtualParticipant(
        index=index,
        finger_sigma=float(rng.uniform(*spec.finger_sigma_range)),
        amplitude=float(rng.uniform(*spec.amplitude_range)),
        speed_bias=float(rng.uniform(*spec.speed_bias_range)),
        position_bias=(float(rng.uniform(-spec.position_bias_limit, spec.position_bias_limit)),
                       float(rng.uniform(-spec.position_bias_limit, spec.position_bias_limit))),
        envelope_end=float(rng.uniform(*spec.envelope_end_range)),
        gain_field=rng.uniform(*spec.gain_range, size=TAXELS),
    )


# ----------------------------------------------------------- path building

def _progress(rng, n: int, spec: SynthSpec) -> np.ndarray:
    """Strictly increasing 0..1 ramp with uneven but bounded per-frame steps."""
    if n == 1:
        return np.zeros(1)
    weights = rng.uniform(*spec.step_weight, size=n - 1)
    weights *= np.linspace(spec.step_ramp[0], spec.step_ramp[1], n - 1)
    if n - 1 >= 10:
        # long paths take small strides, and the smoothing window shrinks at
        # the ends, halving the first and last smoothed displacements; keep
        # the outermost strides large so they beat blob-centroid wobble.  The
        # lift-off end needs extra room: the print is dimmest there, so
        # threshold flicker of fringe cells kicks the centroid hardest.
        mean_w = float(weights.mean())
        weights[:2] = np.maximum(weights[:2], 1.3 * mean_w)
        weights[-2:] = np.maximum(weights[-2:], 1.8 * mean_w)
    cum = np.concatenate([[0.0], np.cumsum(weights)])
    return cum / cum[-1]


def _duration(rng, speed: str, participant, spec: SynthSpec) -> int:
    lo, hi = spec.duration_range(speed)
    base = int(rng.integers(lo, hi + 1))
    return int(np.clip(round(base * participant.speed_bias), lo, hi))


def _scattered_center(rng, participant, spec: SynthSpec) -> np.ndarray:
    scatter = np.clip(rng.normal(0.0, spec.center_scatter_sigma, size=2),
                      -spec.center_scatter_clip, spec.center_scatter_clip)
    mid = (GRID_N - 1) / 2.0 + 0.5
    return np.array([mid, mid]) + np.asarray(participant.position_bias) + scatter


def _press_track(center: np.ndarray, press: int, amplitude: float,
                 ramp: float) -> tuple:
    envelope = np.concatenate([[ramp], np.ones(press), [ramp]]) * amplitude
    positions = np.tile(center, (press + 2, 1))
    return positions, envelope


def _tap_tracks(rng, participant, speed, spec):
    center = _scattered_center(rng, participant, spec)
    pos, amp = _press_track(center, spec.press(speed), participant.amplitude,
                            spec.ramp_fraction)
    return [(pos, amp)]


def _double_tap_tracks(rng, participant, speed, spec):
    center = _scattered_center(rng, participant, spec)
    offset = rng.normal(0.0, 0.2, size=2)
    norm = float(np.hypot(*offset))
    if norm > 0.5:  # second press lands within half a taxel of the first
        offset *= 0.5 / norm
    press = spec.press(speed)
    gap = spec.gap(speed)
    pos1, amp1 = _press_track(center, press, participant.amplitude, spec.ramp_fraction)
    pos2, amp2 = _press_track(center + offset, press, participant.amplitude,
                              spec.ramp_fraction)
    positions = np.concatenate([pos1, np.tile(center, (gap, 1)), pos2])
    amps = np.concatenate([amp1, np.zeros(gap), amp2])
    return [(positions, amps)]


_SWIPE_DIRECTIONS = {
    "swipe_down": (0.0, -1.0),
    "swipe_up": (0.0, 1.0),
    "swipe_right": (1.0, 0.0),
    "swipe_left": (-1.0, 0.0),
    "swipe_up_2f": (0.0, 1.0),
    "swipe_down_2f": (0.0, -1.0),
}


def _swipe_tracks(rng, participant, speed, spec, name):
    direction = np.asarray(_SWIPE_DIRECTIONS[name])
    perp = np.array([-direction[1], direction[0]])
    two_fingers = name.endswith("_2f")
    t = min(_duration(rng, speed, participant, spec), spec.swipe_max_frames)
    length = float(rng.uniform(*spec.swipe_length))
    center = _scattered_center(rng, participant, spec)
    separation = float(rng.uniform(*spec.finger_separation)) if two_fingers else 0.0
    # clamp the path fully onto the pad: along the motion axis the endpoints
    # need margin + length/2 of room, across it the footprint needs about
    # one taxel
    along = float(np.dot(center, np.abs(direction)))
    across = float(np.dot(center, np.abs(perp)))
    along = float(np.clip(along, spec.swipe_end_margin + length / 2,
                          GRID_N - spec.swipe_end_margin - length / 2))
    margin = 1.0 + separation / 2.0
    across = float(np.clip(across, margin, GRID_N - margin))
    progress = _progress(rng, t, spec)
    offsets = (progress - 0.5) * length
    envelope = participant.amplitude * (
        1.0 - (1.0 - participant.envelope_end) * progress)
    tracks = []
    lateral = [0.0] if not two_fingers else [-separation / 2.0, separation / 2.0]
    for shift in lateral:
        jitter = rng.normal(0.0, spec.path_jitter_sigma, size=t)
        base = along * np.abs(direction) + across * np.abs(perp)
        positions = (base[None, :]
                     + offsets[:, None] * direction[None, :]
                     + (shift + jitter)[:, None] * perp[None, :])
        tracks.append((positions, envelope.copy()))
    return tracks


def _circle_tracks(rng, participant, speed, spec, clockwise: bool):
    t = _duration(rng, speed, participant, spec)
    radius = float(rng.uniform(*spec.circle_radius))
    center = _scattered_center(rng, participant, spec)
    lo = radius + 0.3
    hi = GRID_N - radius - 0.3
    center = np.clip(center, lo, hi)
    start = math.pi / 2 + float(rng.normal(0.0, 0.3))
    progress = _progress(rng, t, spec)
    radial_jitter = rng.normal(0.0, spec.path_jitter_sigma, size=t)
    orientation = -1.0 if clockwise else 1.0
    angles = start + orientation * 2.0 * math.pi * progress
    rho = radius + radial_jitter
    positions = np.stack([center[0] + rho * np.cos(angles),
                          center[1] + rho * np.sin(angles)], axis=1)
    envelope = participant.amplitude * (
        1.0 - (1.0 - participant.envelope_end) * progress)
    return [(positions, envelope)]


def _build_tracks(rng, name, participant, speed, spec):
    if name == "tap":
        return _tap_tracks(rng, participant, speed, spec)
    if name == "double_tap":
        return _double_tap_tracks(rng, participant, speed, spec)
    if name in _SWIPE_DIRECTIONS:
        return _swipe_tracks(rng, participant, speed, spec, name)
    if name == "circle_cw":
        return _circle_tracks(rng, participant, speed, spec, clockwise=True)
    if name == "circle_ccw":
        return _circle_tracks(rng, participant, speed, spec, clockwise=False)
    raise DomainError(f"unknown gesture {name!r}")


# --------------------------------------------------------------- rendering

_COLS, _ROWS = np.meshgrid(np.arange(GRID_N), np.arange(GRID_N))
_TAXEL_X = _COLS + 0.5                       # sensor x of each cell center
_TAXEL_Y = (GRID_N - 1 - _ROWS) + 0.5        # sensor y, row 0 on top


def _render(rng, tracks, participant, tilt_deg: int, spec: SynthSpec) -> np.ndarray:
    t = len(tracks[0][0])
    frames = np.zeros((t, GRID_N, GRID_N))
    two_sigma_sq = 2.0 * participant.finger_sigma ** 2
    for positions, amplitudes in tracks:
        d2 = ((_TAXEL_X[None] - positions[:, 0, None, None]) ** 2
              + (_TAXEL_Y[None] - positions[:, 1, None, None]) ** 2)
        frames += amplitudes[:, None, None] * np.exp(-d2 / two_sigma_sq)
    frames *= participant.gain_field.reshape(GRID_N, GRID_N)[None]
    gradient = spec.tilt_gradient_max * tilt_deg / max(TILTS)
    frames *= 1.0 + gradient * (4.5 - _TAXEL_Y[None]) / (GRID_N - 1)
    frames = np.maximum(frames + rng.normal(0.0, spec.noise_sigma, frames.shape), 0.0)
    return np.round(frames.reshape(t, TAXELS), 6)


def synth_gesture(class_id: int, participant: VirtualParticipant, speed: str,
                  tilt_deg: int, rng: np.random.Generator,
                  spec: SynthSpec = SynthSpec(), rec_id: str = "") -> Recording:
    """Render one synthetic gesture recording."""
    label = label_of_id(class_id)
    if speed not in SPEEDS:
        raise DomainError(f"speed must be one of {SPEEDS}, got {speed!r}")
    tracks = _build_tracks(rng, label.name, participant, speed, spec)
    pressures = _render(rng, tracks, participant, tilt_deg, spec)
    return Recording(
        pressures=pressures,
        label=label,
        participant_id=participant.participant_id,
        tilt_deg=tilt_deg,
        speed=speed,
        rate_hz=spec.rate_hz,
        rec_id=rec_id,
    )


def synth_dataset(spec: SynthSpec = SynthSpec(), corpus_seed: int = 0) -> list:
    """The full corpus: participants x 10 classes x 3 speeds x 3 tilts."""
    recordings = []
    rec_index = 0
    for p_index in range(spec.participants):
        participant = make_participant(corpus_seed, p_index, spec)
        for class_id in range(len(GESTURE_NAMES)):
            for speed in SPEEDS:
                for tilt in TILTS:
                    rng = np.random.default_rng(
                        np.random.SeedSequence((corpus_seed, rec_index)))
                    rec = synth_gesture(
                        class_id, participant, speed, tilt, rng, spec,
                        rec_id=f"s{corpus_seed}-{rec_index:05d}")
                    recordings.append(rec)
                    rec_index += 1
    return recordings
