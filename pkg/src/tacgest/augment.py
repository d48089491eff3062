"""Shift-invariance augmentation: translate each gesture to its four extremes.

For every gesture the bounding box of its active taxels (union over all
frames) determines how far it can move right, left, up, and down without
truncation; one maximally shifted copy per nonzero direction is emitted next
to the original.  Shifted copies keep the source label and gain an id suffix
so lineage stays recoverable.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import GRID_N, Recording
from .errors import DomainError


@dataclass(frozen=True)
class BoundingBox:
    """Inclusive taxel box in storage coordinates (x = column, y = row from top)."""

    x_tl: int
    y_tl: int
    x_br: int
    y_br: int

    def __post_init__(self):
        if not (0 <= self.x_tl <= self.x_br < GRID_N and 0 <= self.y_tl <= self.y_br < GRID_N):
            raise DomainError(f"invalid bounding box {self}")


@dataclass(frozen=True)
class ShiftAmounts:
    right: int
    left: int
    up: int
    down: int


def bounding_box(rec: Recording, contact_threshold: float = 0.1) -> BoundingBox:
    """Tightest box covering every taxel above the threshold in any frame."""
    grids = rec.pressures.reshape(-1, GRID_N, GRID_N)
    active = (grids > contact_threshold).any(axis=0)
    rows, cols = np.nonzero(active)
    if rows.size == 0:
        raise DomainError("recording has no taxel above the contact threshold")
    return BoundingBox(x_tl=int(cols.min()), y_tl=int(rows.min()),
                       x_br=int(cols.max()), y_br=int(rows.max()))


def shift_amounts(box: BoundingBox) -> ShiftAmounts:
    return ShiftAmounts(
        right=GRID_N - box.x_br - 1,
        left=box.x_tl,
        up=box.y_tl,
        down=GRID_N - box.y_br - 1,
    )


def shift(rec: Recording, dx: int, dy: int, contact_threshold: float = 0.1) -> Recording:
    """Translate every frame by dx columns (positive rightward) and dy rows
    (positive downward in storage, i.e. toward the bottom sensor row).

    The shift must keep the active bounding box on the grid; vacated cells
    are zero.  Sub-threshold values at the grid border can fall off, active
    taxels cannot.
    """
    if dx == 0 and dy == 0:
        return rec
    box = bounding_box(rec, contact_threshold)
    if not (0 <= box.x_tl + dx and box.x_br + dx < GRID_N
            and 0 <= box.y_tl + dy and box.y_br + dy < GRID_N):
        raise DomainError(f"shift ({dx}, {dy}) would push the bounding box off the grid")
    grids = rec.pressures.reshape(-1, GRID_N, GRID_N)
    out = np.zeros_like(grids)
    src_r = slice(max(0, -dy), GRID_N - max(0, dy))
    dst_r = slice(max(0, dy), GRID_N - max(0, -dy))
    src_c = slice(max(0, -dx), GRID_N - max(0, dx))
    dst_c = slice(max(0, dx), GRID_N - max(0, -dx))
    out[:, dst_r, dst_c] = grids[:, src_r, src_c]
    return rec.with_pressures(out.reshape(rec.pressures.shape))


def _suffix(rec: Recording, tag: str) -> Recording:
    return replace(rec, rec_id=f"{rec.rec_id}+{tag}")


def augment_recording(rec: Recording, contact_threshold: float = 0.1) -> list:
    """The original plus its maximal right/left/up/down shifts, zero amounts skipped."""
    amounts = shift_amounts(bounding_box(rec, contact_threshold))
    out = [rec]
    if amounts.right:
        out.append(_suffix(shift(rec, amounts.right, 0, contact_threshold), f"r{amounts.right}"))
    if amounts.left:
        out.append(_suffix(shift(rec, -amounts.left, 0, contact_threshold), f"l{amounts.left}"))
    if amounts.up:
        out.append(_suffix(shift(rec, 0, -amounts.up, contact_threshold), f"u{amounts.up}"))
    if amounts.down:
        out.append(_suffix(shift(rec, 0, amounts.down, contact_threshold), f"d{amounts.down}"))
    return out


def augment_dataset(recs, contact_threshold: float = 0.1) -> tuple[list, int]:
    """Augment every recording; entirely silent ones are dropped and counted."""
    out = []
    skipped = 0
    for rec in recs:
        try:
            out.extend(augment_recording(rec, contact_threshold))
        except DomainError:
            skipped += 1
    return out, skipped
