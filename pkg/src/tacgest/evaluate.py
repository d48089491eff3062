"""Offline evaluation: stratified splits, LOSO cross-validation, confusion
matrices, and online (streamed) evaluation against the segmenter.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .core import NUM_CLASSES, TAXELS, Recording
from .errors import DomainError
from .segment import Segmenter, SegmenterConfig


# ------------------------------------------------------------------- split

@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.85
    seed: int = 0
    augment_train_only: bool = True

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise DomainError("train_fraction must be in (0, 1)")


def _train_quota(class_counts: Sequence[int], fraction: float) -> list:
    """Per-class train counts by largest remainder, totalling round(n * fraction).

    Remainder ties are broken toward the lower class id.
    """
    total = int(round(sum(class_counts) * fraction))
    exact = [c * fraction for c in class_counts]
    base = [int(np.floor(e)) for e in exact]
    leftover = total - sum(base)
    order = sorted(range(len(class_counts)),
                   key=lambda i: (-(exact[i] - base[i]), i))
    for i in order[:leftover]:
        base[i] += 1
    return base


def stratified_split(recs: Sequence[Recording],
                     spec: SplitSpec = SplitSpec()) -> tuple:
    """Seeded class-stratified partition into (train, test)."""
    by_class = {}
    for i, rec in enumerate(recs):
        if rec.label is None:
            raise DomainError(f"recording {rec.rec_id!r} is unlabeled")
        by_class.setdefault(rec.label.id, []).append(i)
    for cid, members in sorted(by_class.items()):
        if len(members) < 2:
            raise DomainError(f"class {cid} has fewer than 2 recordings")
    class_ids = sorted(by_class)
    quotas = _train_quota([len(by_class[c]) for c in class_ids], spec.train_fraction)
    rng = np.random.default_rng(spec.seed)
    train_idx, test_idx = [], []
    for cid, quota in zip(class_ids, quotas):
        members = np.asarray(by_class[cid])
        perm = rng.permutation(len(members))
        train_idx.extend(members[perm[:quota]])
        test_idx.extend(members[perm[quota:]])
    train_idx.sort()
    test_idx.sort()
    return [recs[i] for i in train_idx], [recs[i] for i in test_idx]


# -------------------------------------------------------------- confusion

@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray  # (C, C), rows true, columns predicted

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise DomainError("confusion matrix must be square")
        if counts.min() < 0:
            raise DomainError("confusion counts must be nonnegative")
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_predictions(cls, y_true, y_pred, n_classes: int = NUM_CLASSES):
        y_true = np.asarray(y_true, dtype=np.int64)
        y_pred = np.asarray(y_pred, dtype=np.int64)
        if y_true.shape != y_pred.shape:
            raise DomainError("prediction and truth lengths differ")
        counts = np.zeros((n_classes, n_classes), dtype=np.int64)
        np.add.at(counts, (y_true, y_pred), 1)
        return cls(counts=counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.counts) / self.total) if self.total else 0.0

    def per_class(self) -> list:
        """(class_id, precision, recall) rows; empty denominators yield 0."""
        out = []
        for c in range(self.counts.shape[0]):
            tp = self.counts[c, c]
            col = self.counts[:, c].sum()
            row = self.counts[c].sum()
            out.append((c,
                        float(tp / col) if col else 0.0,
                        float(tp / row) if row else 0.0))
        return out

    def most_confused_pairs(self, top: int = 2) -> list:
        """Unordered class pairs ranked by summed off-diagonal confusion."""
        pairs = []
        n = self.counts.shape[0]
        for a in range(n):
            for b in range(a + 1, n):
                weight = int(self.counts[a, b] + self.counts[b, a])
                if weight > 0:
                    pairs.append(((a, b), weight))
        pairs.sort(key=lambda item: (-item[1], item[0]))
        return pairs[:top]

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(counts=self.counts + other.counts)


# ------------------------------------------------------------------- loso

@dataclass
class LosoResult:
    best_params: dict
    best_mean_accuracy: float
    fold_participants: list
    scores: list  # one row of fold accuracies per grid point, grid order


def loso_cv(train: Sequence[Recording],
            trainer: Callable[[dict, Sequence[Recording], Sequence[Recording]], float],
            grid: Sequence[dict], seed: int = 0, folds: int = 5) -> LosoResult:
    """Leave-one-subject-out over `folds` seeded-random participants.

    `trainer(params, fit_recs, holdout_recs)` returns holdout accuracy; a
    DomainError marks the grid point infeasible for that fold (scored 0).
    Ties on mean accuracy go to the earlier grid point.
    """
    if not grid:
        raise DomainError("hyperparameter grid is empty")
    participants = sorted({rec.participant_id for rec in train})
    if "" in participants:
        raise DomainError("recordings without participant ids cannot be folded")
    if len(participants) < folds:
        raise DomainError(f"need at least {folds} participants, found {len(participants)}")
    rng = np.random.default_rng(seed)
    held_out = [participants[i]
                for i in rng.choice(len(participants), size=folds, replace=False)]
    scores = []
    for params in grid:
        fold_scores = []
        for participant in held_out:
            fit = [r for r in train if r.participant_id != participant]
            holdout = [r for r in train if r.participant_id == participant]
            try:
                fold_scores.append(float(trainer(params, fit, holdout)))
            except DomainError:
                fold_scores.append(0.0)
        scores.append(fold_scores)
    means = [float(np.mean(s)) for s in scores]
    best = int(np.argmax(means))  # argmax keeps the earliest maximum
    return LosoResult(best_params=dict(grid[best]), best_mean_accuracy=means[best],
                      fold_participants=held_out, scores=scores)


# ------------------------------------------------------------------ online

@dataclass
class StreamReport:
    expected_segments: int
    detected_segments: int
    matched_segments: int
    online_accuracy: float
    offline_accuracy: float
    mean_latency_ms: float
    latencies_ms: list = field(default_factory=list)

    @property
    def segment_match_rate(self) -> float:
        if self.expected_segments == 0:
            return 1.0
        return self.matched_segments / self.expected_segments


def build_stream(recs: Sequence[Recording], gap_frames: int = 30,
                 config: SegmenterConfig = SegmenterConfig()) -> tuple:
    """Concatenate recordings with silent gaps; returns (frames, spans).

    spans[i] is the half-open frame interval of recording i in the stream.
    The gap must exceed twice the segmenter's silence window so segments
    cannot bleed into each other.
    """
    if gap_frames < 2 * config.k_gap:
        raise DomainError(f"gap must be at least {2 * config.k_gap} frames")
    silence = np.zeros((gap_frames, TAXELS))
    chunks = [silence.copy()]
    spans = []
    cursor = gap_frames
    for rec in recs:
        chunks.append(rec.pressures)
        spans.append((cursor, cursor + rec.length))
        cursor += rec.length
        chunks.append(silence.copy())
        cursor += gap_frames
    return np.concatenate(chunks, axis=0), spans


def stream_evaluate(recs: Sequence[Recording],
                    predict_one: Callable[[Recording], int],
                    gap_frames: int = 30,
                    config: SegmenterConfig = SegmenterConfig(),
                    rate_hz: float = 15.0) -> StreamReport:
    """Push recordings through the segmenter as one stream and classify segments.

    Each detected segment is matched to the source recording it overlaps
    most; online accuracy covers matched segments only.  Offline accuracy
    runs the same predictor on the unstreamed recordings, and latency is the
    wall-clock cost of classifying each completed segment.
    """
    frames, spans = build_stream(recs, gap_frames, config)
    segmenter = Segmenter(config)
    segments = []
    for position, values in enumerate(frames):
        out = segmenter.feed(values, timestamp_ms=round(position * 1000.0 / rate_hz))
        if out is not None:
            segments.append(out)
    tail = segmenter.flush()
    if tail is not None:
        segments.append(tail)

    matched = {}
    for segment in segments:
        seg_span = (segment.start_index, segment.start_index + len(segment.pressures))
        overlaps = [max(0, min(seg_span[1], hi) - max(seg_span[0], lo))
                    for lo, hi in spans]
        best = int(np.argmax(overlaps))
        if overlaps[best] > 0 and best not in matched:
            matched[best] = segment

    latencies = []
    online_hits = 0
    for index, segment in sorted(matched.items()):
        begin = time.perf_counter()
        predicted = predict_one(segment.to_recording(rate_hz))
        latencies.append((time.perf_counter() - begin) * 1000.0)
        if predicted == recs[index].label.id:
            online_hits += 1

    offline_hits = sum(predict_one(rec) == rec.label.id for rec in recs)
    n_matched = len(matched)
    return StreamReport(
        expected_segments=len(recs),
        detected_segments=len(segments),
        matched_segments=n_matched,
        online_accuracy=online_hits / n_matched if n_matched else 0.0,
        offline_accuracy=offline_hits / len(recs) if recs else 0.0,
        mean_latency_ms=float(np.mean(latencies)) if latencies else 0.0,
        latencies_ms=latencies,
    )
