"""Feature extraction: wavelet band statistics, touch descriptors, motion images.

Two fixed-width vector schemas feed the classical models:

* ``spatio_temporal_v1`` (1623): an orthonormal 3-level Haar transform of each
  taxel's 64-sample series, five statistics per band, taxel-major ordering,
  plus three whole-recording aggregates.
* ``touch_pattern_v1`` (24): coarse descriptors of intensity, spatial
  distribution, contact area, and duration.

``motion_history_image`` folds a recording into a single 9x9 image whose decay
encodes recency of contact.
"""

from __future__ import annotations

import numpy as np

from .core import GRID_N, TAXELS, Recording
from .errors import DomainError

SPATIO_TEMPORAL_SCHEMA = "spatio_temporal_v1"
TOUCH_PATTERN_SCHEMA = "touch_pattern_v1"
SPATIO_TEMPORAL_DIM = 1623
TOUCH_PATTERN_DIM = 24
DWT_LENGTH = 64
_SQRT2 = np.sqrt(2.0)
_MOMENT_EPS = 1e-12


def haar_dwt(series: np.ndarray) -> tuple:
    """Orthonormal Haar bands (d1, d2, d3, a3) of 64-sample series.

    Works over the last axis; leading axes are preserved.  Each analysis step
    maps pairs (s0, s1) to approximation (s0+s1)/sqrt(2) and detail
    (s0-s1)/sqrt(2), halving the length three times: 64 -> 32 -> 16 -> 8.
    """
    series = np.asarray(series, dtype=np.float64)
    if series.shape[-1] != DWT_LENGTH:
        raise DomainError(f"series length must be {DWT_LENGTH}, got {series.shape[-1]}")

    def step(a: np.ndarray) -> tuple:
        pairs = a.reshape(a.shape[:-1] + (a.shape[-1] // 2, 2))
        approx = (pairs[..., 0] + pairs[..., 1]) / _SQRT2
        detail = (pairs[..., 0] - pairs[..., 1]) / _SQRT2
        return approx, detail

    a1, d1 = step(series)
    a2, d2 = step(a1)
    a3, d3 = step(a2)
    return d1, d2, d3, a3


def band_stats(band: np.ndarray) -> np.ndarray:
    """[L1, L2, skewness, excess kurtosis, std] over the last axis.

    Central moments are population moments; skewness and kurtosis fall back
    to zero for (near-)constant bands.
    """
    band = np.asarray(band, dtype=np.float64)
    l1 = np.abs(band).sum(axis=-1)
    l2 = np.sqrt((band * band).sum(axis=-1))
    mean = band.mean(axis=-1, keepdims=True)
    dev = band - mean
    m2 = (dev * dev).mean(axis=-1)
    m3 = (dev ** 3).mean(axis=-1)
    m4 = (dev ** 4).mean(axis=-1)
    ok = m2 > _MOMENT_EPS
    safe_m2 = np.where(ok, m2, 1.0)
    skew = np.where(ok, m3 / safe_m2 ** 1.5, 0.0)
    kurt = np.where(ok, m4 / (safe_m2 * safe_m2) - 3.0, 0.0)
    std = np.sqrt(m2)
    return np.stack([l1, l2, skew, kurt, std], axis=-1)


def spatio_temporal_features(rec: Recording) -> np.ndarray:
    """1623-vector: per-taxel Haar band statistics plus global aggregates.

    Requires the recording padded to 64 frames.  Layout is taxel-major:
    taxel 0 bands d1, d2, d3, a3 with five stats each, then taxel 1, and so
    on; the final three entries are the mean, max, and population variance
    of the whole 64x81 array.
    """
    return spatio_temporal_matrix([rec])[0]


def spatio_temporal_matrix(recs) -> np.ndarray:
    """Stacked spatio_temporal_v1 vectors, one row per recording."""
    batch = np.stack([_padded_series(rec) for rec in recs])  # (B, 64, 81)
    per_taxel = batch.transpose(0, 2, 1)                     # (B, 81, 64)
    bands = haar_dwt(per_taxel)
    stats = np.concatenate([band_stats(b)[..., None, :] for b in bands], axis=-2)
    head = stats.reshape(len(recs), TAXELS * len(bands) * 5)
    flat = batch.reshape(len(recs), -1)
    tails = np.stack([flat.mean(axis=1), flat.max(axis=1), flat.var(axis=1)], axis=1)
    return np.concatenate([head, tails], axis=1)


def _padded_series(rec: Recording) -> np.ndarray:
    if rec.pressures.shape[0] != DWT_LENGTH:
        raise DomainError(
            f"expected {DWT_LENGTH} frames (pad first), got {rec.pressures.shape[0]}")
    return rec.pressures


def _live_pressures(rec: Recording) -> np.ndarray:
    """Frames that carry signal: everything before the padding fill."""
    if rec.true_length is not None:
        return rec.pressures[:rec.true_length]
    return rec.pressures


def touch_pattern_features(rec: Recording, contact_threshold: float = 0.1) -> np.ndarray:
    """24-vector of coarse touch descriptors.

    Layout: overall mean, overall max, frame-to-frame variability, nine row
    means (top row first), nine column means (left first), max contact area,
    mean contact area, duration in seconds.  Contact area counts taxels above
    the threshold; variability is the mean absolute per-taxel change between
    consecutive frames, zero for single-frame recordings.
    """
    p = _live_pressures(rec)
    grids = p.reshape(-1, GRID_N, GRID_N)
    if p.shape[0] > 1:
        variability = float(np.abs(np.diff(p, axis=0)).mean())
    else:
        variability = 0.0
    row_means = grids.mean(axis=(0, 2))
    col_means = grids.mean(axis=(0, 1))
    areas = (p > contact_threshold).sum(axis=1)
    duration = p.shape[0] / rec.rate_hz
    return np.concatenate([
        [p.mean(), p.max(), variability],
        row_means,
        col_means,
        [areas.max(), areas.mean(), duration],
    ]).astype(np.float64)


def touch_pattern_matrix(recs, contact_threshold: float = 0.1) -> np.ndarray:
    return np.stack([touch_pattern_features(rec, contact_threshold) for rec in recs])


def motion_history_image(rec: Recording, motion_threshold: float = 0.1) -> np.ndarray:
    """9x9 image that brightens where contact is recent and fades elsewhere.

    Iterating over the signal-bearing frames, cells above the threshold are
    set to 1 and every other cell decays by 1/T, floored at zero.
    """
    p = _live_pressures(rec)
    t = p.shape[0]
    h = np.zeros(TAXELS, dtype=np.float64)
    decay = 1.0 / t
    for frame in p:
        active = frame > motion_threshold
        h = np.where(active, 1.0, np.maximum(0.0, h - decay))
    return h.reshape(GRID_N, GRID_N)
