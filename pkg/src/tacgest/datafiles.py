"""On-disk formats: JSONL gesture datasets and JSON model envelopes.

Datasets are one JSON object per line with the fields that define a
recording; timestamps are regenerated from the sample rate on read.  Models
are a single JSON envelope whose parameter arrays are base64-encoded
little-endian float64 blocks, so a save/load round-trip is bit-exact.
"""

from __future__ import annotations

import base64
import hashlib
import json
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .core import GESTURE_NAMES, SPEEDS, TAXELS, Recording, label_of_id
from .errors import DataFormatError

MODEL_FORMAT_VERSION = 1


# ---------------------------------------------------------------- datasets

def _rec_to_obj(rec: Recording) -> dict:
    if rec.label is None:
        raise DataFormatError(f"recording {rec.rec_id!r} has no label")
    return {
        "id": rec.rec_id,
        "label": rec.label.id,
        "participant": rec.participant_id,
        "tilt_deg": rec.tilt_deg,
        "speed": rec.speed,
        "rate_hz": rec.rate_hz,
        "frames": [[float(v) for v in row] for row in rec.pressures],
    }


def _obj_to_rec(obj: dict, line: Optional[int] = None) -> Recording:
    def fail(msg: str):
        raise DataFormatError(msg, line=line)

    for key in ("id", "label", "participant", "tilt_deg", "speed", "rate_hz", "frames"):
        if key not in obj:
            fail(f"missing field {key!r}")
    label = obj["label"]
    if not isinstance(label, int) or not (0 <= label < len(GESTURE_NAMES)):
        fail(f"label must be an integer gesture id, got {label!r}")
    if obj["speed"] not in SPEEDS:
        fail(f"unknown speed {obj['speed']!r}")
    frames = obj["frames"]
    if not isinstance(frames, list) or not frames:
        fail("frames must be a nonempty list")
    if any(not isinstance(f, list) or len(f) != TAXELS for f in frames):
        fail(f"every frame must hold {TAXELS} values")
    try:
        pressures = np.asarray(frames, dtype=np.float64)
        return Recording(
            pressures=pressures,
            label=label_of_id(label),
            participant_id=str(obj["participant"]),
            tilt_deg=int(obj["tilt_deg"]),
            speed=obj["speed"],
            rate_hz=float(obj["rate_hz"]),
            rec_id=str(obj["id"]),
        )
    except (ValueError, TypeError) as exc:
        fail(str(exc))


def save_dataset(recs: Iterable[Recording], path) -> int:
    """Write recordings as JSONL; returns the number written."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with path.open("w", encoding="utf-8") as fh:
        for rec in recs:
            fh.write(json.dumps(_rec_to_obj(rec), separators=(",", ":")) + "\n")
            n += 1
    return n


def load_dataset(path) -> list:
    path = Path(path)
    recs = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"invalid JSON: {exc}", line=lineno) from None
            recs.append(_obj_to_rec(obj, line=lineno))
    return recs


# ------------------------------------------------------------------ models

def _encode_array(arr: np.ndarray) -> dict:
    data = np.ascontiguousarray(arr, dtype="<f8")
    return {
        "shape": list(arr.shape),
        "data": base64.b64encode(data.tobytes()).decode("ascii"),
    }


def _decode_array(obj: dict) -> np.ndarray:
    try:
        shape = tuple(int(s) for s in obj["shape"])
        raw = base64.b64decode(obj["data"], validate=True)
        arr = np.frombuffer(raw, dtype="<f8").astype(np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"bad parameter block: {exc}") from None
    if arr.size != int(np.prod(shape, dtype=np.int64)):
        raise DataFormatError(f"parameter block size {arr.size} does not match shape {shape}")
    return arr.reshape(shape)


def save_model(path, kind: str, schema: str, params: dict, metadata: Optional[dict] = None) -> None:
    """Serialize named float64 parameter arrays under a versioned envelope."""
    envelope = {
        "format_version": MODEL_FORMAT_VERSION,
        "kind": kind,
        "schema": schema,
        "metadata": metadata or {},
        "params": {name: _encode_array(np.asarray(arr)) for name, arr in params.items()},
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(envelope, separators=(",", ":"), sort_keys=True), encoding="utf-8")


def load_model(path, expect_kind: Optional[str] = None) -> dict:
    """Read a model envelope back; params become float64 arrays again."""
    try:
        envelope = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"invalid model JSON: {exc}") from None
    version = envelope.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise DataFormatError(f"unsupported model format version {version!r}")
    for key in ("kind", "schema", "params"):
        if key not in envelope:
            raise DataFormatError(f"model envelope missing {key!r}")
    if expect_kind is not None and envelope["kind"] != expect_kind:
        raise DataFormatError(f"expected a {expect_kind!r} model, found {envelope['kind']!r}")
    envelope["params"] = {name: _decode_array(obj) for name, obj in envelope["params"].items()}
    envelope.setdefault("metadata", {})
    return envelope


def model_file_hash(path) -> str:
    """Content hash of a saved model, for reproducibility checks."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
