"""OSC 1.0 encoding and parsing for pressure frames.

Wire contract: messages to address ``/texyz/frame`` carry 81 big-endian
float32 arguments (type tag ``,`` + 81 x ``f``), row-major from the top
sensor row.  Bundles (``#bundle``) are unwrapped recursively.  Everything is
4-byte aligned per OSC 1.0.  Messages to other addresses are skipped and
counted, never errors.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .core import TAXELS, Frame
from .errors import OscParseError

FRAME_ADDRESS = "/texyz/frame"
_FRAME_TYPETAG = "," + "f" * TAXELS
DEFAULT_UDP_PORT = 9009

_BUNDLE_MAGIC = b"#bundle\x00"


def _pad4(n: int) -> int:
    return (n + 3) & ~3


def _encode_string(s: str) -> bytes:
    raw = s.encode("ascii") + b"\x00"
    return raw + b"\x00" * (_pad4(len(raw)) - len(raw))


def encode_osc_frame(frame: Frame) -> bytes:
    """Encode one frame as a single OSC message (float64 pressures narrowed to float32)."""
    args = np.asarray(frame.pressures, dtype=">f4").tobytes()
    return _encode_string(FRAME_ADDRESS) + _encode_string(_FRAME_TYPETAG) + args


def encode_osc_bundle(frames, timetag: int = 1) -> bytes:
    """Wrap frames in an OSC bundle. timetag 1 means 'immediately'."""
    out = bytearray(_BUNDLE_MAGIC)
    out += struct.pack(">Q", timetag)
    for f in frames:
        msg = encode_osc_frame(f)
        out += struct.pack(">i", len(msg))
        out += msg
    return bytes(out)


@dataclass
class OscParseResult:
    frames: list = field(default_factory=list)
    skipped: int = 0


def _read_string(data: bytes, off: int) -> tuple[str, int]:
    nul = data.find(b"\x00", off)
    if nul < 0:
        raise OscParseError("unterminated OSC string", off)
    end = off + _pad4(nul - off + 1)
    if end > len(data):
        raise OscParseError("string padding runs past packet end", nul)
    if any(data[nul:end]):
        raise OscParseError("non-zero bytes in string padding", nul)
    try:
        s = data[off:nul].decode("ascii")
    except UnicodeDecodeError:
        raise OscParseError("non-ASCII bytes in OSC string", off) from None
    return s, end


def _parse_message(data: bytes, off: int, end: int, out: OscParseResult) -> None:
    address, pos = _read_string(data, off)
    if address != FRAME_ADDRESS:
        out.skipped += 1
        return
    tag, pos = _read_string(data, pos)
    if tag != _FRAME_TYPETAG:
        raise OscParseError(f"expected type tag ',{'f' * TAXELS}'", pos - _pad4(len(tag) + 1))
    need = TAXELS * 4
    if end - pos < need:
        raise OscParseError(f"truncated float arguments ({end - pos} of {need} bytes)", pos)
    if end - pos > need:
        raise OscParseError("trailing bytes after float arguments", pos + need)
    with np.errstate(invalid="ignore"):  # arbitrary bytes may be signaling NaNs
        raw = np.frombuffer(data, dtype=">f4", count=TAXELS, offset=pos).astype(np.float64)
        clean = np.where(np.isfinite(raw), np.maximum(raw, 0.0), 0.0)
    out.frames.append(Frame(clean))


def _parse_packet(data: bytes, off: int, end: int, out: OscParseResult) -> None:
    if end - off < 4:
        raise OscParseError("packet shorter than 4 bytes", off)
    if data[off : off + 8] == _BUNDLE_MAGIC:
        pos = off + 8
        if end - pos < 8:
            raise OscParseError("bundle truncated before timetag", pos)
        pos += 8
        while pos < end:
            if end - pos < 4:
                raise OscParseError("bundle element size truncated", pos)
            (size,) = struct.unpack_from(">i", data, pos)
            pos += 4
            if size <= 0 or size % 4 != 0:
                raise OscParseError(f"bad bundle element size {size}", pos - 4)
            if pos + size > end:
                raise OscParseError("bundle element runs past packet end", pos - 4)
            _parse_packet(data, pos, pos + size, out)
            pos += size
    elif data[off : off + 1] == b"/":
        _parse_message(data, off, end, out)
    else:
        raise OscParseError("packet is neither a message nor a bundle", off)


def parse_osc_packet(data: bytes) -> OscParseResult:
    """Parse one UDP payload into frames.

    Returns the frames found (bundles unwrapped recursively, in order) and the
    count of skipped non-frame messages.  Raises OscParseError, naming the
    byte offset, on any structural fault.  Raw floats are clamped at 0 below
    and non-finite values are zeroed, so every returned Frame is valid.
    """
    data = bytes(data)
    if len(data) % 4 != 0:
        raise OscParseError(f"packet length {len(data)} is not a multiple of 4", len(data))
    out = OscParseResult()
    _parse_packet(data, 0, len(data), out)
    return out
