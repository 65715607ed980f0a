"""Constant-bitrate byte format for encoded streams.

File header: b"LRAC", version u8 (1), sample_rate u32 LE, frame_hop u16 LE,
bits_per_index u8 (10). Each super-frame: mode u8, frame count u16 LE, then
the indices frame-major/layer-minor at 10 bits each, MSB first, zero-padded
to the next byte boundary.
"""
import struct
from dataclasses import dataclass

import numpy as np

from .types import BitstreamError, EncodedStream, SuperFrame

MAGIC = b"LRAC"
VERSION = 1
BITS_PER_INDEX = 10

_HEADER = struct.Struct("<4sBIHB")
_SUPER_FRAME = struct.Struct("<BH")
_SHIFTS = np.arange(BITS_PER_INDEX - 1, -1, -1, dtype=np.int64)


def _pack_indices(indices: np.ndarray) -> bytes:
    flat = indices.reshape(-1)
    bits = ((flat[:, None] >> _SHIFTS) & 1).astype(np.uint8)
    return np.packbits(bits.reshape(-1)).tobytes()


def _unpack_indices(payload: bytes, n_indices: int) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8))[:n_indices * BITS_PER_INDEX]
    return bits.reshape(-1, BITS_PER_INDEX).astype(np.int64) @ (1 << _SHIFTS)


def pack(stream: EncodedStream) -> bytes:
    out = bytearray(_HEADER.pack(MAGIC, VERSION, stream.sample_rate, stream.frame_hop, BITS_PER_INDEX))
    for sf in stream.super_frames:
        out += _SUPER_FRAME.pack(sf.mode, sf.n_frames)
        out += _pack_indices(sf.indices)
    return bytes(out)


def unpack(data: bytes) -> EncodedStream:
    if len(data) < _HEADER.size:
        raise BitstreamError(f"truncated header: {len(data)} of {_HEADER.size} bytes")
    magic, version, sample_rate, frame_hop, bits = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise BitstreamError("bad magic")
    if version != VERSION:
        raise BitstreamError(f"unsupported version {version}")
    if bits != BITS_PER_INDEX:
        raise BitstreamError(f"bits_per_index {bits}, expected {BITS_PER_INDEX}")

    super_frames = []
    pos = _HEADER.size
    while pos < len(data):
        index = len(super_frames)
        if pos + _SUPER_FRAME.size > len(data):
            raise BitstreamError(f"truncated super-frame {index}: incomplete mode/count prefix")
        mode, count = _SUPER_FRAME.unpack_from(data, pos)
        pos += _SUPER_FRAME.size
        n_bits = mode * count * BITS_PER_INDEX
        n_bytes = -(-n_bits // 8)
        available = len(data) - pos
        if available < n_bytes:
            raise BitstreamError(
                f"truncated super-frame {index}: expected {n_bits} bits, "
                f"{available * 8} available"
            )
        indices = _unpack_indices(data[pos:pos + n_bytes], mode * count)
        super_frames.append(SuperFrame(mode=mode, indices=indices.reshape(count, mode)))
        pos += n_bytes
    return EncodedStream(tuple(super_frames), frame_hop, sample_rate)


@dataclass(frozen=True)
class BitrateReport:
    frame_count: int
    duration_s: float
    payload_bps: float
    signaling_bps: float

    @property
    def total_bps(self) -> float:
        return self.payload_bps + self.signaling_bps


def payload_bitrate(stream: EncodedStream) -> float:
    if stream.frame_count == 0:
        raise BitstreamError("payload bitrate of an empty stream is undefined")
    return float(stream.payload_bits / stream.duration)


def bitrate_report(stream: EncodedStream) -> BitrateReport:
    """Payload rate plus the rate of header, super-frame prefixes and padding."""
    payload = payload_bitrate(stream)
    overhead_bits = len(pack(stream)) * 8 - stream.payload_bits
    return BitrateReport(
        frame_count=stream.frame_count,
        duration_s=float(stream.duration),
        payload_bps=payload,
        signaling_bps=float(overhead_bits / stream.duration),
    )
