from .types import (
    BitstreamError,
    EncodedStream,
    SuperFrame,
    MAX_MODE,
    SUPER_FRAME_FRAMES,
)
from .packer import BitrateReport, bitrate_report, pack, payload_bitrate, unpack

__all__ = [
    "BitstreamError",
    "EncodedStream",
    "SuperFrame",
    "MAX_MODE",
    "SUPER_FRAME_FRAMES",
    "BitrateReport",
    "bitrate_report",
    "pack",
    "payload_bitrate",
    "unpack",
]
