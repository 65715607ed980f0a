from .types import AudioBuffer, CODEC_SAMPLE_RATE
from .wav import (
    WavEncoding,
    WavFormatError,
    CodecInputCheck,
    read_wav,
    write_wav,
    validate_codec_input,
)

__all__ = [
    "AudioBuffer",
    "CODEC_SAMPLE_RATE",
    "WavEncoding",
    "WavFormatError",
    "CodecInputCheck",
    "read_wav",
    "write_wav",
    "validate_codec_input",
]
