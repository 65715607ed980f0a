"""RIFF/WAVE reading and writing for mono PCM-16 and IEEE float-32 audio.

Only the two encodings the codec exchanges are accepted; everything else is
rejected with the offending header field named in the error.
"""
import io
import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import soundfile as sf

from .types import AudioBuffer, CODEC_SAMPLE_RATE

logger = logging.getLogger(__name__)

PCM16_SCALE = 32768.0
WAV_FORMATS = ("WAV", "WAVEX")


class WavFormatError(ValueError):
    pass


class WavEncoding(str, Enum):
    PCM16 = "pcm16"
    FLOAT32 = "float32"


# libsndfile subtype -> (encoding, dtype read into)
_SUBTYPES = {
    "PCM_16": (WavEncoding.PCM16, "int16"),
    "FLOAT": (WavEncoding.FLOAT32, "float32"),
}
_WRITE_SUBTYPES = {WavEncoding.PCM16: "PCM_16", WavEncoding.FLOAT32: "FLOAT"}


@dataclass
class CodecInputCheck:
    ok: bool
    violations: list[str] = field(default_factory=list)


def _probe(data: bytes):
    try:
        return sf.info(io.BytesIO(data))
    except (sf.SoundFileError, RuntimeError) as e:
        raise WavFormatError(f"header: not a readable RIFF/WAVE container ({e})") from e


def read_wav(data: bytes) -> AudioBuffer:
    info = _probe(data)
    if info.format not in WAV_FORMATS:
        raise WavFormatError(f"container: {info.format}, expected RIFF/WAVE")
    if info.channels != 1:
        raise WavFormatError(f"channel count {info.channels}, expected 1")
    if info.subtype not in _SUBTYPES:
        raise WavFormatError(
            f"encoding: subtype {info.subtype} is not supported (expected PCM_16 or FLOAT)"
        )
    encoding, dtype = _SUBTYPES[info.subtype]

    try:
        samples, sample_rate = sf.read(io.BytesIO(data), dtype=dtype, always_2d=False)
    except (sf.SoundFileError, RuntimeError) as e:
        raise WavFormatError(f"data chunk: {e}") from e
    logger.debug(f"Read {samples.shape[0]} samples at {sample_rate} Hz ({info.subtype})")

    if encoding is WavEncoding.PCM16:
        return AudioBuffer(samples=samples.astype(np.float64) / PCM16_SCALE, sample_rate=sample_rate)
    if not np.all(np.isfinite(samples)):
        raise WavFormatError("data chunk: non-finite float sample")
    return AudioBuffer(samples=samples, sample_rate=sample_rate)


def write_wav(buf: AudioBuffer, encoding: WavEncoding | str = WavEncoding.PCM16) -> bytes:
    encoding = WavEncoding(encoding)
    if encoding is WavEncoding.PCM16:
        scaled = np.round(buf.samples.astype(np.float64) * PCM16_SCALE)
        payload = np.clip(scaled, -32768, 32767).astype(np.int16)
    else:
        payload = buf.samples.astype(np.float32)

    out = io.BytesIO()
    sf.write(out, payload, buf.sample_rate, subtype=_WRITE_SUBTYPES[encoding], format="WAV")
    return out.getvalue()


def validate_codec_input(buf: AudioBuffer) -> CodecInputCheck:
    violations = []
    if buf.sample_rate != CODEC_SAMPLE_RATE:
        violations.append(f"sample_rate {buf.sample_rate} ≠ {CODEC_SAMPLE_RATE}")
    if len(buf) == 0:
        violations.append("empty signal")
    return CodecInputCheck(ok=not violations, violations=violations)
