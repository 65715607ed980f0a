"""Offline and streaming encode/decode.

Both paths run the same layer kernels and quantize one frame at a time, so
a stream fed in arbitrary chunks produces exactly the offline result.
"""
import logging
import math
from typing import Sequence

import numpy as np

from src.audio import AudioBuffer, validate_codec_input
from src.bitstream import SUPER_FRAME_FRAMES, EncodedStream
from .model import Model
from .schedule import ModeSchedule

logger = logging.getLogger(__name__)


class CodecError(ValueError):
    pass


class SessionError(ValueError):
    pass


def _check_stream(model: Model, stream: EncodedStream) -> None:
    if stream.frame_hop != model.frame_hop or stream.sample_rate != model.sample_rate:
        raise CodecError(
            f"stream is {stream.sample_rate} Hz / hop {stream.frame_hop}, model is "
            f"{model.sample_rate} Hz / hop {model.frame_hop}"
        )
    for sf in stream.super_frames:
        if sf.mode > model.num_layers:
            raise CodecError(f"mode {sf.mode} exceeds the model's {model.num_layers} RVQ layers")


def _frame_modes(schedule: ModeSchedule, start: int, count: int) -> list[int]:
    return [schedule.mode_for((start + t) // SUPER_FRAME_FRAMES) for t in range(count)]


def embed(model: Model, samples) -> np.ndarray:
    """Encoder output for every started frame, (model_dim, ceil(n / hop)).

    The input is zero-padded to whole frames plus the encoder lookahead.
    """
    samples = np.asarray(samples, dtype=np.float64).reshape(-1)
    hop = model.frame_hop
    n_frames = math.ceil(samples.shape[0] / hop)
    padded = np.zeros(n_frames * hop + model.descriptor.encoder_lookahead_samples)
    padded[:samples.shape[0]] = samples
    latent = model.encoder.forward(padded)
    if latent.shape[1] < n_frames:
        raise CodecError(f"encoder produced {latent.shape[1]} frames, expected {n_frames}")
    return latent[:, :n_frames]


def encode(model: Model, audio: AudioBuffer, schedule: ModeSchedule) -> EncodedStream:
    check = validate_codec_input(audio)
    if not check.ok:
        raise CodecError("; ".join(check.violations))
    schedule.check(model.num_layers)

    latent = embed(model, audio.samples)
    n_frames = latent.shape[1]
    frames = model.quantize_frames(latent, _frame_modes(schedule, 0, n_frames))
    logger.debug(f"Encoded {len(audio)} samples into {n_frames} frames")
    return EncodedStream.from_frames(
        frames, model.frame_hop, model.sample_rate, source_samples=len(audio)
    )


def _decoder_tail(model: Model) -> np.ndarray:
    return np.zeros((model.descriptor.rvq.model_dim, model.descriptor.decoder_lookahead_frames))


def decode(model: Model, stream: EncodedStream) -> AudioBuffer:
    _check_stream(model, stream)
    frames = stream.frames()
    n_samples = len(frames) * model.frame_hop
    latent = np.concatenate([model.dequantize_frames(frames), _decoder_tail(model)], axis=1)
    out = model.decoder.forward(latent)[0]
    if out.shape[0] < n_samples:
        raise CodecError(f"decoder produced {out.shape[0]} samples, expected {n_samples}")
    return AudioBuffer(out[:n_samples], model.sample_rate)


def trim_padding(audio: AudioBuffer, source_samples: int) -> AudioBuffer:
    """Drop the zero padding that encode added after the last input sample."""
    if not 0 <= source_samples <= len(audio):
        raise CodecError(f"source length {source_samples} outside [0, {len(audio)}]")
    return AudioBuffer(audio.samples[:source_samples], audio.sample_rate)


class EncoderSession:
    """Chunk-by-chunk encoder. Single owner; distinct sessions over one model
    may run in parallel."""

    def __init__(self, model: Model, schedule: ModeSchedule):
        schedule.check(model.num_layers)
        self.model = model
        self.schedule = schedule
        self._graph = model.encoder.session()
        self._pending = np.zeros((model.descriptor.rvq.model_dim, 0))
        self._samples_in = 0
        self._frames_out = 0
        self._flushed = False

    @property
    def frames_emitted(self) -> int:
        return self._frames_out

    def push(self, samples) -> list[np.ndarray]:
        if self._flushed:
            raise SessionError("session already flushed; reset it before pushing more audio")
        chunk = np.asarray(samples, dtype=np.float64).reshape(-1)
        latent = self._graph.push(chunk)
        self._samples_in += chunk.shape[0]
        return self._emit(latent)

    def flush(self) -> list[np.ndarray]:
        """Zero-pad the trailing partial frame and the encoder lookahead."""
        if self._flushed:
            return []
        target = math.ceil(self._samples_in / self.model.frame_hop)
        pad = (
            target * self.model.frame_hop
            - self._samples_in
            + self.model.descriptor.encoder_lookahead_samples
        )
        frames = self._emit(self._graph.push(np.zeros(pad)))
        self._flushed = True
        return frames

    def reset(self) -> None:
        self._graph.reset()
        self._pending = np.zeros_like(self._pending[:, :0])
        self._samples_in = 0
        self._frames_out = 0
        self._flushed = False

    def _emit(self, latent: np.ndarray) -> list[np.ndarray]:
        pending = np.concatenate([self._pending, latent], axis=1)
        limit = math.ceil(self._samples_in / self.model.frame_hop)
        count = max(0, min(pending.shape[1], limit - self._frames_out))
        modes = _frame_modes(self.schedule, self._frames_out, count)
        frames = self.model.quantize_frames(pending[:, :count], modes)
        self._pending = pending[:, count:]
        self._frames_out += count
        return frames


class DecoderSession:
    """Chunk-by-chunk decoder; frames of any arity may follow each other."""

    def __init__(self, model: Model):
        self.model = model
        self._graph = model.decoder.session()
        self._frames_in = 0
        self._samples_out = 0
        self._flushed = False

    def push(self, frames: Sequence[np.ndarray]) -> np.ndarray:
        if self._flushed:
            raise SessionError("session already flushed; reset it before pushing more frames")
        for indices in frames:
            if len(indices) > self.model.num_layers:
                raise CodecError(
                    f"frame with {len(indices)} indices exceeds the model's "
                    f"{self.model.num_layers} RVQ layers"
                )
        self._frames_in += len(frames)
        return self._emit(self._graph.push(self.model.dequantize_frames(frames)))

    def flush(self) -> np.ndarray:
        if self._flushed:
            return np.zeros(0, dtype=np.float32)
        out = self._emit(self._graph.push(_decoder_tail(self.model)))
        self._flushed = True
        return out

    def reset(self) -> None:
        self._graph.reset()
        self._frames_in = 0
        self._samples_out = 0
        self._flushed = False

    def _emit(self, out: np.ndarray) -> np.ndarray:
        limit = self._frames_in * self.model.frame_hop
        count = max(0, min(out.shape[1], limit - self._samples_out))
        self._samples_out += count
        return np.asarray(out[0, :count], dtype=np.float32)


def _check_session(model: Model, session) -> None:
    if session.model is not model:
        raise SessionError("session was opened on a different model")


def encode_streaming(
    model: Model, session: EncoderSession, chunk
) -> tuple[list[np.ndarray], EncoderSession]:
    _check_session(model, session)
    return session.push(chunk), session


def decode_streaming(
    model: Model, session: DecoderSession, frames: Sequence[np.ndarray]
) -> tuple[np.ndarray, DecoderSession]:
    _check_session(model, session)
    return session.push(frames), session
