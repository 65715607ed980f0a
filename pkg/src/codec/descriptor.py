"""Model descriptor: the declarative architecture shared by the runtime and
the compliance analyzer."""
from fractions import Fraction
from typing import Iterator, Sequence

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.audio import CODEC_SAMPLE_RATE
from src.quantization import RVQConfig
from src.runtime import LayerKind, LayerSpec


class DescriptorError(ValueError):
    def __init__(self, field: str, reason: str):
        super().__init__(f"{field}: {reason}")
        self.field = field
        self.reason = reason


def _resampling(specs: Sequence[LayerSpec]) -> Fraction:
    """Output samples per input sample across a layer chain."""
    factor = Fraction(1)
    for spec in specs:
        if spec.kind is LayerKind.CONV1D:
            factor /= spec.stride
        elif spec.kind is LayerKind.TCONV1D:
            factor *= spec.stride
    return factor


def _chain_mismatch(specs: Sequence[LayerSpec]) -> int | None:
    for i in range(1, len(specs)):
        if specs[i].in_channels != specs[i - 1].out_channels:
            return i
    return None


def input_periods(
    specs: Sequence[LayerSpec], period: Fraction
) -> Iterator[tuple[int, LayerSpec, Fraction]]:
    """Yield (index, spec, duration of one input sample) along a chain.

    ``period`` is the duration of one sample entering the first layer, in
    whatever unit the caller uses (audio samples, seconds).
    """
    for i, spec in enumerate(specs):
        yield i, spec, period
        if spec.kind is LayerKind.CONV1D:
            period *= spec.stride
        elif spec.kind is LayerKind.TCONV1D:
            period /= spec.stride


class ModelDescriptor(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    sample_rate: int = CODEC_SAMPLE_RATE
    frame_hop: int = Field(ge=1, le=0xFFFF)
    encoder: tuple[LayerSpec, ...]
    decoder: tuple[LayerSpec, ...]
    rvq: RVQConfig

    @model_validator(mode="after")
    def _check(self) -> "ModelDescriptor":
        if self.sample_rate != CODEC_SAMPLE_RATE:
            raise ValueError(f"sample_rate {self.sample_rate} ≠ {CODEC_SAMPLE_RATE}")
        for section in ("encoder", "decoder"):
            specs = getattr(self, section)
            if not specs:
                raise ValueError(f"{section} has no layers")
            bad = _chain_mismatch(specs)
            if bad is not None:
                raise ValueError(
                    f"{section} layer {bad}: in_channels {specs[bad].in_channels} does not "
                    f"match previous out_channels {specs[bad - 1].out_channels}"
                )
        down = 1 / _resampling(self.encoder)
        if down != self.frame_hop:
            raise ValueError(f"encoder stride product {down} ≠ frame_hop {self.frame_hop}")
        up = _resampling(self.decoder)
        if up != self.frame_hop:
            raise ValueError(f"decoder upsampling product {up} ≠ frame_hop {self.frame_hop}")
        if self.encoder[0].in_channels != 1:
            raise ValueError(f"encoder input has {self.encoder[0].in_channels} channels, expected 1")
        if self.decoder[-1].out_channels != 1:
            raise ValueError(f"decoder output has {self.decoder[-1].out_channels} channels, expected 1")
        if self.encoder[-1].out_channels != self.rvq.model_dim:
            raise ValueError(
                f"encoder output channels {self.encoder[-1].out_channels} ≠ "
                f"rvq.model_dim {self.rvq.model_dim}"
            )
        if self.decoder[0].in_channels != self.rvq.model_dim:
            raise ValueError(
                f"decoder input channels {self.decoder[0].in_channels} ≠ "
                f"rvq.model_dim {self.rvq.model_dim}"
            )
        return self

    @property
    def frame_rate(self) -> Fraction:
        return Fraction(self.sample_rate, self.frame_hop)

    @property
    def encoder_lookahead_samples(self) -> int:
        """Future audio samples the encoder needs before emitting a frame."""
        total = sum(
            spec.effective_lookahead * period
            for _, spec, period in input_periods(self.encoder, Fraction(1))
        )
        return int(total) if total.denominator == 1 else int(total) + 1

    @property
    def decoder_lookahead_frames(self) -> int:
        """Future frames the decoder needs before its output reaches a frame end."""
        total = sum(
            spec.effective_lookahead * period
            for _, spec, period in input_periods(self.decoder, Fraction(1))
        )
        return int(total) if total.denominator == 1 else int(total) + 1

    def mode_bitrate(self, n_active: int) -> Fraction:
        return n_active * self.rvq.bits_per_index * self.frame_rate


def _first_error(e: ValidationError) -> DescriptorError:
    err = e.errors()[0]
    field = ".".join(str(part) for part in err["loc"]) or "descriptor"
    return DescriptorError(field, err["msg"])


def parse_descriptor(data: bytes | str) -> ModelDescriptor:
    try:
        raw = yaml.safe_load(data)
    except yaml.YAMLError as e:
        raise DescriptorError("descriptor", f"not valid YAML: {e}") from e
    if not isinstance(raw, dict):
        raise DescriptorError("descriptor", "expected a mapping at top level")
    try:
        return ModelDescriptor.model_validate(raw)
    except ValidationError as e:
        raise _first_error(e) from e


def dump_descriptor(descriptor: ModelDescriptor) -> str:
    return yaml.safe_dump(
        descriptor.model_dump(mode="json", exclude_defaults=True), sort_keys=False
    )
