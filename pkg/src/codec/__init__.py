from .descriptor import (
    DescriptorError,
    ModelDescriptor,
    dump_descriptor,
    input_periods,
    parse_descriptor,
)
from .schedule import ModeSchedule, ScheduleError, parse_schedule
from .model import Model, build_model, init_weights, load_model, model_tensors, projection_specs
from .pipeline import (
    CodecError,
    DecoderSession,
    EncoderSession,
    SessionError,
    decode,
    decode_streaming,
    embed,
    encode,
    encode_streaming,
    trim_padding,
)

__all__ = [
    "DescriptorError",
    "ModelDescriptor",
    "dump_descriptor",
    "input_periods",
    "parse_descriptor",
    "ModeSchedule",
    "ScheduleError",
    "parse_schedule",
    "Model",
    "build_model",
    "init_weights",
    "load_model",
    "model_tensors",
    "projection_specs",
    "CodecError",
    "DecoderSession",
    "EncoderSession",
    "SessionError",
    "decode",
    "decode_streaming",
    "embed",
    "encode",
    "encode_streaming",
    "trim_padding",
]
