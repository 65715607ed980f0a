"""Binary weight container.

Layout (all integers little-endian):

    magic      4 bytes  b"LRWT"
    version    u8       1
    count      u32      number of tensors
    count x tensor:
        name_len  u16, name utf-8 bytes
        ndim      u8, dims u32 x ndim
        data      float32 little-endian, row-major, prod(dims) values
    crc32      u32      over every preceding byte
"""
import struct
import zlib
from typing import Mapping, Sequence

import numpy as np

from .types import LayerParams, LayerSpec, LayerKind, expected_shapes

MAGIC = b"LRWT"
VERSION = 1


class WeightFormatError(ValueError):
    pass


class WeightShapeError(ValueError):
    def __init__(self, name: str, expected: tuple, actual: tuple | None):
        found = "missing" if actual is None else f"got {actual}"
        super().__init__(f"tensor {name}: expected shape {expected}, {found}")
        self.name = name
        self.expected = expected
        self.actual = actual


def write_container(tensors: Mapping[str, np.ndarray]) -> bytes:
    out = bytearray(MAGIC)
    out += struct.pack("<BI", VERSION, len(tensors))
    for name, tensor in tensors.items():
        encoded = name.encode("utf-8")
        array = np.asarray(tensor, dtype="<f4")
        out += struct.pack("<H", len(encoded)) + encoded
        out += struct.pack(f"<B{array.ndim}I", array.ndim, *array.shape)
        out += array.tobytes(order="C")
    out += struct.pack("<I", zlib.crc32(bytes(out)))
    return bytes(out)


def read_container(data: bytes) -> dict[str, np.ndarray]:
    if len(data) < 9 or data[:4] != MAGIC:
        raise WeightFormatError("weight container: bad magic")
    version, count = struct.unpack("<BI", data[4:9])
    if version != VERSION:
        raise WeightFormatError(f"weight container: unsupported version {version}")

    tensors: dict[str, np.ndarray] = {}
    pos = 9
    for index in range(count):
        try:
            (name_len,) = struct.unpack_from("<H", data, pos)
            name = data[pos + 2:pos + 2 + name_len].decode("utf-8")
            pos += 2 + name_len
            (ndim,) = struct.unpack_from("<B", data, pos)
            shape = struct.unpack_from(f"<{ndim}I", data, pos + 1)
            pos += 1 + 4 * ndim
        except (struct.error, UnicodeDecodeError) as e:
            raise WeightFormatError(f"weight container: truncated at tensor {index}") from e
        nbytes = 4 * int(np.prod(shape, dtype=np.int64))
        if pos + nbytes > len(data) - 4:
            raise WeightFormatError(
                f"weight container: truncated at tensor {index} ({name}), "
                f"needs {nbytes} bytes, {max(0, len(data) - 4 - pos)} available"
            )
        tensors[name] = np.frombuffer(data, dtype="<f4", count=nbytes // 4, offset=pos).reshape(shape)
        pos += nbytes

    if pos + 4 != len(data):
        raise WeightFormatError(
            f"weight container: {len(data) - pos - 4} unexpected trailing bytes"
        )
    (stored,) = struct.unpack_from("<I", data, pos)
    if zlib.crc32(data[:pos]) != stored:
        raise WeightFormatError("weight container: checksum mismatch")
    return tensors


def params_to_tensors(
    prefix: str, specs: Sequence[LayerSpec], params: Sequence[LayerParams]
) -> dict[str, np.ndarray]:
    tensors = {}
    for i, (spec, layer_params) in enumerate(zip(specs, params)):
        name = f"{prefix}.{i}"
        for field in expected_shapes(spec):
            tensors[f"{name}.{field}"] = getattr(layer_params, field)
        if spec.kind is LayerKind.RESIDUAL_BLOCK:
            tensors.update(params_to_tensors(name, spec.layers, layer_params.children))
    return tensors


def tensors_to_params(
    prefix: str, specs: Sequence[LayerSpec], tensors: Mapping[str, np.ndarray]
) -> list[LayerParams]:
    params = []
    for i, spec in enumerate(specs):
        name = f"{prefix}.{i}"
        fields = {}
        for field, shape in expected_shapes(spec).items():
            tensor = tensors.get(f"{name}.{field}")
            if tensor is None or tuple(tensor.shape) != shape:
                raise WeightShapeError(
                    f"{name}.{field}", shape, None if tensor is None else tuple(tensor.shape)
                )
            fields[field] = np.asarray(tensor, dtype=np.float64)
        children = ()
        if spec.kind is LayerKind.RESIDUAL_BLOCK:
            children = tuple(tensors_to_params(name, spec.layers, tensors))
        params.append(LayerParams(children=children, **fields))
    return params
