import logging
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from src.quantization import CODEBOOK_SIZE, Codebook, ProjectionKind, dequantize, quantize
from src.runtime import (
    BaseLayer,
    Graph,
    GraphError,
    LayerKind,
    LayerParams,
    LayerSpec,
    WeightShapeError,
    build_layer,
    expected_shapes,
    params_to_tensors,
    read_container,
    tensors_to_params,
)

from .descriptor import DescriptorError, ModelDescriptor, parse_descriptor

logger = logging.getLogger(__name__)


def projection_specs(descriptor: ModelDescriptor) -> tuple[LayerSpec, LayerSpec] | None:
    """Input (model_dim -> dim) and output (dim -> model_dim) projections."""
    rvq = descriptor.rvq
    if rvq.projection is ProjectionKind.IDENTITY:
        return None
    return (
        LayerSpec(kind=LayerKind.LINEAR, in_channels=rvq.model_dim, out_channels=rvq.dim),
        LayerSpec(kind=LayerKind.LINEAR, in_channels=rvq.dim, out_channels=rvq.model_dim),
    )


_PROJECTIONS = ("rvq.in_proj", "rvq.out_proj")


@dataclass(frozen=True, eq=False)
class Model:
    """Loaded encoder, quantizer and decoder. Never mutated after construction;
    sessions keep their own state."""

    descriptor: ModelDescriptor
    encoder: Graph
    decoder: Graph
    codebooks: tuple[Codebook, ...]
    in_proj: BaseLayer | None = None
    out_proj: BaseLayer | None = None

    @property
    def frame_hop(self) -> int:
        return self.descriptor.frame_hop

    @property
    def sample_rate(self) -> int:
        return self.descriptor.sample_rate

    @property
    def num_layers(self) -> int:
        return len(self.codebooks)

    def project_in(self, latent: np.ndarray) -> np.ndarray:
        """(model_dim, T) encoder output -> (dim, T) quantizer input."""
        return latent if self.in_proj is None else self.in_proj.forward(latent)

    def project_out(self, z: np.ndarray) -> np.ndarray:
        return z if self.out_proj is None else self.out_proj.forward(z)

    def quantize_frames(self, latent: np.ndarray, modes: Sequence[int]) -> list[np.ndarray]:
        """Quantize each column of a (model_dim, T) latent with its own mode."""
        z = self.project_in(latent)
        return [quantize(z[:, t], self.codebooks, mode)[0] for t, mode in enumerate(modes)]

    def dequantize_frames(self, frames: Sequence[np.ndarray]) -> np.ndarray:
        """Index tuples of any arity -> (model_dim, T) decoder input."""
        z = np.zeros((self.descriptor.rvq.dim, len(frames)))
        for t, indices in enumerate(frames):
            z[:, t] = dequantize(indices, self.codebooks)
        return self.project_out(z)

    def with_codebooks(self, codebooks: Sequence[Codebook]) -> "Model":
        codebooks = tuple(codebooks)
        if len(codebooks) != self.num_layers or any(
            cb.dim != self.descriptor.rvq.dim for cb in codebooks
        ):
            raise DescriptorError(
                "rvq", f"expected {self.num_layers} codebooks of dim {self.descriptor.rvq.dim}"
            )
        return replace(self, codebooks=codebooks)

    def parameter_count(self) -> int:
        return sum(int(np.asarray(t).size) for t in model_tensors(self).values())


def _codebook_name(layer: int) -> str:
    return f"rvq.codebook.{layer}"


def model_tensors(model: Model) -> dict[str, np.ndarray]:
    """Every tensor of a model, named as the weight container stores them."""
    descriptor = model.descriptor
    tensors = params_to_tensors(
        "encoder", descriptor.encoder, [layer.params for layer in model.encoder.layers]
    )
    tensors.update(params_to_tensors(
        "decoder", descriptor.decoder, [layer.params for layer in model.decoder.layers]
    ))
    for i, codebook in enumerate(model.codebooks):
        tensors[_codebook_name(i)] = codebook.codewords
    for name, layer in zip(_PROJECTIONS, (model.in_proj, model.out_proj)):
        if layer is not None:
            tensors[f"{name}.weight"] = layer.params.weight
            tensors[f"{name}.bias"] = layer.params.bias
    return tensors


def _load_projection(name: str, spec: LayerSpec, tensors: Mapping[str, np.ndarray]) -> BaseLayer:
    fields = {}
    for field, shape in expected_shapes(spec).items():
        tensor = tensors.get(f"{name}.{field}")
        if tensor is None or tuple(tensor.shape) != shape:
            raise WeightShapeError(
                f"{name}.{field}", shape, None if tensor is None else tuple(tensor.shape)
            )
        fields[field] = np.asarray(tensor, dtype=np.float64)
    return build_layer(spec, LayerParams(**fields))


def build_model(descriptor: ModelDescriptor, tensors: Mapping[str, np.ndarray]) -> Model:
    try:
        encoder = Graph(descriptor.encoder, tensors_to_params("encoder", descriptor.encoder, tensors))
        decoder = Graph(descriptor.decoder, tensors_to_params("decoder", descriptor.decoder, tensors))
    except GraphError as e:
        raise DescriptorError("weights", str(e)) from e

    rvq = descriptor.rvq
    codebooks = []
    for i in range(rvq.num_layers):
        name = _codebook_name(i)
        tensor = tensors.get(name)
        if tensor is None or tuple(tensor.shape) != (CODEBOOK_SIZE, rvq.dim):
            raise WeightShapeError(
                name, (CODEBOOK_SIZE, rvq.dim), None if tensor is None else tuple(tensor.shape)
            )
        codebooks.append(Codebook.from_codewords(tensor))

    in_proj = out_proj = None
    specs = projection_specs(descriptor)
    if specs is not None:
        in_proj = _load_projection(_PROJECTIONS[0], specs[0], tensors)
        out_proj = _load_projection(_PROJECTIONS[1], specs[1], tensors)

    logger.debug(f"Built model: hop {descriptor.frame_hop}, {rvq.num_layers} RVQ layers of dim {rvq.dim}")
    return Model(descriptor, encoder, decoder, tuple(codebooks), in_proj, out_proj)


def load_model(descriptor_bytes: bytes | str, weights_bytes: bytes) -> Model:
    descriptor = parse_descriptor(descriptor_bytes)
    return build_model(descriptor, read_container(weights_bytes))


def _init_layer(spec: LayerSpec, rng: np.random.Generator) -> LayerParams:
    children = tuple(_init_layer(sub, rng) for sub in spec.layers)
    shapes = expected_shapes(spec)
    if not shapes:
        return LayerParams(children=children)
    weight_shape = shapes["weight"]
    if spec.kind is LayerKind.TCONV1D:
        fan_in = max(1, weight_shape[0] // spec.groups * weight_shape[2] // spec.stride)
    else:
        fan_in = int(np.prod(weight_shape[1:]))
    weight = rng.standard_normal(weight_shape) / np.sqrt(fan_in)
    return LayerParams(
        weight=weight.astype(np.float32),
        bias=np.zeros(shapes["bias"], dtype=np.float32),
        children=children,
    )


def init_weights(descriptor: ModelDescriptor, seed: int = 0) -> dict[str, np.ndarray]:
    """Seeded random tensors for every weight a descriptor declares."""
    rng = np.random.default_rng(seed)
    tensors = {}
    for section in ("encoder", "decoder"):
        specs = getattr(descriptor, section)
        tensors.update(params_to_tensors(section, specs, [_init_layer(s, rng) for s in specs]))
    rvq = descriptor.rvq
    for i in range(rvq.num_layers):
        codewords = rng.standard_normal((CODEBOOK_SIZE, rvq.dim)) / np.sqrt(rvq.dim)
        tensors[_codebook_name(i)] = codewords.astype(np.float32)
    specs = projection_specs(descriptor)
    if specs is not None:
        for name, spec in zip(_PROJECTIONS, specs):
            params = _init_layer(spec, rng)
            tensors[f"{name}.weight"] = params.weight
            tensors[f"{name}.bias"] = params.bias
    return tensors
