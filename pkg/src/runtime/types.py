from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .activations import ACTIVATIONS


class LayerKind(str, Enum):
    CONV1D = "conv1d"
    TCONV1D = "tconv1d"
    LINEAR = "linear"
    RESIDUAL_BLOCK = "residual_block"
    ACTIVATION = "activation"


class LayerSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: LayerKind
    in_channels: int = Field(ge=1)
    out_channels: int = Field(ge=1)
    kernel: int = Field(default=1, ge=1)
    stride: int = Field(default=1, ge=1)
    lookahead: int = Field(default=0, ge=0)
    groups: int = Field(default=1, ge=1)
    activation: Optional[str] = None
    layers: tuple["LayerSpec", ...] = ()

    @model_validator(mode="after")
    def _check_kind(self) -> "LayerSpec":
        if self.lookahead >= self.kernel and self.kind is LayerKind.CONV1D:
            raise ValueError(f"lookahead {self.lookahead} must be < kernel {self.kernel}")
        if self.in_channels % self.groups or self.out_channels % self.groups:
            raise ValueError(
                f"groups {self.groups} must divide in_channels {self.in_channels} "
                f"and out_channels {self.out_channels}"
            )
        if self.layers and self.kind is not LayerKind.RESIDUAL_BLOCK:
            raise ValueError(f"{self.kind.value} layer cannot hold sub-layers")

        if self.kind is LayerKind.TCONV1D and self.lookahead:
            raise ValueError("tconv1d layers are causal; lookahead must be 0")
        if self.kind in (LayerKind.LINEAR, LayerKind.ACTIVATION, LayerKind.RESIDUAL_BLOCK):
            if (self.kernel, self.stride, self.lookahead, self.groups) != (1, 1, 0, 1):
                raise ValueError(
                    f"{self.kind.value} layers take no kernel/stride/lookahead/groups"
                )
        if self.kind is LayerKind.ACTIVATION:
            if self.in_channels != self.out_channels:
                raise ValueError("activation layers must preserve channel count")
            if self.activation not in ACTIVATIONS:
                raise ValueError(
                    f"activation {self.activation!r} unknown; "
                    f"choose from {sorted(ACTIVATIONS)}"
                )
        if self.kind is LayerKind.RESIDUAL_BLOCK:
            self._check_residual()
        return self

    def _check_residual(self) -> None:
        if self.in_channels != self.out_channels:
            raise ValueError("residual_block must preserve channel count")
        if not self.layers:
            raise ValueError("residual_block needs at least one sub-layer")
        channels = self.in_channels
        for i, sub in enumerate(self.layers):
            if sub.kind in (LayerKind.TCONV1D, LayerKind.RESIDUAL_BLOCK) or sub.stride != 1:
                raise ValueError(f"residual_block sub-layer {i}: only stride-1 "
                                 "conv1d, linear and activation layers allowed")
            if sub.in_channels != channels:
                raise ValueError(f"residual_block sub-layer {i}: in_channels "
                                 f"{sub.in_channels}, expected {channels}")
            channels = sub.out_channels
        if channels != self.out_channels:
            raise ValueError(f"residual_block sub-layers end at {channels} channels, "
                             f"expected {self.out_channels}")

    @property
    def effective_lookahead(self) -> int:
        """Future input samples (at this layer's input rate) one output depends on."""
        if self.kind is LayerKind.RESIDUAL_BLOCK:
            return sum(sub.effective_lookahead for sub in self.layers)
        return self.lookahead


@dataclass(frozen=True, eq=False)
class LayerParams:
    weight: Optional[np.ndarray] = None
    bias: Optional[np.ndarray] = None
    children: tuple["LayerParams", ...] = ()


@dataclass(frozen=True, eq=False)
class LayerState:
    """Streaming context for one layer.

    ``buffer`` has a fixed capacity per layer; its first ``fill`` columns hold
    pending input. ``skip`` counts incoming samples a strided layer must drop
    before its next window; ``position`` counts input samples consumed.
    """

    kind: LayerKind
    buffer: np.ndarray
    fill: int
    initial_fill: int
    skip: int = 0
    position: int = 0
    children: tuple["LayerState", ...] = field(default_factory=tuple)

    @property
    def capacity(self) -> int:
        return int(self.buffer.shape[1])


def expected_shapes(spec: LayerSpec) -> dict[str, tuple[int, ...]]:
    """Weight tensor shapes a layer needs (PyTorch layout conventions)."""
    if spec.kind is LayerKind.CONV1D:
        return {
            "weight": (spec.out_channels, spec.in_channels // spec.groups, spec.kernel),
            "bias": (spec.out_channels,),
        }
    if spec.kind is LayerKind.TCONV1D:
        return {
            "weight": (spec.in_channels, spec.out_channels // spec.groups, spec.kernel),
            "bias": (spec.out_channels,),
        }
    if spec.kind is LayerKind.LINEAR:
        return {
            "weight": (spec.out_channels, spec.in_channels),
            "bias": (spec.out_channels,),
        }
    return {}


LayerSpec.model_rebuild()
