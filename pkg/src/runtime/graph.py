from typing import Sequence

import numpy as np

from .layers import BaseLayer, LayerError, build_layer, reset_state, as_frame
from .types import LayerParams, LayerSpec, LayerState


class GraphError(ValueError):
    def __init__(self, index: int, reason: str):
        super().__init__(f"layer {index}: {reason}")
        self.index = index
        self.reason = reason


class Graph:
    """A chain of layers executed in order, offline or chunk by chunk."""

    def __init__(self, specs: Sequence[LayerSpec], params: Sequence[LayerParams] | None = None):
        params = list(params) if params is not None else [LayerParams()] * len(specs)
        if len(params) != len(specs):
            raise GraphError(len(params), f"{len(specs)} layers but {len(params)} parameter sets")
        self.specs = list(specs)
        self.layers: list[BaseLayer] = []
        for i, (spec, layer_params) in enumerate(zip(self.specs, params)):
            if i and spec.in_channels != self.specs[i - 1].out_channels:
                raise GraphError(
                    i,
                    f"in_channels {spec.in_channels} does not match previous "
                    f"out_channels {self.specs[i - 1].out_channels}",
                )
            try:
                self.layers.append(build_layer(spec, layer_params))
            except LayerError as e:
                raise GraphError(i, str(e)) from e

    @property
    def in_channels(self) -> int | None:
        return self.specs[0].in_channels if self.specs else None

    @property
    def out_channels(self) -> int | None:
        return self.specs[-1].out_channels if self.specs else None

    def forward(self, x) -> np.ndarray:
        x = as_frame(x)
        for i, layer in enumerate(self.layers):
            try:
                x = layer.forward(x)
            except LayerError as e:
                raise GraphError(i, str(e)) from e
        return x

    def init_states(self) -> list[LayerState]:
        return [layer.init_state() for layer in self.layers]

    def step(self, states: Sequence[LayerState], chunk) -> tuple[np.ndarray, list[LayerState]]:
        if len(states) != len(self.layers):
            raise GraphError(len(states), f"{len(states)} states for {len(self.layers)} layers")
        x = as_frame(chunk)
        new_states = []
        for i, (layer, state) in enumerate(zip(self.layers, states)):
            try:
                x, state = layer.step(state, x)
            except LayerError as e:
                raise GraphError(i, str(e)) from e
            new_states.append(state)
        return x, new_states

    def session(self) -> "GraphSession":
        return GraphSession(self)


class GraphSession:
    """Streaming context over a graph. Single owner: do not drive one session
    from several threads."""

    def __init__(self, graph: Graph):
        self.graph = graph
        self.states = graph.init_states()

    def push(self, chunk) -> np.ndarray:
        out, self.states = self.graph.step(self.states, chunk)
        return out

    def reset(self) -> None:
        self.states = reset_states(self.states)


def run_graph(specs: Sequence[LayerSpec], params: Sequence[LayerParams] | None, x) -> np.ndarray:
    return Graph(specs, params).forward(x)


def reset_states(states: Sequence[LayerState]) -> list[LayerState]:
    return [reset_state(state) for state in states]
