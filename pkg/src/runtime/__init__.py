from .types import LayerKind, LayerSpec, LayerParams, LayerState, expected_shapes
from .layers import (
    BaseLayer,
    LayerError,
    build_layer,
    run_layer_offline,
    run_layer_streaming,
    reset_state,
)
from .graph import Graph, GraphError, GraphSession, run_graph, reset_states
from .weights import (
    WeightFormatError,
    WeightShapeError,
    read_container,
    write_container,
    params_to_tensors,
    tensors_to_params,
)

__all__ = [
    "LayerKind",
    "LayerSpec",
    "LayerParams",
    "LayerState",
    "expected_shapes",
    "BaseLayer",
    "LayerError",
    "build_layer",
    "run_layer_offline",
    "run_layer_streaming",
    "reset_state",
    "Graph",
    "GraphError",
    "GraphSession",
    "run_graph",
    "reset_states",
    "WeightFormatError",
    "WeightShapeError",
    "read_container",
    "write_container",
    "params_to_tensors",
    "tensors_to_params",
]
