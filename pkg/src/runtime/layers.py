"""Layer kernels shared by offline and streaming execution.

Offline and streaming paths call the same accumulation routines, which add
contributions per output element in a fixed order (kernel tap, then input
channel) with time vectorized. Chunking therefore cannot change any output
value.
"""
from abc import ABC, abstractmethod
from dataclasses import replace

import numpy as np

from .activations import ACTIVATIONS
from .types import LayerKind, LayerParams, LayerSpec, LayerState, expected_shapes


class LayerError(ValueError):
    pass


def _correlate(
    padded: np.ndarray,
    weight: np.ndarray,
    bias: np.ndarray,
    stride: int,
    groups: int,
    n_out: int,
) -> np.ndarray:
    c_out, c_in_group, kernel = weight.shape
    out_group = c_out // groups
    acc = np.zeros((c_out, n_out))
    if n_out == 0:
        return acc
    span = stride * (n_out - 1) + 1
    for g in range(groups):
        rows = slice(g * out_group, (g + 1) * out_group)
        for tap in range(kernel):
            frames = padded[g * c_in_group:(g + 1) * c_in_group, tap:tap + span:stride]
            for c in range(c_in_group):
                acc[rows] += weight[rows, c, tap, None] * frames[c]
    acc += bias[:, None]
    return acc


def _overlap_add(
    work: np.ndarray,
    weight: np.ndarray,
    bias: np.ndarray,
    stride: int,
    groups: int,
    history: int,
) -> np.ndarray:
    c_in, out_group, kernel = weight.shape
    in_group = c_in // groups
    c_out = out_group * groups
    n_in = work.shape[1] - history
    acc = np.zeros((c_out, n_in, stride))
    for j in range(history + 1):
        src = work[:, history - j:history - j + n_in]
        for r in range(stride):
            tap = j * stride + r
            if tap >= kernel:
                break
            for g in range(groups):
                rows = slice(g * out_group, (g + 1) * out_group)
                for c in range(g * in_group, (g + 1) * in_group):
                    acc[rows, :, r] += weight[c, :, tap, None] * src[c]
    out = acc.reshape(c_out, n_in * stride)
    out += bias[:, None]
    return out


class BaseLayer(ABC):
    kind: LayerKind

    def __init__(self, spec: LayerSpec, params: LayerParams):
        if spec.kind is not self.kind:
            raise LayerError(f"{type(self).__name__} cannot run a {spec.kind.value} layer")
        self.spec = spec
        self.params = params
        self._check_params()

    def _check_params(self) -> None:
        for name, shape in expected_shapes(self.spec).items():
            tensor = getattr(self.params, name)
            if tensor is None:
                raise LayerError(f"{self.kind.value} {name}: missing")
            if tuple(tensor.shape) != shape:
                raise LayerError(
                    f"{self.kind.value} {name}: expected shape {shape}, got {tuple(tensor.shape)}"
                )
            if not np.all(np.isfinite(tensor)):
                raise LayerError(f"{self.kind.value} {name}: non-finite values")

    @property
    def state_capacity(self) -> int:
        return 0

    @property
    def initial_fill(self) -> int:
        return 0

    def init_state(self) -> LayerState:
        return LayerState(
            kind=self.kind,
            buffer=np.zeros((self.spec.in_channels, self.state_capacity)),
            fill=self.initial_fill,
            initial_fill=self.initial_fill,
        )

    @abstractmethod
    def forward(self, x: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def _advance(self, state: LayerState, chunk: np.ndarray) -> tuple[np.ndarray, LayerState]:
        pass

    def step(self, state: LayerState, chunk: np.ndarray) -> tuple[np.ndarray, LayerState]:
        self._check_state(state)
        self._check_input(chunk)
        if chunk.shape[1] == 0:
            return np.zeros((self.spec.out_channels, 0)), state
        out, new_state = self._advance(state, chunk)
        return out, replace(new_state, position=state.position + chunk.shape[1])

    def _check_input(self, x: np.ndarray) -> None:
        if x.ndim != 2 or x.shape[0] != self.spec.in_channels:
            raise LayerError(
                f"{self.kind.value} input: expected {self.spec.in_channels} channels, "
                f"got shape {x.shape}"
            )

    def _check_state(self, state: LayerState) -> None:
        if (
            state.kind is not self.kind
            or state.buffer.shape != (self.spec.in_channels, self.state_capacity)
        ):
            raise LayerError(
                f"state for {state.kind.value} with buffer {state.buffer.shape} does not "
                f"match {self.kind.value} layer ({self.spec.in_channels}, {self.state_capacity})"
            )


class Conv1dLayer(BaseLayer):
    kind = LayerKind.CONV1D

    @property
    def state_capacity(self) -> int:
        return self.spec.kernel - 1

    @property
    def initial_fill(self) -> int:
        return self.spec.kernel - 1 - self.spec.lookahead

    def _n_out(self, length: int) -> int:
        if length < self.spec.kernel:
            return 0
        return (length - self.spec.kernel) // self.spec.stride + 1

    def _run(self, padded: np.ndarray) -> np.ndarray:
        return _correlate(
            padded, self.params.weight, self.params.bias,
            self.spec.stride, self.spec.groups, self._n_out(padded.shape[1]),
        )

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._check_input(x)
        pad = np.zeros((self.spec.in_channels, self.initial_fill))
        return self._run(np.concatenate([pad, x], axis=1))

    def _advance(self, state, chunk):
        dropped = min(state.skip, chunk.shape[1])
        work = np.concatenate([state.buffer[:, :state.fill], chunk[:, dropped:]], axis=1)
        out = self._run(work)

        next_start = out.shape[1] * self.spec.stride
        leftover = work[:, next_start:]
        skip = state.skip - dropped + max(0, next_start - work.shape[1])
        buffer = np.zeros_like(state.buffer)
        buffer[:, :leftover.shape[1]] = leftover
        return out, replace(state, buffer=buffer, fill=leftover.shape[1], skip=skip)


class TransposedConv1dLayer(BaseLayer):
    """Overlap-add of stride-spaced kernel copies; the tail past
    ``len * stride`` is cropped so every output is final once its input
    frame has arrived."""

    kind = LayerKind.TCONV1D

    @property
    def state_capacity(self) -> int:
        return -(-self.spec.kernel // self.spec.stride) - 1

    @property
    def initial_fill(self) -> int:
        return self.state_capacity

    def _run(self, work: np.ndarray) -> np.ndarray:
        return _overlap_add(
            work, self.params.weight, self.params.bias,
            self.spec.stride, self.spec.groups, self.state_capacity,
        )

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._check_input(x)
        history = np.zeros((self.spec.in_channels, self.state_capacity))
        return self._run(np.concatenate([history, x], axis=1))

    def _advance(self, state, chunk):
        work = np.concatenate([state.buffer, chunk], axis=1)
        out = self._run(work)
        keep = self.state_capacity
        buffer = work[:, work.shape[1] - keep:].copy()
        return out, replace(state, buffer=buffer, fill=keep)


class LinearLayer(BaseLayer):
    kind = LayerKind.LINEAR

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._check_input(x)
        return _correlate(x, self.params.weight[:, :, None], self.params.bias, 1, 1, x.shape[1])

    def _advance(self, state, chunk):
        return self.forward(chunk), state


class ActivationLayer(BaseLayer):
    kind = LayerKind.ACTIVATION

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._check_input(x)
        return ACTIVATIONS[self.spec.activation](x)

    def _advance(self, state, chunk):
        return self.forward(chunk), state


class ResidualBlockLayer(BaseLayer):
    """x + f(x) with f a stride-1 chain; the skip path is delayed by the
    chain's total lookahead so both paths stay aligned."""

    kind = LayerKind.RESIDUAL_BLOCK

    def __init__(self, spec: LayerSpec, params: LayerParams):
        super().__init__(spec, params)
        if len(params.children) != len(spec.layers):
            raise LayerError(
                f"residual_block: {len(spec.layers)} sub-layers, "
                f"{len(params.children)} parameter sets"
            )
        self.children = [
            build_layer(sub, sub_params) for sub, sub_params in zip(spec.layers, params.children)
        ]

    @property
    def state_capacity(self) -> int:
        return self.spec.effective_lookahead

    def init_state(self) -> LayerState:
        return replace(
            super().init_state(),
            children=tuple(child.init_state() for child in self.children),
        )

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._check_input(x)
        y = x
        for child in self.children:
            y = child.forward(y)
        return x[:, :y.shape[1]] + y

    def _advance(self, state, chunk):
        y = chunk
        children = []
        for child, child_state in zip(self.children, state.children):
            y, child_state = child.step(child_state, y)
            children.append(child_state)
        queue = np.concatenate([state.buffer[:, :state.fill], chunk], axis=1)
        out = queue[:, :y.shape[1]] + y
        leftover = queue[:, y.shape[1]:]
        buffer = np.zeros_like(state.buffer)
        buffer[:, :leftover.shape[1]] = leftover
        return out, replace(
            state, buffer=buffer, fill=leftover.shape[1], children=tuple(children)
        )


_LAYERS: dict[LayerKind, type[BaseLayer]] = {
    LayerKind.CONV1D: Conv1dLayer,
    LayerKind.TCONV1D: TransposedConv1dLayer,
    LayerKind.LINEAR: LinearLayer,
    LayerKind.ACTIVATION: ActivationLayer,
    LayerKind.RESIDUAL_BLOCK: ResidualBlockLayer,
}


def build_layer(spec: LayerSpec, params: LayerParams | None = None) -> BaseLayer:
    layer_cls = _LAYERS.get(spec.kind)
    if layer_cls is None:
        raise LayerError(f"unknown layer kind {spec.kind!r}")
    return layer_cls(spec, params or LayerParams())


def as_frame(x) -> np.ndarray:
    frame = np.asarray(x, dtype=np.float64)
    if frame.ndim == 1:
        frame = frame[None, :]
    if not np.all(np.isfinite(frame)):
        raise LayerError("input frame: non-finite values")
    return frame


def run_layer_offline(spec: LayerSpec, weights: LayerParams | None, x) -> np.ndarray:
    return build_layer(spec, weights).forward(as_frame(x))


def run_layer_streaming(
    spec: LayerSpec,
    weights: LayerParams | None,
    state: LayerState,
    chunk,
) -> tuple[np.ndarray, LayerState]:
    return build_layer(spec, weights).step(state, as_frame(chunk))


def reset_state(state: LayerState) -> LayerState:
    return replace(
        state,
        buffer=np.zeros_like(state.buffer),
        fill=state.initial_fill,
        skip=0,
        position=0,
        children=tuple(reset_state(child) for child in state.children),
    )
