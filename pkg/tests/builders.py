from pathlib import Path

import numpy as np

from src.codec import ModelDescriptor, init_weights
from src.runtime import LayerSpec

REPO_ROOT = Path(__file__).resolve().parent.parent
CONFIG_DIR = REPO_ROOT / "config"
REFERENCE_DESCRIPTOR = CONFIG_DIR / "models" / "reference_track1.yaml"


def conv(c_in, c_out, kernel=1, stride=1, lookahead=0, groups=1) -> dict:
    return dict(kind="conv1d", in_channels=c_in, out_channels=c_out, kernel=kernel,
                stride=stride, lookahead=lookahead, groups=groups)


def tconv(c_in, c_out, kernel, stride, groups=1) -> dict:
    return dict(kind="tconv1d", in_channels=c_in, out_channels=c_out, kernel=kernel,
                stride=stride, groups=groups)


def act(channels, name="elu") -> dict:
    return dict(kind="activation", in_channels=channels, out_channels=channels, activation=name)


def linear(c_in, c_out) -> dict:
    return dict(kind="linear", in_channels=c_in, out_channels=c_out)


def residual(channels, *layers) -> dict:
    return dict(kind="residual_block", in_channels=channels, out_channels=channels, layers=list(layers))


def layer_spec(**fields) -> LayerSpec:
    return LayerSpec.model_validate(fields)


def small_descriptor(
    strides=(2, 3), channels=4, dim=4, num_layers=6, lookahead=0, projection="learned"
) -> ModelDescriptor:
    """Tiny encoder/decoder pair with hop = prod(strides)."""
    hop = int(np.prod(strides))
    encoder = [conv(1, channels, kernel=3, lookahead=lookahead), act(channels)]
    encoder.append(
        residual(channels, conv(channels, channels, 3), act(channels), conv(channels, channels, 1))
    )
    for s in strides:
        encoder += [conv(channels, channels, kernel=2 * s, stride=s), act(channels)]
    decoder = [conv(channels, channels, kernel=3), act(channels)]
    for s in reversed(strides):
        decoder += [tconv(channels, channels, kernel=2 * s, stride=s), act(channels)]
    decoder += [conv(channels, 1, kernel=3), act(1, "tanh")]
    return ModelDescriptor.model_validate({
        "frame_hop": hop,
        "encoder": encoder,
        "decoder": decoder,
        "rvq": {
            "num_layers": num_layers,
            "dim": dim if projection == "learned" else channels,
            "model_dim": channels,
            "projection": projection,
        },
    })


def framing_descriptor(hop: int = 8, num_layers: int = 2) -> ModelDescriptor:
    """One conv that slices audio into hop-sized frames and one tconv that
    lays them back out; transparent apart from quantization."""
    return ModelDescriptor.model_validate({
        "frame_hop": hop,
        "encoder": [conv(1, hop, kernel=hop, stride=hop, lookahead=hop - 1)],
        "decoder": [tconv(hop, 1, kernel=hop, stride=hop)],
        "rvq": {"num_layers": num_layers, "dim": hop, "model_dim": hop, "projection": "identity"},
    })


def framing_tensors(descriptor: ModelDescriptor, seed: int = 0) -> dict[str, np.ndarray]:
    hop = descriptor.frame_hop
    tensors = init_weights(descriptor, seed=seed)
    tensors["encoder.0.weight"] = np.eye(hop, dtype=np.float32)[:, None, :]
    tensors["decoder.0.weight"] = np.eye(hop, dtype=np.float32)[:, None, :]
    return tensors


def speech_like(seconds: float, sample_rate: int = 24000, seed: int = 0) -> np.ndarray:
    """Voiced harmonic tone with a gliding pitch, syllable envelope and a
    little breath noise."""
    rng = np.random.default_rng(seed)
    t = np.arange(int(seconds * sample_rate)) / sample_rate
    f0 = 140 + 30 * np.sin(2 * np.pi * 0.7 * t)
    phase = 2 * np.pi * np.cumsum(f0) / sample_rate
    voiced = sum(np.sin(k * phase) / k for k in range(1, 12))
    envelope = 0.5 * (1 + np.sin(2 * np.pi * 3.0 * t)) ** 2
    signal = 0.15 * envelope * voiced + 0.01 * rng.standard_normal(t.shape[0])
    return np.clip(signal, -1.0, 1.0)


RATINGS_HEADER = "system,condition,mode,item,rater,rating,correct,validation_ok,attention_ok,hearing_ok"


def rating_row(system, condition, mode, item, rater, rating="", correct="", attention="1") -> str:
    return f"{system},{condition},{mode},{item},{rater},{rating},{correct},1,{attention},1"


def track_two_rows(system: str = "sysA") -> list[str]:
    """Responses whose Track 2 final score is 61.25.

    Raw scores: 2a 60/75, 2b 2.8/3.4, 2c 2.6/3.2, 2d 80 (ULB), 2e 60 (LB).
    """
    rated = {
        ("2a", "ulb"): {"i1": [50, 70], "i2": [60]},
        ("2a", "lb"): {"i1": [75], "i2": [75]},
        ("2b", "ulb"): {"i1": [2, 3], "i2": [3.1]},
        ("2b", "lb"): {"i1": [3, 4], "i2": [3.3]},
        ("2c", "ulb"): {"i1": [2, 3], "i2": [2.7]},
        ("2c", "lb"): {"i1": [3, 3], "i2": [3.4]},
    }
    rows = []
    for (condition, mode), items in rated.items():
        for item, ratings in items.items():
            for k, rating in enumerate(ratings):
                rows.append(rating_row(system, condition, mode, item, f"r{k}", rating=rating))
    for condition, mode, right in (("2d", "ulb", 9), ("2e", "lb", 8)):
        for item in ("d1", "d2"):
            for k in range(10):
                correct = "1" if k < right else "0"
                rows.append(rating_row(system, condition, mode, item, f"r{k}", correct=correct))
    return rows


def ratings_text(rows: list[str], header: str = RATINGS_HEADER) -> str:
    return "\n".join([header, *rows]) + "\n"
