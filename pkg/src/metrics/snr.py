import math

import numpy as np

from src.audio import AudioBuffer

from .mel import MetricsError, _check_pair


def snr_db(ref: AudioBuffer, test: AudioBuffer) -> float:
    """Signal-to-noise ratio in dB; ``math.inf`` when the signals match."""
    _check_pair(ref, test)
    x = ref.samples.astype(np.float64)
    signal = float(np.sum(x ** 2))
    if signal == 0.0:
        raise MetricsError("reference signal is all zeros")
    noise = float(np.sum((x - test.samples.astype(np.float64)) ** 2))
    if noise == 0.0:
        return math.inf
    return 10.0 * math.log10(signal / noise)
