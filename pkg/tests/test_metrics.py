import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.audio import AudioBuffer
from src.metrics import MelLossConfig, MetricsError, multiscale_mel_loss, snr_db

from builders import speech_like


def buffer(samples, sample_rate=24000) -> AudioBuffer:
    return AudioBuffer(np.asarray(samples), sample_rate)


def hz_to_mel(f):
    f = np.asarray(f, dtype=np.float64)
    linear = f / (200.0 / 3)
    log_part = 15.0 + np.log(np.maximum(f, 1e-10) / 1000.0) / (np.log(6.4) / 27.0)
    return np.where(f >= 1000.0, log_part, linear)


def mel_to_hz(m):
    m = np.asarray(m, dtype=np.float64)
    linear = m * (200.0 / 3)
    log_part = 1000.0 * np.exp((np.log(6.4) / 27.0) * (m - 15.0))
    return np.where(m >= 15.0, log_part, linear)


def slaney_filterbank(sr, n_fft, n_mels, fmin, fmax):
    freqs = np.linspace(0, sr / 2, n_fft // 2 + 1)
    edges = mel_to_hz(np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_mels + 2))
    fb = np.zeros((n_mels, freqs.shape[0]))
    for i in range(n_mels):
        lo, mid, hi = edges[i], edges[i + 1], edges[i + 2]
        rising = (freqs - lo) / (mid - lo)
        falling = (hi - freqs) / (hi - mid)
        fb[i] = np.maximum(0.0, np.minimum(rising, falling)) * 2.0 / (hi - lo)
    return fb


def direct_dft_log_mel(x, sr, n_fft, n_mels, cfg):
    if x.shape[0] < n_fft:
        x = np.concatenate([x, np.zeros(n_fft - x.shape[0])])
    hop = n_fft // 4
    n = np.arange(n_fft)
    window = 0.5 - 0.5 * np.cos(2 * np.pi * n / n_fft)
    basis = np.exp(-2j * np.pi * np.outer(np.arange(n_fft // 2 + 1), n) / n_fft)
    starts = range(0, x.shape[0] - n_fft + 1, hop)
    magnitude = np.stack([np.abs(basis @ (window * x[s:s + n_fft])) for s in starts], axis=1)
    mel = slaney_filterbank(sr, n_fft, n_mels, cfg.fmin, cfg.fmax) @ magnitude
    return np.log(np.maximum(mel, cfg.log_floor))


class TestMelLoss:
    def test_identical_signals(self):
        x = buffer(speech_like(0.5))
        assert multiscale_mel_loss(x, x) == 0.0

    def test_symmetric(self):
        a = buffer(speech_like(0.5, seed=1))
        b = buffer(0.5 * speech_like(0.5, seed=2))
        assert multiscale_mel_loss(a, b) == pytest.approx(multiscale_mel_loss(b, a), rel=1e-12)
        assert multiscale_mel_loss(a, b) > 0.0

    def test_matches_direct_dft_oracle(self):
        rng = np.random.default_rng(0)
        noise = buffer(rng.standard_normal(1024))
        silence = buffer(np.zeros(1024))
        cfg = MelLossConfig()

        expected = np.mean([
            np.mean(np.abs(
                direct_dft_log_mel(noise.samples.astype(np.float64), 24000, n_fft, n_mels, cfg)
                - direct_dft_log_mel(np.zeros(1024), 24000, n_fft, n_mels, cfg)
            ))
            for n_fft, n_mels in zip(cfg.fft_sizes, cfg.mel_bins)
        ])
        assert multiscale_mel_loss(noise, silence, cfg) == pytest.approx(expected, rel=1e-4)

    def test_invariant_to_shared_time_shift(self):
        rng = np.random.default_rng(8)
        ref = speech_like(0.2, seed=2)
        test = ref + 0.05 * rng.standard_normal(ref.shape[0])

        def placed(core, offset, length=12288):
            canvas = np.zeros(length)
            canvas[offset:offset + core.shape[0]] = core
            return buffer(canvas)

        # offsets differ by a multiple of every hop (128, 256, 512) and keep
        # every window that overlaps the signal inside the canvas
        early = multiscale_mel_loss(placed(ref, 2048), placed(test, 2048))
        late = multiscale_mel_loss(placed(ref, 3584), placed(test, 3584))
        assert early > 0.0
        assert late == pytest.approx(early, rel=1e-9)

    def test_short_signals_are_padded(self):
        a = buffer(speech_like(0.01))
        b = buffer(np.zeros(240))
        assert np.isfinite(multiscale_mel_loss(a, b))

    def test_length_mismatch(self):
        with pytest.raises(MetricsError, match="lengths differ"):
            multiscale_mel_loss(buffer(np.zeros(100)), buffer(np.zeros(101)))

    def test_rate_mismatch(self):
        with pytest.raises(MetricsError, match="sample rates differ"):
            multiscale_mel_loss(buffer(np.zeros(100)), buffer(np.zeros(100), 16000))

    def test_fmax_above_nyquist(self):
        x = buffer(np.zeros(4096), 16000)
        with pytest.raises(MetricsError, match="Nyquist"):
            multiscale_mel_loss(x, x)

    def test_config_validation(self):
        with pytest.raises(ValidationError, match="mel_bins"):
            MelLossConfig(fft_sizes=(512, 1024), mel_bins=(40,))
        with pytest.raises(ValidationError, match="fmin"):
            MelLossConfig(fmin=8000.0, fmax=4000.0)


class TestSnr:
    def test_identical_is_infinite(self):
        x = buffer(speech_like(0.1))
        assert snr_db(x, x) == math.inf

    def test_silent_test_signal(self):
        assert snr_db(buffer(speech_like(0.1)), buffer(np.zeros(2400))) == pytest.approx(0.0)

    def test_hand_computed(self):
        assert snr_db(buffer([1.0, 0.0]), buffer([0.9, 0.0])) == pytest.approx(20.0, abs=1e-4)

    def test_zero_reference(self):
        with pytest.raises(MetricsError, match="all zeros"):
            snr_db(buffer(np.zeros(4)), buffer(np.ones(4)))
