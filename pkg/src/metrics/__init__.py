from .mel import MelLossConfig, MetricsError, log_mel, multiscale_mel_loss
from .snr import snr_db

__all__ = ["MelLossConfig", "MetricsError", "log_mel", "multiscale_mel_loss", "snr_db"]
