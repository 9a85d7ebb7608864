"""Accelerometer features: power spectrum, RMS, kurtosis, moving average
and crest factor for each of a fixed number of overlapping frames.
"""

from dataclasses import dataclass

import numpy as np

from ..exceptions import ConfigError, InputError
from .framing import crest_factor, frames, kurtosis, moving_average, rms
from .matrix import FeatureMatrix

ACCEL_FRAME_LENGTHS = (16, 32, 64)
ACCEL_SEGMENTS = (5, 10)


def _is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class AccelFeatureConfig:
    frame_len: int = 32
    n_segments: int = 10

    def __post_init__(self):
        if not _is_power_of_two(self.frame_len):
            raise ConfigError(f"frame_len must be a power of two, got {self.frame_len}")
        if self.n_segments < 2:
            raise ConfigError(f"n_segments must be at least 2, got {self.n_segments}")

    @property
    def n_columns(self):
        return self.frame_len // 2 + 5

    @property
    def shape(self):
        return (self.n_segments, self.n_columns)


def power_spectrum(frame):
    """One-sided power ``|DFT(frame)[k]|**2`` for ``k = 0 .. n/2`` (unnormalised)."""
    frame = np.asarray(frame, dtype=np.float64)
    n = frame.shape[-1]
    if not _is_power_of_two(n):
        raise InputError(f"frame length must be a power of two, got {n}")
    return np.abs(np.fft.rfft(frame, axis=-1)) ** 2


def _samples(event):
    return event.accel.samples if hasattr(event, "accel") else np.asarray(event, dtype=np.float64)


def accel_feature_array(samples, cfg):
    fr = frames(samples, cfg.frame_len, cfg.n_segments)
    stats = np.column_stack([rms(fr), kurtosis(fr), moving_average(fr), crest_factor(fr)])
    return np.hstack([power_spectrum(fr), stats])


def extract_accel_features(event, cfg=None):
    """Feature matrix of shape ``(n_segments, frame_len/2 + 5)``.

    ``event`` may be an :class:`~coughdet.signals.Event` or a 1-D array of
    magnitudes. No de-noising or windowing is applied.
    """
    cfg = cfg or AccelFeatureConfig()
    return FeatureMatrix(accel_feature_array(_samples(event), cfg), "accel")
