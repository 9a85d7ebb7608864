"""scikit-learn transformers that turn events into flattened feature vectors."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ..exceptions import InputError
from .accel import AccelFeatureConfig, accel_feature_array
from .audio import AudioFeatureConfig, audio_feature_array


def _channel(events, attr):
    out = []
    for ev in events:
        sig = getattr(ev, attr, None)
        out.append(np.asarray(sig.samples if sig is not None else ev, dtype=np.float64))
    return out


class _EventFeatures(TransformerMixin, BaseEstimator):
    _channel_attr = ""
    modality = ""

    def fit(self, X=None, y=None):
        self.config_ = self._config()
        self.n_features_out_ = int(np.prod(self.config_.shape))
        return self

    def transform_matrices(self, X):
        """Return a ``(n_events, rows, cols)`` array of feature matrices."""
        cfg = getattr(self, "config_", None) or self._config()
        signals = _channel(X, self._channel_attr)
        if not signals:
            return np.empty((0,) + cfg.shape)
        return np.stack([self._array(s, cfg) for s in signals])

    def transform(self, X):
        """Flatten each event's matrix row-major into one vector."""
        mats = self.transform_matrices(X)
        return mats.reshape(len(mats), -1)

    def get_feature_names_out(self, input_features=None):
        rows, cols = self._config().shape
        return np.array([f"{self.modality}_f{r}_c{c}" for r in range(rows) for c in range(cols)], dtype=object)


class AccelFeatures(_EventFeatures):
    """Accelerometer feature extractor.

    Parameters
    ----------
    frame_len : int
        Frame length in samples (power of two).
    n_segments : int
        Number of frames per event.
    """

    _channel_attr = "accel"
    modality = "accel"

    def __init__(self, frame_len=32, n_segments=10):
        self.frame_len = frame_len
        self.n_segments = n_segments

    def _config(self):
        return AccelFeatureConfig(frame_len=self.frame_len, n_segments=self.n_segments)

    @staticmethod
    def _array(samples, cfg):
        return accel_feature_array(samples, cfg)


class AudioFeatures(_EventFeatures):
    """Audio feature extractor (MFCC, deltas, ZCR, kurtosis per frame)."""

    _channel_attr = "audio"
    modality = "audio"

    def __init__(self, n_mfcc=26, frame_len=1024, n_segments=100, n_mels=None,
                 preemphasis=0.97):
        self.n_mfcc = n_mfcc
        self.frame_len = frame_len
        self.n_segments = n_segments
        self.n_mels = n_mels
        self.preemphasis = preemphasis

    def _config(self):
        return AudioFeatureConfig(n_mfcc=self.n_mfcc, frame_len=self.frame_len,
                                  n_segments=self.n_segments, n_mels=self.n_mels,
                                  preemphasis=self.preemphasis)

    @staticmethod
    def _array(samples, cfg):
        return audio_feature_array(samples, cfg)


def make_extractor(modality, **params):
    if modality == "accel":
        return AccelFeatures(**params)
    if modality == "audio":
        return AudioFeatures(**params)
    raise InputError(f"unknown modality {modality!r}")
