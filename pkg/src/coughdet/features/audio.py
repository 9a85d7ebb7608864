"""Audio features: MFCCs with velocity and acceleration, zero-crossing rate
and kurtosis for each of a fixed number of overlapping frames.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.fft import dct

from ..exceptions import ConfigError, InputError
from ..signals import AUDIO_RATE
from .framing import frames, kurtosis
from .matrix import FeatureMatrix

MFCC_COUNTS = (13, 26, 39, 52, 65)
AUDIO_FRAME_LENGTHS = (256, 512, 1024, 2048, 4096)
AUDIO_SEGMENTS = (50, 70, 100, 120, 150)


@dataclass(frozen=True)
class AudioFeatureConfig:
    """Audio feature settings.

    ``n_mels`` defaults to ``max(n_mfcc, 40)``. Frames shorter than
    ``min_fft`` are zero-padded to that FFT size so that the narrow
    low-frequency mel filters still cover at least one FFT bin.
    """

    n_mfcc: int = 26
    frame_len: int = 1024
    n_segments: int = 100
    n_mels: int | None = None
    fmin: float = 0.0
    fmax: float = AUDIO_RATE / 2
    preemphasis: float = 0.97
    log_floor: float = 1e-10
    min_fft: int = 512
    delta_width: int = 2

    def __post_init__(self):
        if self.n_mels is None:
            object.__setattr__(self, "n_mels", max(self.n_mfcc, 40))
        if self.frame_len < 2 or self.frame_len & (self.frame_len - 1):
            raise ConfigError(f"frame_len must be a power of two, got {self.frame_len}")
        if self.n_mfcc < 1 or self.n_mfcc > self.n_mels:
            raise ConfigError(f"n_mfcc={self.n_mfcc} must be between 1 and n_mels={self.n_mels}")
        if self.n_segments < 2:
            raise ConfigError(f"n_segments must be at least 2, got {self.n_segments}")
        if not 0 <= self.fmin < self.fmax <= AUDIO_RATE / 2:
            raise ConfigError(f"need 0 <= fmin < fmax <= {AUDIO_RATE / 2}")
        if self.delta_width < 1:
            raise ConfigError("delta_width must be at least 1")

    @property
    def n_fft(self):
        return max(self.frame_len, self.min_fft)

    @property
    def n_columns(self):
        return 3 * self.n_mfcc + 2

    @property
    def shape(self):
        return (self.n_segments, self.n_columns)


def hz_to_mel(f):
    """Mel value of a frequency in Hz.

    >>> round(float(hz_to_mel(700.0)), 1)
    781.2
    """
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_filters, n_fft, sample_rate=AUDIO_RATE, fmin=0.0, fmax=None):
    """Triangular filters with centres equally spaced on the mel scale.

    Returns an ``(n_filters, n_fft // 2 + 1)`` matrix. Each filter rises
    from its lower neighbour's centre to 1 at its own centre and falls to
    zero at its upper neighbour's centre, evaluated at the FFT bin
    frequencies.
    """
    fmax = sample_rate / 2 if fmax is None else fmax
    if not 0 <= fmin < fmax <= sample_rate / 2:
        raise ConfigError(f"need 0 <= fmin < fmax <= {sample_rate / 2}, got {fmin}, {fmax}")
    edges = mel_to_hz(np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_filters + 2))
    bins = np.arange(n_fft // 2 + 1) * sample_rate / n_fft
    lo, mid, hi = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    rising = (bins[None, :] - lo) / (mid - lo)
    falling = (hi - bins[None, :]) / (hi - mid)
    fb = np.maximum(0.0, np.minimum(rising, falling))
    empty = np.flatnonzero(fb.sum(axis=1) == 0)
    if empty.size:
        raise ConfigError(
            f"{n_filters} mel filters are too many for a {n_fft}-point FFT: "
            f"filter(s) {empty.tolist()} cover no frequency bin"
        )
    return fb


@lru_cache(maxsize=32)
def _cached_filterbank(n_filters, n_fft, fmin, fmax):
    fb = mel_filterbank(n_filters, n_fft, AUDIO_RATE, fmin, fmax)
    fb.setflags(write=False)
    return fb


@lru_cache(maxsize=32)
def _cached_window(n):
    w = np.hamming(n)
    w.setflags(write=False)
    return w


def mfcc_frames(fr, cfg):
    """MFCCs for each row of a 2-D frame array."""
    fr = np.atleast_2d(np.asarray(fr, dtype=np.float64))
    if fr.shape[1] != cfg.frame_len:
        raise InputError(f"frames have {fr.shape[1]} samples, expected {cfg.frame_len}")
    emph = fr.copy()
    emph[:, 1:] -= cfg.preemphasis * fr[:, :-1]
    emph *= _cached_window(cfg.frame_len)
    power = np.abs(np.fft.rfft(emph, n=cfg.n_fft, axis=1)) ** 2
    fb = _cached_filterbank(cfg.n_mels, cfg.n_fft, cfg.fmin, cfg.fmax)
    log_energy = np.log(np.maximum(power @ fb.T, cfg.log_floor))
    return dct(log_energy, type=2, norm="ortho", axis=1)[:, :cfg.n_mfcc]


def mfcc_frame(frame, cfg=None):
    """Pre-emphasis, Hamming window, power spectrum, log mel energies, DCT-II."""
    cfg = cfg or AudioFeatureConfig()
    return mfcc_frames(np.asarray(frame)[None, :], cfg)[0]


def deltas(seq, width=2):
    """Regression deltas along axis 0 with edge rows replicated."""
    seq = np.asarray(seq, dtype=np.float64)
    if seq.shape[0] < 2:
        raise InputError("need at least two rows to compute deltas")
    n = seq.shape[0]
    padded = np.concatenate([np.repeat(seq[:1], width, axis=0), seq, np.repeat(seq[-1:], width, axis=0)])
    out = np.zeros_like(seq)
    for k in range(1, width + 1):
        out += k * (padded[width + k:width + k + n] - padded[width - k:width - k + n])
    return out / (2.0 * sum(k * k for k in range(1, width + 1)))


def zcr(frame, axis=-1):
    """Fraction of adjacent sample pairs that change sign; zero counts as positive."""
    x = np.asarray(frame, dtype=np.float64)
    positive = x >= 0
    flips = np.count_nonzero(np.diff(positive, axis=axis), axis=axis)
    return flips / (x.shape[axis] - 1)


def _samples(event):
    return event.audio.samples if hasattr(event, "audio") else np.asarray(event, dtype=np.float64)


def audio_feature_array(samples, cfg):
    fr = frames(samples, cfg.frame_len, cfg.n_segments)
    c = mfcc_frames(fr, cfg)
    d = deltas(c, cfg.delta_width)
    dd = deltas(d, cfg.delta_width)
    return np.hstack([c, d, dd, zcr(fr)[:, None], kurtosis(fr)[:, None]])


def extract_audio_features(event, cfg=None):
    """Feature matrix of shape ``(n_segments, 3 * n_mfcc + 2)``.

    Columns per frame: MFCCs, their deltas, delta-deltas, ZCR, kurtosis.
    """
    cfg = cfg or AudioFeatureConfig()
    return FeatureMatrix(audio_feature_array(_samples(event), cfg), "audio")
