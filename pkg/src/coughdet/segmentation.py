"""Offline energy-threshold event detection on paired channels.

Activity in either channel opens an event. Each channel is thresholded
against a multiple of its own median short-time energy, so the detector
does not depend on the sensor's absolute scale.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError, InputError


@dataclass(frozen=True)
class SegmenterConfig:
    window_s: float = 0.1
    hop_s: float = 0.05
    threshold_factor: float = 4.0
    merge_gap_s: float = 0.3
    min_event_s: float = 0.3

    def __post_init__(self):
        if not self.hop_s > 0:
            raise ConfigError("hop_s must be positive")
        if self.window_s < self.hop_s:
            raise ConfigError("window_s must be at least hop_s")
        if not self.threshold_factor > 0:
            raise ConfigError("threshold_factor must be positive")
        if not self.min_event_s > 0:
            raise ConfigError("min_event_s must be positive")
        if self.merge_gap_s < 0:
            raise ConfigError("merge_gap_s must be non-negative")


def _samples_and_rate(signal):
    return np.asarray(signal.samples, dtype=np.float64), signal.sample_rate


def _window_geometry(n, rate, window_s, hop_s):
    win = max(1, int(round(window_s * rate)))
    hop = max(1, int(round(hop_s * rate)))
    if win > n:
        raise InputError(f"window of {win} samples is longer than the {n}-sample signal")
    count = (n - win) // hop + 1
    return win, hop, count


def short_time_energy(signal, window_s=0.1, hop_s=0.05):
    """Mean squared amplitude in sliding windows.

    Returns ``(times, energy)`` where ``times`` holds window centres in
    seconds.
    """
    x, rate = _samples_and_rate(signal)
    win, hop, count = _window_geometry(len(x), rate, window_s, hop_s)
    starts = np.arange(count) * hop
    windows = np.lib.stride_tricks.sliding_window_view(x * x, win)[starts]
    energy = windows.mean(axis=1)
    times = (starts + win / 2.0) / rate
    return times, energy


def _active_spans(signal, cfg):
    x, rate = _samples_and_rate(signal)
    win, hop, _ = _window_geometry(len(x), rate, cfg.window_s, cfg.hop_s)
    times, energy = short_time_energy(signal, cfg.window_s, cfg.hop_s)
    threshold = cfg.threshold_factor * np.median(energy)
    active = energy > threshold
    starts = times - win / (2.0 * rate)
    ends = starts + win / rate
    spans = []
    for s, e, on in zip(starts, ends, active):
        if not on:
            continue
        if spans and s <= spans[-1][1]:
            spans[-1][1] = max(spans[-1][1], e)
        else:
            spans.append([s, e])
    return [tuple(sp) for sp in spans]


def merge_intervals(intervals, gap=0.0):
    """Union sorted intervals, joining those separated by less than ``gap``."""
    merged = []
    for s, e in sorted(intervals):
        if merged and s - merged[-1][1] < gap:
            merged[-1][1] = max(merged[-1][1], e)
        else:
            merged.append([s, e])
    return [(float(s), float(e)) for s, e in merged]


def detect_events(accel, audio, cfg=None):
    """Detect activity intervals ``(start_s, end_s)`` in either channel."""
    cfg = cfg or SegmenterConfig()
    if len(accel.samples) == 0 or len(audio.samples) == 0:
        raise InputError("cannot detect events in an empty signal")
    spans = _active_spans(accel, cfg) + _active_spans(audio, cfg)
    merged = merge_intervals(spans, cfg.merge_gap_s)
    return [(s, e) for s, e in merged if e - s >= cfg.min_event_s]


def interval_iou(a, b):
    inter = max(0.0, min(a[1], b[1]) - max(a[0], b[0]))
    union = (a[1] - a[0]) + (b[1] - b[0]) - inter
    return inter / union if union > 0 else 0.0


def recovery_rate(planted, detected, min_iou=0.5):
    """Fraction of planted intervals matched by some detection at ``min_iou``."""
    if not planted:
        return 1.0
    hits = sum(any(interval_iou(p, d) >= min_iou for d in detected) for p in planted)
    return hits / len(planted)
