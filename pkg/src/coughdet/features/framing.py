"""Fixed-count framing and the per-frame statistics shared by both modalities."""

import math

import numpy as np

from ..exceptions import ConfigError, InputError


def frame_skip(event_len, n_frames):
    """Samples between successive frame starts: ``ceil(event_len / n_frames)``.

    >>> frame_skip(26460, 100)
    265
    """
    return math.ceil(event_len / n_frames)


def frame_positions(event_len, frame_len, n_frames):
    """Start indices of ``n_frames`` frames spread uniformly over an event.

    Starts are multiples of :func:`frame_skip`; frames that would run past
    the end of the event are shifted left so that every frame lies fully
    inside it. This overlaps frames instead of padding the event.
    """
    if n_frames < 2:
        raise ConfigError(f"need at least 2 frames, got {n_frames}")
    if frame_len < 1:
        raise ConfigError(f"frame length must be positive, got {frame_len}")
    if event_len < frame_len:
        raise InputError(f"event of {event_len} samples is shorter than one {frame_len}-sample frame")
    skip = frame_skip(event_len, n_frames)
    starts = np.arange(n_frames, dtype=np.int64) * skip
    return np.minimum(starts, event_len - frame_len)


def frames(x, frame_len, n_frames):
    """Stack the frames selected by :func:`frame_positions` into a 2-D array."""
    x = np.asarray(x, dtype=np.float64)
    starts = frame_positions(len(x), frame_len, n_frames)
    return x[starts[:, None] + np.arange(frame_len)[None, :]]


def rms(frame, axis=-1):
    frame = np.asarray(frame, dtype=np.float64)
    return np.sqrt(np.mean(frame * frame, axis=axis))


def moving_average(frame, axis=-1):
    """Mean over the whole frame; one smoothed value per frame."""
    return np.mean(np.asarray(frame, dtype=np.float64), axis=axis)


def kurtosis(frame, axis=-1):
    """Pearson (non-excess) kurtosis ``m4 / m2**2``; constant frames give 0."""
    x = np.asarray(frame, dtype=np.float64)
    d = x - x.mean(axis=axis, keepdims=True)
    m2 = np.mean(d * d, axis=axis)
    m4 = np.mean(d ** 4, axis=axis)
    constant = np.ptp(x, axis=axis) == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        k = m4 / (m2 * m2)
    return np.where(constant | ~np.isfinite(k), 0.0, k)


def crest_factor(frame, axis=-1):
    """Peak absolute amplitude over RMS; all-zero frames give 0."""
    x = np.asarray(frame, dtype=np.float64)
    peak = np.max(np.abs(x), axis=axis)
    r = rms(x, axis=axis)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = peak / r
    return np.where(r > 0, c, 0.0)
