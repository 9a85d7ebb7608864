"""Signal and event containers, on-disk formats and the manifest.

Audio is stored as RIFF/WAVE mono PCM16 at 22 050 Hz and normalised to
[-1, 1) by dividing by 32768 on load. Accelerometer magnitudes are stored
as UTF-8 text, one decimal per line, at an implicit 100 Hz.
"""

import io
import json
import logging
import wave
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._io import atomic_write_bytes, atomic_write_text
from .exceptions import InputError, LoadError

logger = logging.getLogger(__name__)

ACCEL_RATE = 100
AUDIO_RATE = 22050
LABELS = ("cough", "non_cough")

# Smallest analysis frames in the feature grids; shorter events cannot be featurised.
MIN_ACCEL_SAMPLES = 16
MIN_AUDIO_SAMPLES = 256

_PCM_SCALE = 32768.0


def _frozen_array(samples, name):
    arr = np.array(samples, dtype=np.float64)
    if arr.ndim != 1:
        raise InputError(f"{name} samples must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} samples contain non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class AccelSignal:
    """Accelerometer vector magnitude sampled at 100 Hz."""

    samples: np.ndarray
    sample_rate: int = ACCEL_RATE

    def __post_init__(self):
        if self.sample_rate != ACCEL_RATE:
            raise InputError(f"accelerometer sample rate must be {ACCEL_RATE}, got {self.sample_rate}")
        object.__setattr__(self, "samples", _frozen_array(self.samples, "accelerometer"))

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self):
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class AudioSignal:
    """Mono audio in [-1, 1] sampled at 22 050 Hz."""

    samples: np.ndarray
    sample_rate: int = AUDIO_RATE

    def __post_init__(self):
        if self.sample_rate != AUDIO_RATE:
            raise InputError(f"audio sample rate must be {AUDIO_RATE}, got {self.sample_rate}")
        arr = _frozen_array(self.samples, "audio")
        if arr.size and np.max(np.abs(arr)) > 1.0:
            raise InputError("audio samples must lie within [-1, 1]")
        object.__setattr__(self, "samples", arr)

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self):
        return len(self.samples) / self.sample_rate


def label_to_int(label):
    """Map ``"cough"`` to 1 and ``"non_cough"`` to 0."""
    if label not in LABELS:
        raise InputError(f"label must be one of {LABELS}, got {label!r}")
    return 1 if label == "cough" else 0


def _check_length(n, duration, rate, name):
    expected = round(duration * rate)
    if abs(n - expected) > 1:
        raise InputError(
            f"{name} has {n} samples but a {duration:.4f} s event needs {expected} +/- 1"
        )


@dataclass(frozen=True)
class Event:
    """A labelled interval holding paired accelerometer and audio segments."""

    patient_id: str
    start_time: float
    end_time: float
    label: str
    accel: AccelSignal
    audio: AudioSignal
    event_id: str = ""

    def __post_init__(self):
        if not self.end_time > self.start_time:
            raise InputError(f"event end {self.end_time} must exceed start {self.start_time}")
        label_to_int(self.label)
        _check_length(len(self.accel), self.duration, ACCEL_RATE, "accelerometer segment")
        _check_length(len(self.audio), self.duration, AUDIO_RATE, "audio segment")

    @property
    def duration(self):
        return self.end_time - self.start_time

    @property
    def y(self):
        return label_to_int(self.label)


def magnitude(x, y, z):
    """Vector magnitude of a tri-axial accelerometer recording.

    >>> magnitude([3], [4], [0]).samples.tolist()
    [5.0]
    """
    x, y, z = (np.asarray(a, dtype=np.float64) for a in (x, y, z))
    if not (x.shape == y.shape == z.shape) or x.ndim != 1:
        raise InputError(f"axis lengths differ: {x.shape}, {y.shape}, {z.shape}")
    return AccelSignal(np.sqrt(x * x + y * y + z * z))


# --------------------------------------------------------------------------
# file formats


def write_wav(path, samples):
    """Write audio in [-1, 1] as 22 050 Hz mono PCM16."""
    samples = np.asarray(samples, dtype=np.float64)
    pcm = np.clip(np.round(samples * _PCM_SCALE), -32768, 32767).astype("<i2")
    buf = io.BytesIO()
    with wave.open(buf, "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(AUDIO_RATE)
        wf.writeframes(pcm.tobytes())
    atomic_write_bytes(path, buf.getvalue())


def read_wav(path):
    path = Path(path)
    if not path.exists():
        raise LoadError(path, "audio file does not exist")
    try:
        with wave.open(str(path), "rb") as wf:
            channels, width, rate = wf.getnchannels(), wf.getsampwidth(), wf.getframerate()
            frames = wf.readframes(wf.getnframes())
    except (wave.Error, EOFError) as exc:
        raise LoadError(path, f"malformed WAVE header ({exc})") from exc
    if channels != 1:
        raise LoadError(path, f"expected mono audio, got {channels} channels")
    if width != 2:
        raise LoadError(path, f"expected 16-bit PCM, got {8 * width}-bit samples")
    if rate != AUDIO_RATE:
        raise LoadError(path, f"sample rate {rate} Hz does not match required {AUDIO_RATE} Hz")
    pcm = np.frombuffer(frames, dtype="<i2")
    if pcm.size == 0:
        raise LoadError(path, "audio file contains no samples")
    return AudioSignal(pcm.astype(np.float64) / _PCM_SCALE)


def write_accel_text(path, samples):
    # repr() gives the shortest string that round-trips exactly
    lines = "".join(f"{float(v)!r}\n" for v in np.asarray(samples, dtype=np.float64))
    atomic_write_text(path, lines)


def read_accel_text(path):
    path = Path(path)
    if not path.exists():
        raise LoadError(path, "accelerometer file does not exist")
    try:
        text = path.read_text(encoding="utf-8")
        values = [float(line) for line in text.split()]
    except (UnicodeDecodeError, ValueError) as exc:
        raise LoadError(path, f"malformed accelerometer text ({exc})") from exc
    if not values:
        raise LoadError(path, "accelerometer file contains no samples")
    try:
        return AccelSignal(values)
    except InputError as exc:
        raise LoadError(path, str(exc)) from exc


# --------------------------------------------------------------------------
# manifest


@dataclass(frozen=True)
class ManifestRecord:
    patient_id: str
    label: str
    accel_path: Path
    audio_path: Path
    start_s: float
    end_s: float
    event_id: str = ""
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        label_to_int(self.label)
        if not self.end_s > self.start_s:
            raise InputError(f"record {self.event_id or self.audio_path}: non-positive duration")
        if not self.event_id:
            object.__setattr__(self, "event_id", f"{self.patient_id}_{Path(self.audio_path).stem}")

    @property
    def duration(self):
        return self.end_s - self.start_s


_REQUIRED_KEYS = ("patient_id", "label", "accel_path", "audio_path", "start_s", "end_s")


def read_manifest(path, check_files=True):
    """Parse a JSON-lines manifest; relative paths resolve against its directory."""
    path = Path(path)
    if not path.exists():
        raise LoadError(path, "manifest does not exist")
    base = path.parent
    records = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise LoadError(path, f"line {lineno}: invalid JSON ({exc})") from exc
        missing = [k for k in _REQUIRED_KEYS if k not in obj]
        if missing:
            raise LoadError(path, f"line {lineno}: missing keys {missing}")
        try:
            rec = ManifestRecord(
                patient_id=str(obj["patient_id"]),
                label=obj["label"],
                accel_path=base / obj["accel_path"],
                audio_path=base / obj["audio_path"],
                start_s=float(obj["start_s"]),
                end_s=float(obj["end_s"]),
                event_id=str(obj.get("event_id", "")),
                extra={k: v for k, v in obj.items() if k not in _REQUIRED_KEYS and k != "event_id"},
            )
        except InputError as exc:
            raise LoadError(path, f"line {lineno}: {exc}") from exc
        if check_files:
            for p in (rec.accel_path, rec.audio_path):
                if not p.exists():
                    raise LoadError(p, f"referenced from {path} line {lineno} but missing")
        records.append(rec)
    ids = [r.event_id for r in records]
    if len(set(ids)) != len(ids):
        raise LoadError(path, "duplicate event ids")
    return records


def write_manifest(records, path):
    path = Path(path)
    base = path.parent.resolve()
    lines = []
    for r in records:
        obj = {
            "patient_id": r.patient_id,
            "label": r.label,
            "accel_path": Path(r.accel_path).resolve().relative_to(base).as_posix(),
            "audio_path": Path(r.audio_path).resolve().relative_to(base).as_posix(),
            "start_s": r.start_s,
            "end_s": r.end_s,
            "event_id": r.event_id,
        }
        lines.append(json.dumps(obj, sort_keys=True))
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_event(record, min_accel_samples=MIN_ACCEL_SAMPLES, min_audio_samples=MIN_AUDIO_SAMPLES):
    """Read both channels of a manifest record into an :class:`Event`."""
    accel = read_accel_text(record.accel_path)
    audio = read_wav(record.audio_path)
    dur = record.duration
    for sig, rate, p in ((accel, ACCEL_RATE, record.accel_path), (audio, AUDIO_RATE, record.audio_path)):
        expected = round(dur * rate)
        if abs(len(sig) - expected) > 1:
            raise LoadError(p, f"{len(sig)} samples inconsistent with {dur:.4f} s duration ({expected} expected)")
    if len(accel) < min_accel_samples:
        raise LoadError(record.accel_path, f"event shorter than one {min_accel_samples}-sample frame")
    if len(audio) < min_audio_samples:
        raise LoadError(record.audio_path, f"event shorter than one {min_audio_samples}-sample frame")
    return Event(
        patient_id=record.patient_id,
        start_time=record.start_s,
        end_time=record.end_s,
        label=record.label,
        accel=accel,
        audio=audio,
        event_id=record.event_id,
    )


def save_event(event, accel_path, audio_path):
    """Write an event's channels and return the matching manifest record."""
    write_accel_text(accel_path, event.accel.samples)
    write_wav(audio_path, event.audio.samples)
    return ManifestRecord(
        patient_id=event.patient_id,
        label=event.label,
        accel_path=Path(accel_path),
        audio_path=Path(audio_path),
        start_s=event.start_time,
        end_s=event.end_time,
        event_id=event.event_id,
    )


def load_events(records, **kwargs):
    return [load_event(r, **kwargs) for r in records]
