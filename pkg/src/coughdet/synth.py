"""Deterministic synthetic paired accelerometer/audio events.

The signal models are deliberately simple stand-ins for clinical
recordings:

* cough: one to three short bursts. Audio gets band-limited (300-3000 Hz)
  noise with a sharp attack; the accelerometer gets damped transients at
  a per-patient body-resonance frequency on top of a weak sustained tone.
* non-cough: low-frequency movement on the accelerometer with weak
  broadband audio; some carry a short broadband burst in the audio.

Each patient has its own gains and resonance frequency so that held-out
patients differ from the training population.
"""

import logging
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ._io import atomic_write_json
from .exceptions import ConfigError
from .signals import (
    ACCEL_RATE,
    AUDIO_RATE,
    AccelSignal,
    AudioSignal,
    Event,
    magnitude,
    save_event,
    write_manifest,
)

logger = logging.getLogger(__name__)

ACCEL_NOISE = 0.002
AUDIO_NOISE = 0.001


@dataclass(frozen=True)
class SynthConfig:
    n_patients: int = 14
    coughs_per_patient: int = 50
    noncoughs_per_patient: int = 200
    cough_duration: tuple = (1.90, 0.26)
    noncough_duration: tuple = (1.70, 0.24)
    duration_bounds: tuple = (0.5, 4.0)
    seed: int = 7

    def __post_init__(self):
        if self.n_patients < 1 or self.coughs_per_patient < 1 or self.noncoughs_per_patient < 1:
            raise ConfigError("patient and event counts must be at least 1")
        lo, hi = self.duration_bounds
        if not 0 < lo < hi:
            raise ConfigError("duration bounds must satisfy 0 < low < high")


@dataclass(frozen=True)
class PatientProfile:
    patient_id: str
    accel_gain: float
    audio_gain: float
    resonance_hz: float
    movement_hz: float


def patient_profile(index, rng):
    return PatientProfile(
        patient_id=f"p{index + 1:02d}",
        accel_gain=float(rng.uniform(0.6, 1.6)),
        audio_gain=float(rng.uniform(0.5, 1.5)),
        resonance_hz=float(rng.uniform(10.0, 20.0)),
        movement_hz=float(rng.uniform(0.5, 2.5)),
    )


def truncated_normal(rng, mean, std, lo, hi):
    while True:
        v = rng.normal(mean, std)
        if lo <= v <= hi:
            return float(v)


def band_noise(rng, n, lo_hz, hi_hz, rate=AUDIO_RATE):
    """Unit-RMS noise restricted to ``[lo_hz, hi_hz]`` by FFT masking."""
    spec = np.fft.rfft(rng.normal(size=n))
    f = np.fft.rfftfreq(n, 1.0 / rate)
    spec[(f < lo_hz) | (f > hi_hz)] = 0.0
    x = np.fft.irfft(spec, n)
    r = np.sqrt(np.mean(x * x))
    return x / r if r > 0 else x


def _burst_times(rng, duration, n_bursts):
    span = max(duration - 0.35, 0.05)
    return np.sort(rng.uniform(0.0, span, size=n_bursts))


def _accel_axes(rng, profile, duration, label, bursts):
    n = int(round(duration * ACCEL_RATE))
    t = np.arange(n) / ACCEL_RATE
    xyz = rng.normal(0.0, ACCEL_NOISE, size=(3, n))
    g = profile.accel_gain
    if label == "cough":
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        tone = 0.1 * g * np.sin(2 * np.pi * profile.resonance_hz * t + rng.uniform(0, 2 * np.pi))
        xyz += direction[:, None] * tone
        for tb in bursts:
            amp = g * rng.uniform(0.5, 1.0)
            dt = t - tb
            env = np.where(dt >= 0, np.exp(-np.clip(dt, 0, None) / 0.08), 0.0)
            d = rng.normal(size=3)
            d /= np.linalg.norm(d)
            xyz += d[:, None] * (amp * env * np.sin(2 * np.pi * profile.resonance_hz * dt))
    else:
        for _ in range(int(rng.integers(1, 3))):
            f = profile.movement_hz * rng.uniform(0.5, 1.5)
            d = rng.normal(size=3)
            d /= np.linalg.norm(d)
            amp = g * rng.uniform(0.3, 0.8)
            xyz += d[:, None] * (amp * np.sin(2 * np.pi * f * t + rng.uniform(0, 2 * np.pi)))
        drift = np.cumsum(rng.normal(0.0, 0.01 * g, size=n))
        xyz[rng.integers(0, 3)] += drift
    return xyz


def _audio(rng, profile, duration, label, bursts):
    n = int(round(duration * AUDIO_RATE))
    t = np.arange(n) / AUDIO_RATE
    g = profile.audio_gain
    x = rng.normal(0.0, AUDIO_NOISE, size=n)
    if label == "cough":
        x += 0.02 * g * band_noise(rng, n, 300.0, 3000.0)
        for tb in bursts:
            amp = g * rng.uniform(0.15, 0.3)
            dt = t - tb
            attack = np.clip(dt / 0.005, 0.0, 1.0)
            env = attack * np.exp(-np.clip(dt, 0, None) / rng.uniform(0.08, 0.15))
            x += amp * env * band_noise(rng, n, 300.0, 3000.0)
    else:
        x += g * rng.uniform(0.02, 0.05) * rng.normal(size=n)
        if rng.uniform() < 0.2:
            # sneeze / throat-clear style broadband burst
            tb = rng.uniform(0.0, max(duration - 0.3, 0.05))
            dt = t - tb
            env = np.clip(dt / 0.01, 0.0, 1.0) * np.exp(-np.clip(dt, 0, None) / 0.05)
            x += g * rng.uniform(0.05, 0.15) * env * rng.normal(size=n)
    return np.clip(x, -1.0, 1.0 - 1.0 / 32768)


def synth_event(rng, profile, label, duration, start_time=0.0, event_id=""):
    """Generate one labelled event with paired channels."""
    n_bursts = int(rng.integers(1, 4)) if label == "cough" else 0
    bursts = _burst_times(rng, duration, n_bursts)
    xyz = _accel_axes(rng, profile, duration, label, bursts)
    audio = _audio(rng, profile, duration, label, bursts)
    return Event(
        patient_id=profile.patient_id,
        start_time=start_time,
        end_time=start_time + duration,
        label=label,
        accel=magnitude(*xyz),
        audio=AudioSignal(audio),
        event_id=event_id,
    )


def _patient_rng(seed, index):
    return np.random.default_rng([int(seed), int(index)])


def _event_plan(cfg, rng):
    labels = ["cough"] * cfg.coughs_per_patient + ["non_cough"] * cfg.noncoughs_per_patient
    order = rng.permutation(len(labels))
    plan = []
    for k in order:
        label = labels[k]
        mean, std = cfg.cough_duration if label == "cough" else cfg.noncough_duration
        plan.append((label, truncated_normal(rng, mean, std, *cfg.duration_bounds)))
    return plan


def generate_dataset(cfg, out_dir):
    """Write paired event files and ``manifest.jsonl`` under ``out_dir``.

    Returns the list of manifest records. Output is byte-identical for a
    given configuration.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = []
    for p in range(cfg.n_patients):
        rng = _patient_rng(cfg.seed, p)
        profile = patient_profile(p, rng)
        clock = 0.0
        pdir = out_dir / profile.patient_id
        for k, (label, duration) in enumerate(_event_plan(cfg, rng)):
            clock += float(rng.uniform(1.0, 5.0))
            event_id = f"{profile.patient_id}_e{k:04d}"
            ev = synth_event(rng, profile, label, duration, start_time=round(clock, 6), event_id=event_id)
            records.append(save_event(ev, pdir / f"{event_id}.txt", pdir / f"{event_id}.wav"))
            clock = ev.end_time
    write_manifest(records, out_dir / "manifest.jsonl")
    atomic_write_json(out_dir / "synth_config.json", {"synth_config": asdict(cfg)})
    logger.info("wrote %d events for %d patients to %s", len(records), cfg.n_patients, out_dir)
    return records


def synth_recording(n_events=20, seed=0, patient_index=0, gap_range=(1.5, 5.0), cough_fraction=0.5,
                    cfg=None):
    """A continuous paired recording with events planted between silences.

    Returns ``(accel, audio, planted)`` where ``planted`` lists
    ``(start_s, end_s, label)``.
    """
    cfg = cfg or SynthConfig()
    rng = _patient_rng(seed, patient_index)
    profile = patient_profile(patient_index, rng)
    accel_parts, audio_parts, planted = [], [], []
    clock_a = clock_b = 0

    def silence(seconds):
        na = int(round(seconds * ACCEL_RATE))
        nb = int(round(seconds * AUDIO_RATE))
        xyz = rng.normal(0.0, ACCEL_NOISE, size=(3, na))
        return np.sqrt((xyz ** 2).sum(axis=0)), rng.normal(0.0, AUDIO_NOISE, size=nb)

    for _ in range(n_events):
        a, b = silence(rng.uniform(*gap_range))
        accel_parts.append(a)
        audio_parts.append(b)
        clock_a += len(a)
        clock_b += len(b)
        label = "cough" if rng.uniform() < cough_fraction else "non_cough"
        mean, std = cfg.cough_duration if label == "cough" else cfg.noncough_duration
        dur = truncated_normal(rng, mean, std, *cfg.duration_bounds)
        ev = synth_event(rng, profile, label, dur)
        start = clock_b / AUDIO_RATE
        planted.append((start, start + len(ev.audio) / AUDIO_RATE, label))
        # keep the two channels aligned on whole accelerometer samples
        accel_parts.append(ev.accel.samples)
        audio_parts.append(ev.audio.samples)
        clock_a += len(ev.accel)
        clock_b += len(ev.audio)
        pad = int(round(clock_a * AUDIO_RATE / ACCEL_RATE)) - clock_b
        if pad > 0:
            audio_parts.append(rng.normal(0.0, AUDIO_NOISE, size=pad))
            clock_b += pad
    a, b = silence(rng.uniform(*gap_range))
    accel_parts.append(a)
    audio_parts.append(b)
    audio = np.clip(np.concatenate(audio_parts), -1.0, 1.0)
    return AccelSignal(np.concatenate(accel_parts)), AudioSignal(audio), planted


def describe(records):
    """Per-patient counts and total durations, mirroring a dataset summary table."""
    rows = {}
    for r in records:
        row = rows.setdefault(r.patient_id, {"coughs": 0, "non_coughs": 0, "cough_time": 0.0,
                                             "non_cough_time": 0.0})
        key = "coughs" if r.label == "cough" else "non_coughs"
        row[key] += 1
        row["cough_time" if r.label == "cough" else "non_cough_time"] += r.duration
    return rows
