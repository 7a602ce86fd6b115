"""Bundled synthetic background-noise profiles and directory loading.

Six seeded generators stand in for field recordings of common environments.
Generation is deterministic per (profile id, sample rate), so any pipeline
using them reproduces byte-identical results across runs.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .audio import AudioTrack, NoiseProfile, read_audio

_SEEDS = {
    "white": 101,
    "pink": 202,
    "babble": 303,
    "hum": 404,
    "traffic": 505,
    "cafeteria": 606,
}

PROFILE_DESCRIPTIONS = {
    "white": "flat broadband hiss",
    "pink": "1/f weighted broadband noise",
    "babble": "speech-band noise with slow amplitude modulation",
    "hum": "50 Hz mains hum with harmonics",
    "traffic": "low-frequency rumble with slow swell",
    "cafeteria": "mid-band clatter with fast amplitude modulation",
}

PROFILE_IDS = tuple(_SEEDS)

_TARGET_RMS = 0.1


def _normalize(x: np.ndarray) -> np.ndarray:
    r = float(np.sqrt(np.mean(x * x)))
    if r > 0:
        x = x * (_TARGET_RMS / r)
    return np.clip(x, -1.0, 1.0)


def _band_shape(white: np.ndarray, sample_rate: int, lo_hz: float, hi_hz: float,
                rolloff_hz: float) -> np.ndarray:
    """Soft band-pass via an FFT magnitude mask with cosine edges."""
    spec = np.fft.rfft(white)
    freqs = np.fft.rfftfreq(len(white), 1.0 / sample_rate)
    mask = np.ones_like(freqs)
    below = freqs < lo_hz
    mask[below] = np.clip(1.0 - (lo_hz - freqs[below]) / rolloff_hz, 0.0, 1.0)
    above = freqs > hi_hz
    mask[above] = np.clip(1.0 - (freqs[above] - hi_hz) / rolloff_hz, 0.0, 1.0)
    return np.fft.irfft(spec * mask, n=len(white))


def _slow_envelope(rng: np.random.Generator, n: int, sample_rate: int,
                   cutoff_hz: float, depth: float) -> np.ndarray:
    env_noise = rng.standard_normal(n)
    spec = np.fft.rfft(env_noise)
    freqs = np.fft.rfftfreq(n, 1.0 / sample_rate)
    spec[freqs > cutoff_hz] = 0.0
    env = np.fft.irfft(spec, n=n)
    peak = np.max(np.abs(env))
    if peak > 0:
        env = env / peak
    return 1.0 - depth + depth * (env + 1.0) / 2.0


def _generate(profile_id: str, sample_rate: int, duration_s: float) -> np.ndarray:
    rng = np.random.default_rng(_SEEDS[profile_id])
    n = int(sample_rate * duration_s)
    t = np.arange(n) / sample_rate
    if profile_id == "white":
        return _normalize(rng.standard_normal(n))
    if profile_id == "pink":
        spec = np.fft.rfft(rng.standard_normal(n))
        freqs = np.fft.rfftfreq(n, 1.0 / sample_rate)
        spec /= np.sqrt(np.maximum(freqs, 1.0))
        return _normalize(np.fft.irfft(spec, n=n))
    if profile_id == "babble":
        base = _band_shape(rng.standard_normal(n), sample_rate, 300, 3400, 150)
        return _normalize(base * _slow_envelope(rng, n, sample_rate, 4.0, 0.6))
    if profile_id == "hum":
        x = np.zeros(n)
        for harmonic, amp in ((1, 1.0), (2, 0.5), (3, 0.35), (5, 0.2)):
            x += amp * np.sin(2 * np.pi * 50.0 * harmonic * t)
        x += 0.02 * rng.standard_normal(n)
        return _normalize(x)
    if profile_id == "traffic":
        base = _band_shape(rng.standard_normal(n), sample_rate, 0, 250, 120)
        return _normalize(base * _slow_envelope(rng, n, sample_rate, 0.8, 0.4))
    if profile_id == "cafeteria":
        base = _band_shape(rng.standard_normal(n), sample_rate, 400, 4000, 300)
        return _normalize(base * _slow_envelope(rng, n, sample_rate, 9.0, 0.7))
    raise KeyError(f"unknown noise profile '{profile_id}'")


def builtin_profiles(sample_rate: int, duration_s: float = 3.0) -> dict[str, NoiseProfile]:
    """The six bundled profiles, generated deterministically at `sample_rate`."""
    return {
        pid: NoiseProfile(
            id=pid,
            samples=AudioTrack(_generate(pid, sample_rate, duration_s), sample_rate),
            description=PROFILE_DESCRIPTIONS[pid],
        )
        for pid in PROFILE_IDS
    }


def load_profiles_dir(directory: str | Path) -> dict[str, NoiseProfile]:
    """Load noise profiles from a directory of WAV files; id = file stem."""
    out: dict[str, NoiseProfile] = {}
    for path in sorted(Path(directory).glob("*.wav")):
        out[path.stem] = NoiseProfile(id=path.stem, samples=read_audio(path),
                                      description=f"user profile from {path.name}")
    return out
