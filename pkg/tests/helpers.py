"""Shared test fixtures-in-code: synthetic signals and textures."""

from __future__ import annotations

import numpy as np

from mmworkbench.audio import AudioTrack
from mmworkbench.video import _convolve_axis, gaussian_kernel

#: multi-scale texture mix, weighted toward coarse structure so block motion
#: search has a clean gradient to walk down
TEXTURE_SCALES = ((8.0, 2.5), (3.0, 1.0), (1.0, 0.3))


def textured_panorama(seed: int = 5, size: int = 168,
                      scales=TEXTURE_SCALES) -> np.ndarray:
    """A uint8 texture large enough to crop translated 128x128 windows from."""
    rng = np.random.default_rng(seed)
    acc = np.zeros((size, size))
    for sigma, amp in scales:
        k = gaussian_kernel(sigma)
        layer = _convolve_axis(_convolve_axis(rng.standard_normal((size, size)),
                                              k, axis=1), k, axis=0)
        acc += amp * layer / max(layer.std(), 1e-9)
    acc = (acc - acc.mean()) / acc.std()
    return np.clip(128.0 + 45.0 * acc, 8, 248).astype(np.uint8)


def sine_track(freq_hz: float, sample_rate: int = 16000, duration_s: float = 3.0,
               amplitude: float = 1.0) -> AudioTrack:
    t = np.arange(int(sample_rate * duration_s)) / sample_rate
    return AudioTrack(np.clip(amplitude * np.sin(2 * np.pi * freq_hz * t), -1, 1),
                      sample_rate)


def noisy_sine(freq_hz: float, snr_db: float, seed: int,
               sample_rate: int = 16000, duration_s: float = 3.0,
               peak: float = 0.45) -> tuple[AudioTrack, np.ndarray]:
    """(tone + white noise at snr_db, the scaled clean component)."""
    t = np.arange(int(sample_rate * duration_s)) / sample_rate
    clean = np.sin(2 * np.pi * freq_hz * t)
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(len(t))
    clean_rms = np.sqrt(np.mean(clean ** 2))
    noise *= clean_rms / (np.sqrt(np.mean(noise ** 2)) * 10.0 ** (snr_db / 20.0))
    mix = peak * (clean + noise)
    return AudioTrack(np.clip(mix, -1.0, 1.0), sample_rate), peak * clean


def write_clip(directory, tokens=("alpha", "beta", "gamma"), sample_rate=16000,
               word_ms=500, fps=25):
    """Write a small synthetic clip (WAV + Y4M + transcript) and return paths."""
    from mmworkbench.audio import write_audio
    from mmworkbench.timeline import Transcript, WordSpan, save_transcript
    from mmworkbench.video import Frame, VideoTrack, write_y4m

    directory.mkdir(parents=True, exist_ok=True)
    n = sample_rate * len(tokens) * word_ms // 1000
    t = np.arange(n) / sample_rate
    rng = np.random.default_rng(len(tokens))
    samples = 0.3 * np.sin(2 * np.pi * 220 * t) + 0.005 * rng.standard_normal(n)
    write_audio(AudioTrack(np.clip(samples, -1, 1), sample_rate),
                directory / "audio.wav")

    n_frames = len(tokens) * word_ms * fps // 1000 + 1
    frames = [Frame(rng.integers(20, 236, size=(16, 16), dtype=np.uint8))
              for _ in range(n_frames)]
    write_y4m(VideoTrack(frames, 16, 16, fps), directory / "video.y4m")

    spans = tuple(WordSpan(i, tok, i * word_ms, (i + 1) * word_ms)
                  for i, tok in enumerate(tokens))
    save_transcript(Transcript(spans), directory / "transcript.json")
    return (directory / "audio.wav", directory / "video.y4m",
            directory / "transcript.json")
