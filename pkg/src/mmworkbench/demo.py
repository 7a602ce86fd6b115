"""Deterministic synthetic demo clip (plus a second reference clip).

Four seconds of harmonic audio, a hundred frames of textured video with a
bright block drifting back and forth, and six evenly spaced words. Everything
is derived from fixed seeds so repeated runs produce identical media bytes;
the scorer's reference statistics were frozen from these two clips.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .audio import AudioTrack, write_audio
from .timeline import Transcript, WordSpan, save_transcript
from .video import Frame, VideoTrack, gaussian_kernel, _convolve_axis, write_y4m

SAMPLE_RATE = 16000
DURATION_S = 4.0
FPS = 25
N_FRAMES = 100
WIDTH, HEIGHT = 64, 48

DEMO_WORDS = ["the", "movie", "was", "really", "great", "fun"]
REFERENCE_WORDS = ["this", "film", "was", "so", "boring", "sad"]
WORD_MS = 600
FIRST_WORD_MS = 200


def _word_spans(tokens: list[str]) -> Transcript:
    spans = [WordSpan(i, tok, FIRST_WORD_MS + i * WORD_MS,
                      FIRST_WORD_MS + (i + 1) * WORD_MS)
             for i, tok in enumerate(tokens)]
    return Transcript(spans)


def demo_transcript() -> Transcript:
    return _word_spans(DEMO_WORDS)


def _harmonic_audio(f0: float, harmonics: list[float], am_hz: float,
                    amplitude: float, noise_amp: float, seed: int) -> AudioTrack:
    n = int(SAMPLE_RATE * DURATION_S)
    t = np.arange(n) / SAMPLE_RATE
    signal = np.zeros(n)
    for k, gain in enumerate(harmonics, start=1):
        signal += gain * np.sin(2.0 * np.pi * f0 * k * t)
    signal /= max(1.0, np.max(np.abs(signal)))
    envelope = 1.0 - 0.3 * np.cos(2.0 * np.pi * am_hz * t)
    rng = np.random.default_rng(seed)
    samples = amplitude * signal * envelope + noise_amp * rng.standard_normal(n)
    return AudioTrack(np.clip(samples, -1.0, 1.0), SAMPLE_RATE)


def demo_audio() -> AudioTrack:
    return _harmonic_audio(220.0, [1.0, 0.5, 0.25], 2.5, 0.22, 0.002, seed=11)


def _textured_background(mean: float, contrast: float, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((HEIGHT, WIDTH))
    kernel = gaussian_kernel(2.0)
    smooth = _convolve_axis(_convolve_axis(noise, kernel, axis=1), kernel, axis=0)
    smooth = (smooth - smooth.mean()) / max(smooth.std(), 1e-9)
    return np.clip(mean + contrast * smooth, 16, 235)


def _moving_block_video(bg_mean: float, bg_contrast: float, bg_seed: int,
                        block: int, block_luma: int,
                        amp_x: float, amp_y: float, period: float) -> VideoTrack:
    background = _textured_background(bg_mean, bg_contrast, bg_seed)
    cx, cy = WIDTH // 2 - block // 2, HEIGHT // 2 - block // 2
    frames = []
    for i in range(N_FRAMES):
        phase = 2.0 * np.pi * i / period
        x = cx + int(np.floor(amp_x * np.sin(phase) + 0.5))
        y = cy + int(np.floor(amp_y * np.cos(phase) + 0.5))
        luma = background.copy()
        luma[y:y + block, x:x + block] = block_luma
        frames.append(Frame(np.floor(luma + 0.5).astype(np.uint8)))
    return VideoTrack(frames, WIDTH, HEIGHT, FPS)


def demo_video() -> VideoTrack:
    return _moving_block_video(100.0, 22.0, bg_seed=21, block=12, block_luma=200,
                               amp_x=6.0, amp_y=4.0, period=50.0)


def reference_clip() -> tuple[AudioTrack, VideoTrack, Transcript]:
    """A second clip with different tone, texture, and motion.

    Used only to give the scorer's reference statistics more than one clip
    to generalize over.
    """
    audio = _harmonic_audio(330.0, [1.0, 0.3], 3.5, 0.14, 0.003, seed=12)
    video = _moving_block_video(150.0, 10.0, bg_seed=22, block=8, block_luma=50,
                                amp_x=4.0, amp_y=6.0, period=40.0)
    return audio, video, _word_spans(REFERENCE_WORDS)


#: the recipe that blanks the video over every word
def all_words_blank_recipe() -> dict:
    return {"ops": [{"word_index": i, "modality": "video",
                     "method": "BlankScreen", "params": {}}
                    for i in range(len(DEMO_WORDS))]}


#: repair-by-interpolation defense, leaving the (un-noised) audio alone
def mci_defense() -> dict:
    return {"audio_denoise": {"enabled": False},
            "video_mci": {"enabled": True},
            "feature_interp": {"enabled": True}}


def write_demo_clip(out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []

    audio_path = out_dir / "audio.wav"
    write_audio(demo_audio(), audio_path)
    paths.append(audio_path)

    video_path = out_dir / "video.y4m"
    write_y4m(demo_video(), video_path)
    paths.append(video_path)

    transcript_path = out_dir / "transcript.json"
    save_transcript(demo_transcript(), transcript_path)
    paths.append(transcript_path)

    recipe_path = out_dir / "recipe.json"
    recipe_path.write_text(json.dumps(all_words_blank_recipe(), indent=2) + "\n",
                           encoding="utf-8")
    paths.append(recipe_path)

    defense_path = out_dir / "defense.json"
    defense_path.write_text(json.dumps(mci_defense(), indent=2) + "\n",
                            encoding="utf-8")
    paths.append(defense_path)

    return paths
