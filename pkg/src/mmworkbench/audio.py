"""Audio track model, WAV I/O, word-span noise injection, and spectral denoising.

Tracks are mono float64 in [-1, 1]. Every operation is pure: it returns a new
track and leaves samples outside the targeted range bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.io import wavfile

from .errors import MediaFormatError

ALLOWED_SAMPLE_RATES = (8000, 16000, 22050, 44100, 48000)

#: RMS given to injected noise when the target span is digital silence
SILENT_SPAN_NOISE_RMS = 0.01

#: cap on the per-bin median floor, as a multiple of the across-bin median.
#: Keeps stationary narrowband content (which sits exactly at its own per-bin
#: median) from defining its own noise floor and being subtracted away.
NOISE_FLOOR_CAP_MULT = 2.0

DEFAULT_GATE_FACTOR = 1.5


@dataclass
class AudioTrack:
    """Mono audio; samples are float64 amplitudes in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise ValueError("AudioTrack is mono: samples must be 1-D")
        if self.sample_rate not in ALLOWED_SAMPLE_RATES:
            raise ValueError(f"unsupported sample rate {self.sample_rate}; "
                             f"expected one of {ALLOWED_SAMPLE_RATES}")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("samples must be finite")
        if self.samples.size and np.max(np.abs(self.samples)) > 1.0 + 1e-9:
            raise ValueError("samples must lie in [-1, 1]")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_ms(self) -> float:
        return len(self.samples) * 1000.0 / self.sample_rate

    def copy(self) -> "AudioTrack":
        return AudioTrack(self.samples.copy(), self.sample_rate)


@dataclass
class NoiseProfile:
    """A named background-noise recording, tiled cyclically when mixed in."""

    id: str
    samples: AudioTrack
    description: str = ""

    def __post_init__(self):
        if len(self.samples) == 0:
            raise ValueError("noise profile must be non-empty")


# ---------------------------------------------------------------------------
# WAV I/O (PCM 16-bit or 32-bit float; multichannel downmixed by averaging)
# ---------------------------------------------------------------------------

def read_audio(path) -> AudioTrack:
    try:
        rate, data = wavfile.read(path)
    except FileNotFoundError:
        raise
    except Exception as exc:  # scipy raises bare ValueError on bad bytes
        raise MediaFormatError(f"unsupported or corrupt WAV file {path}: {exc}") from exc
    if data.dtype == np.int16:
        x = data.astype(np.float64) / 32768.0
    elif data.dtype == np.float32:
        x = data.astype(np.float64)
    elif data.dtype == np.float64:
        x = data
    else:
        raise MediaFormatError(f"unsupported WAV sample format {data.dtype}; "
                               "expected PCM 16-bit or 32-bit float")
    if x.ndim == 2:
        x = x.mean(axis=1)
    if rate not in ALLOWED_SAMPLE_RATES:
        raise MediaFormatError(f"unsupported sample rate {rate} in {path}")
    return AudioTrack(np.clip(x, -1.0, 1.0), int(rate))


def write_audio(track: AudioTrack, path) -> None:
    """Write PCM 16-bit; exact round trip for tracks that came from PCM 16."""
    q = np.floor(track.samples * 32768.0 + 0.5)
    q = np.clip(q, -32768, 32767).astype(np.int16)
    wavfile.write(path, track.sample_rate, q)


# ---------------------------------------------------------------------------
# span-level operations
# ---------------------------------------------------------------------------

def _clamp_range(span: tuple[int, int], n: int) -> tuple[int, int]:
    lo, hi = span
    return max(0, min(lo, n)), max(0, min(hi, n))


def mute(track: AudioTrack, span: tuple[int, int]) -> AudioTrack:
    """Zero samples in [lo, hi); everything else is bit-identical."""
    lo, hi = _clamp_range(span, len(track))
    out = track.samples.copy()
    out[lo:hi] = 0.0
    return AudioTrack(out, track.sample_rate)


def rms(track: AudioTrack, span: tuple[int, int] | None = None) -> float:
    lo, hi = (0, len(track)) if span is None else _clamp_range(span, len(track))
    if hi <= lo:
        raise ValueError("rms over an empty range")
    seg = track.samples[lo:hi]
    return float(np.sqrt(np.mean(seg * seg)))


def mix_noise(track: AudioTrack, span: tuple[int, int], noise: NoiseProfile,
              snr_db: float) -> AudioTrack:
    """Add background noise over [lo, hi) at the requested span-level SNR.

    The profile is tiled cyclically to cover the range and scaled so that
    20*log10(rms(signal over span) / rms(injected noise over span)) == snr_db.
    A silent span gets noise at a fixed floor RMS instead. Output is clipped
    to [-1, 1]; samples outside the range are untouched.
    """
    if len(noise.samples) == 0:
        raise ValueError("noise profile is empty")
    if noise.samples.sample_rate != track.sample_rate:
        raise MediaFormatError(
            f"noise profile rate {noise.samples.sample_rate} Hz does not match "
            f"track rate {track.sample_rate} Hz")
    lo, hi = _clamp_range(span, len(track))
    if hi <= lo:
        return track.copy()
    idx = np.arange(hi - lo) % len(noise.samples)
    segment = noise.samples.samples[idx]
    seg_rms = float(np.sqrt(np.mean(segment * segment)))
    if seg_rms == 0.0:
        raise ValueError(f"noise profile '{noise.id}' is silent over the mixed segment")
    signal_rms = rms(track, (lo, hi))
    if signal_rms == 0.0:
        gain = SILENT_SPAN_NOISE_RMS / seg_rms
    else:
        gain = signal_rms / (seg_rms * 10.0 ** (snr_db / 20.0))
    out = track.samples.copy()
    out[lo:hi] = np.clip(out[lo:hi] + gain * segment, -1.0, 1.0)
    return AudioTrack(out, track.sample_rate)


# ---------------------------------------------------------------------------
# spectral denoiser
# ---------------------------------------------------------------------------

def spectral_denoise(track: AudioTrack, win: int = 1024, hop: int = 512,
                     gate_factor: float = DEFAULT_GATE_FACTOR) -> AudioTrack:
    """Suppress background noise with a per-bin spectral gate.

    STFT with a Hann window at 50% overlap. Each bin's noise floor is its
    median magnitude across frames, capped at a small multiple of the global
    median so tonal content cannot set its own floor. The gate threshold is
    gate_factor * floor: magnitudes are reduced by the threshold and never
    below 10% of themselves (so sub-threshold bins are attenuated to 10%,
    phase preserved). Resynthesis is overlap-add normalized by the accumulated
    window power; with gate_factor = 0 the round trip is the identity on the
    interior. Output length equals input length.
    """
    n = len(track)
    if n < win:
        raise ValueError(f"track has {n} samples; need at least one window ({win})")
    if gate_factor < 0:
        raise ValueError("gate_factor must be >= 0")
    window = np.hanning(win)
    n_frames = 1 + int(np.ceil(max(0, n - win) / hop))
    padded_len = (n_frames - 1) * hop + win
    x = np.zeros(padded_len)
    x[:n] = track.samples

    starts = np.arange(n_frames) * hop
    frames = np.stack([x[s:s + win] for s in starts]) * window
    spec = np.fft.rfft(frames, axis=1)
    mags = np.abs(spec)

    floor = np.median(mags, axis=0)
    global_median = float(np.median(floor))
    floor = np.minimum(floor, NOISE_FLOOR_CAP_MULT * global_median)
    threshold = gate_factor * floor

    new_mags = np.maximum(mags - threshold[None, :], 0.1 * mags)
    scale = np.where(mags > 0.0, new_mags / np.where(mags > 0.0, mags, 1.0), 0.0)
    spec *= scale

    out = np.zeros(padded_len)
    norm = np.zeros(padded_len)
    synth = np.fft.irfft(spec, n=win, axis=1) * window
    for i, s in enumerate(starts):
        out[s:s + win] += synth[i]
        norm[s:s + win] += window * window
    good = norm > 1e-8
    out[good] /= norm[good]
    out[~good] = 0.0
    return AudioTrack(np.clip(out[:n], -1.0, 1.0), track.sample_rate)
