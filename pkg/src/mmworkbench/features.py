"""Per-frame feature extraction, word-level aggregation, and the
feature-interpolation defence.

Feature tracks are float64 matrices with one row per analysis step. A missing
measurement is a whole row of NaN; "measured zero" and "absent" stay distinct
until the diff/scoring boundary, where absent rows are compared against zero
vectors. The built-in extractors are deliberately small, fixed substitutes
(4 acoustic, 4 visual, 3 text dims) so the full pipeline runs without any
pretrained models; precomputed tracks can be imported from CSV instead.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .audio import AudioTrack
from .timeline import Transcript
from .video import VideoTrack

AUDIO_WIN_MS = 25.0
AUDIO_HOP_MS = 10.0
SILENCE_GATE_DB = -90.0
F0_MIN_HZ = 60.0
F0_MAX_HZ = 500.0
F0_MIN_CORRELATION = 0.3

ACOUSTIC_NAMES = ["log_energy", "zcr", "spectral_centroid", "f0"]
VISUAL_NAMES = ["mean_luma", "std_luma", "motion_energy", "edge_density"]
TEXT_NAMES = ["valence", "negation", "oov"]

DEFAULT_NEGATORS = frozenset({
    "not", "no", "never", "none", "neither", "nor",
    "don't", "can't", "won't", "isn't",
})


@dataclass
class FeatureTrack:
    """Fixed-rate feature matrix for one modality; NaN rows mean missing."""

    modality: str
    names: list[str]
    values: np.ndarray  # (n_steps, n_dims) float64
    step_ms: float
    win_ms: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ValueError("feature values must be 2-D")
        if self.values.shape[1] != len(self.names):
            raise ValueError("names length must equal feature dimension count")
        if self.win_ms == 0.0:
            self.win_ms = self.step_ms
        nan = np.isnan(self.values)
        mixed = nan.any(axis=1) & ~nan.all(axis=1)
        if mixed.any():
            raise ValueError("a row must be fully present or fully missing")

    @property
    def n_steps(self) -> int:
        return self.values.shape[0]

    @property
    def n_dims(self) -> int:
        return self.values.shape[1]

    def missing_mask(self) -> np.ndarray:
        return np.isnan(self.values).all(axis=1)

    def midpoints_ms(self) -> np.ndarray:
        """Time midpoint of each row's analysis window."""
        return np.arange(self.n_steps) * self.step_ms + self.win_ms / 2.0

    def copy(self) -> "FeatureTrack":
        return FeatureTrack(self.modality, list(self.names), self.values.copy(),
                            self.step_ms, self.win_ms)


@dataclass
class WordFeatureView:
    """Per-word aggregation of a feature track; NaN rows mean missing words."""

    modality: str
    names: list[str]
    values: np.ndarray  # (n_words, n_dims)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)

    @property
    def n_words(self) -> int:
        return self.values.shape[0]

    def missing_mask(self) -> np.ndarray:
        return np.isnan(self.values).all(axis=1)


@dataclass
class WordDiff:
    """Per-word distance between two views of the same shape."""

    distance: np.ndarray      # (n_words,)
    deltas: np.ndarray        # (n_words, n_dims)
    missing_diff: np.ndarray  # (n_words,) bool


@dataclass
class Lexicon:
    valence: dict[str, float]
    negators: frozenset[str] = DEFAULT_NEGATORS


def load_lexicon(path: str | Path) -> Lexicon:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return Lexicon({str(k).lower(): float(v) for k, v in raw.items()})


def default_lexicon() -> Lexicon:
    raw = json.loads(resources.files("mmworkbench").joinpath("data/lexicon.json")
                     .read_text(encoding="utf-8"))
    return Lexicon({str(k).lower(): float(v) for k, v in raw.items()})


# ---------------------------------------------------------------------------
# extractors
# ---------------------------------------------------------------------------

def acoustic_features(track: AudioTrack, win_ms: float = AUDIO_WIN_MS,
                      hop_ms: float = AUDIO_HOP_MS) -> FeatureTrack:
    """Windowed log-energy, zero-crossing rate, spectral centroid, and f0.

    Windows whose log-energy falls at or below the silence gate are emitted
    as missing rows. f0 comes from the biased autocorrelation peak in the
    60-500 Hz band with parabolic refinement, 0 when the peak correlation is
    below 0.3 (unvoiced).
    """
    sr = track.sample_rate
    win_n = int(sr * win_ms / 1000.0)
    hop_n = int(sr * hop_ms / 1000.0)
    n = len(track)
    if n < win_n:
        raise ValueError(f"track has {n} samples; need at least one window ({win_n})")
    n_frames = 1 + (n - win_n) // hop_n
    hann = np.hanning(win_n)
    freqs = np.fft.rfftfreq(win_n, 1.0 / sr)
    nfft_ac = 1 << int(np.ceil(np.log2(2 * win_n)))
    lag_lo = max(2, int(np.ceil(sr / F0_MAX_HZ)))
    lag_hi = min(win_n - 2, int(sr // F0_MIN_HZ))

    rows = np.empty((n_frames, 4))
    for i in range(n_frames):
        w = track.samples[i * hop_n:i * hop_n + win_n]
        mean_sq = float(np.mean(w * w))
        log_e = 10.0 * np.log10(mean_sq + 1e-10)
        if log_e <= SILENCE_GATE_DB:
            rows[i] = np.nan
            continue
        signs = np.signbit(w).astype(np.int8)
        zcr = float(np.mean(np.abs(np.diff(signs))))
        mag = np.abs(np.fft.rfft(w * hann))
        mag_sum = float(mag.sum())
        centroid = float((freqs * mag).sum() / mag_sum) if mag_sum > 0 else 0.0
        rows[i] = (log_e, zcr, centroid, _autocorr_f0(w, sr, nfft_ac, lag_lo, lag_hi))
    return FeatureTrack("audio", list(ACOUSTIC_NAMES), rows, hop_ms, win_ms)


def _autocorr_f0(w: np.ndarray, sr: int, nfft: int, lag_lo: int, lag_hi: int) -> float:
    if lag_hi <= lag_lo:
        return 0.0
    spec = np.fft.rfft(w, nfft)
    r = np.fft.irfft(spec * np.conj(spec), nfft)[:len(w)]
    if r[0] <= 0:
        return 0.0
    r = r / r[0]
    band = r[lag_lo:lag_hi + 1]
    k = int(np.argmax(band)) + lag_lo
    if r[k] < F0_MIN_CORRELATION:
        return 0.0
    # parabolic refinement around the discrete peak
    lag = float(k)
    if lag_lo < k < lag_hi:
        denom = r[k - 1] - 2.0 * r[k] + r[k + 1]
        if denom < 0:
            lag = k + 0.5 * (r[k - 1] - r[k + 1]) / denom
    return float(sr / lag)


def visual_features(track: VideoTrack) -> FeatureTrack:
    """Per-frame luma statistics; frames flagged missing emit missing rows.

    motion_energy is the mean absolute luma change against the stored
    previous frame (0 for frame 0); edge_density is the fraction of
    horizontal-gradient magnitudes above 32.
    """
    n = len(track)
    rows = np.empty((n, 4))
    prev = None
    for i, f in enumerate(track.frames):
        luma = f.luma.astype(np.float64)
        if i in track.missing:
            rows[i] = np.nan
        else:
            mean_l = float(luma.mean()) / 255.0
            std_l = float(luma.std()) / 255.0
            motion = 0.0
            if prev is not None:
                motion = float(np.abs(luma - prev).mean()) / 255.0
            grad = np.abs(np.diff(f.luma.astype(np.int16), axis=1))
            edge = float(np.mean(grad > 32))
            rows[i] = (mean_l, std_l, motion, edge)
        prev = luma
    return FeatureTrack("visual", list(VISUAL_NAMES), rows, track.frame_period_ms)


def text_features(transcript: Transcript, lexicon: Lexicon) -> FeatureTrack:
    """One row per word: lexicon valence, negator flag, out-of-vocabulary flag.

    Removed words emit missing rows.
    """
    rows = np.empty((len(transcript), 3))
    for i, span in enumerate(transcript):
        if span.removed:
            rows[i] = np.nan
            continue
        token = span.token.lower()
        oov = token not in lexicon.valence
        rows[i] = (0.0 if oov else lexicon.valence[token],
                   1.0 if token in lexicon.negators else 0.0,
                   1.0 if oov else 0.0)
    return FeatureTrack("text", list(TEXT_NAMES), rows, step_ms=0.0, win_ms=0.0)


# ---------------------------------------------------------------------------
# aggregation, interpolation, diffing
# ---------------------------------------------------------------------------

def aggregate_per_word(track: FeatureTrack, transcript: Transcript) -> WordFeatureView:
    """Mean of present rows whose window midpoint falls inside each word span.

    A word with no present rows in its span is flagged missing. Text tracks
    are already per-word and pass through unchanged.
    """
    if track.modality == "text":
        if track.n_steps != len(transcript):
            raise ValueError("text track length must equal transcript length")
        return WordFeatureView(track.modality, list(track.names), track.values.copy())
    mids = track.midpoints_ms()
    present = ~track.missing_mask()
    values = np.full((len(transcript), track.n_dims), np.nan)
    for i, span in enumerate(transcript):
        sel = present & (mids >= span.start_ms) & (mids < span.end_ms)
        if sel.any():
            values[i] = track.values[sel].mean(axis=0)
    return WordFeatureView(track.modality, list(track.names), values)


def interpolate_missing(track: FeatureTrack) -> tuple[FeatureTrack, list[str]]:
    """Refill missing rows per dimension by linear interpolation.

    Interior gaps interpolate between the bounding present rows; gaps touching
    either end copy the nearest present row. A fully missing track cannot be
    repaired and comes back unchanged with a note.
    """
    missing = track.missing_mask()
    if not missing.any():
        return track.copy(), []
    present_idx = np.flatnonzero(~missing)
    if present_idx.size == 0:
        return track.copy(), [f"{track.modality} features unrepairable: all rows missing"]
    missing_idx = np.flatnonzero(missing)
    values = track.values.copy()
    for d in range(track.n_dims):
        values[missing_idx, d] = np.interp(missing_idx, present_idx,
                                           track.values[present_idx, d])
    return FeatureTrack(track.modality, list(track.names), values,
                        track.step_ms, track.win_ms), []


def diff_tracks(a: WordFeatureView, b: WordFeatureView) -> WordDiff:
    """Per-word L2 distance and per-dimension deltas between two views.

    When exactly one side is missing, the missing side counts as a zero
    vector and the word is flagged as a missing-diff; two missing sides
    compare equal.
    """
    if a.values.shape != b.values.shape:
        raise ValueError(f"view shapes differ: {a.values.shape} vs {b.values.shape}")
    a_missing = a.missing_mask()
    b_missing = b.missing_mask()
    a_filled = np.where(np.isnan(a.values), 0.0, a.values)
    b_filled = np.where(np.isnan(b.values), 0.0, b.values)
    deltas = a_filled - b_filled
    both_missing = a_missing & b_missing
    deltas[both_missing] = 0.0
    distance = np.sqrt((deltas ** 2).sum(axis=1))
    return WordDiff(distance, deltas, a_missing ^ b_missing)


# ---------------------------------------------------------------------------
# CSV export / external-extractor import
# ---------------------------------------------------------------------------

def export_track_csv(track: FeatureTrack, csv_path: str | Path,
                     sidecar_path: str | Path | None = None) -> None:
    """Write `t_ms,dim_0,...` rows; missing rows have all dims empty."""
    csv_path = Path(csv_path)
    with csv_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t_ms"] + [f"dim_{d}" for d in range(track.n_dims)])
        missing = track.missing_mask()
        for i in range(track.n_steps):
            t_ms = repr(float(i * track.step_ms))
            if missing[i]:
                writer.writerow([t_ms] + [""] * track.n_dims)
            else:
                writer.writerow([t_ms] + [repr(float(v)) for v in track.values[i]])
    if sidecar_path is not None:
        sidecar = {"modality": track.modality, "step_ms": track.step_ms,
                   "win_ms": track.win_ms, "names": track.names}
        Path(sidecar_path).write_text(json.dumps(sidecar, indent=2) + "\n",
                                      encoding="utf-8")


def import_track_csv(csv_path: str | Path, sidecar_path: str | Path) -> FeatureTrack:
    sidecar = json.loads(Path(sidecar_path).read_text(encoding="utf-8"))
    with Path(csv_path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        n_dims = len(header) - 1
        rows = []
        for lineno, row in enumerate(reader, start=2):
            dims = row[1:]
            empties = sum(1 for v in dims if v == "")
            if empties == n_dims:
                rows.append([np.nan] * n_dims)
            elif empties == 0:
                rows.append([float(v) for v in dims])
            else:
                raise ValueError(f"{csv_path}:{lineno}: a row must be fully "
                                 "present or fully empty")
    names = sidecar.get("names") or [f"dim_{d}" for d in range(n_dims)]
    return FeatureTrack(sidecar["modality"], list(names),
                        np.asarray(rows, dtype=np.float64).reshape(-1, n_dims),
                        float(sidecar["step_ms"]), float(sidecar.get("win_ms", 0.0)))
