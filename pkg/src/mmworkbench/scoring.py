"""Per-modality sentiment scoring, fusion by averaging, and 3-class mapping.

The built-in scorers are self-contained stand-ins: text scores average
lexicon valence with single-step negation flips; audio and visual scores are
a fixed weight vector applied to standardized word-mean features. An external
scoring backend can replace the built-in scores over HTTP; any failure there
falls back to the built-ins with a recorded warning.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import httpx
import numpy as np

from .features import FeatureTrack, WordFeatureView

LABEL_POSITIVE = "Positive"
LABEL_NEUTRAL = "Neutral"
LABEL_NEGATIVE = "Negative"

DEFAULT_NEUTRAL_BAND = 0.1
EXTERNAL_TIMEOUT_S = 10.0

MODALITIES = ("text", "audio", "visual")


@dataclass
class ModalityScore:
    modality: str
    score: float
    available: bool = True

    def to_dict(self) -> dict:
        return {"modality": self.modality, "score": self.score, "available": self.available}


@dataclass
class PredictionResult:
    scores: dict[str, ModalityScore]
    fused: float
    label: str
    neutral_band: float
    source: str = "builtin"  # or "external" / "fallback"

    def to_dict(self) -> dict:
        return {
            "fused": self.fused,
            "label": self.label,
            "neutral_band": self.neutral_band,
            "source": self.source,
            "scores": {m: s.to_dict() for m, s in self.scores.items()},
        }


@dataclass
class ModalityWeights:
    weights: np.ndarray
    ref_mean: np.ndarray
    ref_std: np.ndarray


@dataclass
class ScorerConfig:
    modalities: dict[str, ModalityWeights]
    neutral_band: float = DEFAULT_NEUTRAL_BAND


def load_scorer_config(path: str | Path) -> ScorerConfig:
    return _parse_scorer_config(json.loads(Path(path).read_text(encoding="utf-8")))


def default_scorer_config() -> ScorerConfig:
    raw = json.loads(resources.files("mmworkbench").joinpath("data/scorer_config.json")
                     .read_text(encoding="utf-8"))
    return _parse_scorer_config(raw)


def _parse_scorer_config(raw: dict) -> ScorerConfig:
    mods = {}
    for name, cfg in raw.items():
        if name == "neutral_band":
            continue
        mods[name] = ModalityWeights(
            weights=np.asarray(cfg["weights"], dtype=np.float64),
            ref_mean=np.asarray(cfg["ref_mean"], dtype=np.float64),
            ref_std=np.asarray(cfg["ref_std"], dtype=np.float64),
        )
    return ScorerConfig(mods, float(raw.get("neutral_band", DEFAULT_NEUTRAL_BAND)))


def _clamp(x: float) -> float:
    return float(np.clip(x, -1.0, 1.0))


def score_text(view: WordFeatureView) -> ModalityScore:
    """Mean valence over present words, flipped after a present negator."""
    present = ~view.missing_mask()
    if not present.any():
        return ModalityScore("text", 0.0, available=False)
    valence_col = view.names.index("valence")
    negation_col = view.names.index("negation")
    total = 0.0
    count = 0
    for i in np.flatnonzero(present):
        flip = 1.0
        if i > 0 and present[i - 1] and view.values[i - 1, negation_col] == 1.0:
            flip = -1.0
        total += flip * view.values[i, valence_col]
        count += 1
    return ModalityScore("text", _clamp(total / count))


def _score_weighted(view: WordFeatureView, cfg: ModalityWeights,
                    modality: str) -> ModalityScore:
    present = ~view.missing_mask()
    if not present.any():
        return ModalityScore(modality, 0.0, available=False)
    if len(cfg.weights) != view.values.shape[1]:
        raise ValueError(f"{modality} weight vector has {len(cfg.weights)} dims "
                         f"but view has {view.values.shape[1]}")
    word_means = view.values[present].mean(axis=0)
    z = (word_means - cfg.ref_mean) / np.maximum(cfg.ref_std, 1e-9)
    return ModalityScore(modality, _clamp(float(cfg.weights @ z)))


def score_audio(view: WordFeatureView, config: ScorerConfig) -> ModalityScore:
    return _score_weighted(view, config.modalities["audio"], "audio")


def score_visual(view: WordFeatureView, config: ScorerConfig) -> ModalityScore:
    return _score_weighted(view, config.modalities["visual"], "visual")


def fuse(scores: list[ModalityScore]) -> float:
    """Mean of available scores; unavailable modalities are excluded outright."""
    available = [s.score for s in scores if s.available]
    if not available:
        raise ValueError("no available modality to fuse")
    return float(np.mean(available))


def classify(fused: float, neutral_band: float = DEFAULT_NEUTRAL_BAND) -> str:
    if neutral_band < 0:
        raise ValueError("neutral_band must be >= 0")
    if fused > neutral_band:
        return LABEL_POSITIVE
    if fused < -neutral_band:
        return LABEL_NEGATIVE
    return LABEL_NEUTRAL


def predict(views: dict[str, WordFeatureView], config: ScorerConfig) -> PredictionResult:
    """Run the built-in scorers and fuse into a labelled prediction."""
    scores = {
        "text": score_text(views["text"]),
        "audio": score_audio(views["audio"], config),
        "visual": score_visual(views["visual"], config),
    }
    fused = fuse(list(scores.values()))
    return PredictionResult(scores, fused, classify(fused, config.neutral_band),
                            config.neutral_band)


# ---------------------------------------------------------------------------
# external backend seam: POST /score with the per-modality tracks
# ---------------------------------------------------------------------------

def track_payload(track: FeatureTrack) -> dict:
    """Wire form of a track; missing rows serialize as null."""
    missing = track.missing_mask()
    values = [None if missing[i] else [float(v) for v in track.values[i]]
              for i in range(track.n_steps)]
    return {"names": track.names, "step_ms": track.step_ms, "values": values}


def external_score(endpoint: str, session_id: str, tracks: dict[str, FeatureTrack],
                   timeout_s: float = EXTERNAL_TIMEOUT_S,
                   ) -> tuple[dict[str, float] | None, list[str]]:
    """Ask an external backend to score the clip; (None, warnings) on failure.

    The response must be HTTP 200 with {"scores": {text, audio, visual}} and
    every score in [-1, 1]; anything else triggers the built-in fallback.
    """
    body = {"session_id": session_id,
            "tracks": {m: track_payload(t) for m, t in tracks.items()}}
    try:
        resp = httpx.post(endpoint.rstrip("/") + "/score", json=body, timeout=timeout_s)
    except httpx.HTTPError as exc:
        return None, [f"external scorer unreachable ({exc.__class__.__name__}); "
                      "using built-in scores"]
    if resp.status_code != 200:
        return None, [f"external scorer returned HTTP {resp.status_code}; "
                      "using built-in scores"]
    try:
        scores = resp.json()["scores"]
        out = {}
        for m in MODALITIES:
            value = float(scores[m])
            if not -1.0 <= value <= 1.0 or not np.isfinite(value):
                raise ValueError(f"{m} score {value} outside [-1, 1]")
            out[m] = value
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        return None, [f"external scorer response malformed ({exc}); "
                      "using built-in scores"]
    return out, []


def predict_with_backend(views: dict[str, WordFeatureView],
                         tracks: dict[str, FeatureTrack],
                         config: ScorerConfig,
                         endpoint: str | None,
                         session_id: str = "",
                         ) -> tuple[PredictionResult, list[str]]:
    """Prediction via the external backend when configured, else built-ins.

    Availability always comes from the word views: a modality whose view is
    entirely missing stays excluded from fusion even if the backend scored it.
    """
    builtin = predict(views, config)
    if endpoint is None:
        return builtin, []
    raw, warnings = external_score(endpoint, session_id, tracks)
    if raw is None:
        builtin.source = "fallback"
        return builtin, warnings
    scores = {m: ModalityScore(m, raw[m], available=builtin.scores[m].available)
              for m in MODALITIES}
    fused = fuse(list(scores.values()))
    return PredictionResult(scores, fused, classify(fused, config.neutral_band),
                            config.neutral_band, source="external"), warnings
