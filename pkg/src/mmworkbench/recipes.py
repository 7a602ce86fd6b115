"""Noise recipes and defense configs: parsing, validation, and application.

A recipe is an ordered list of per-word operations, each targeting one word
span in one modality. Recipes are declarative: applying one always starts
from the original media, so repeated submissions are idempotent. At most one
op may land on a given (word, modality) slot; later ops replace earlier ones
and the replacement is surfaced as a warning, not an error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import audio as audio_mod
from . import video as video_mod
from .errors import ValidationFailure, Violation
from .motion import BLOCK_SIZE, SEARCH_RANGE, repair_missing
from .timeline import Transcript, remove_word, replace_word, span_to_frames, span_to_samples

#: method name -> modality it may target
METHOD_MODALITY = {
    "BlankScreen": "video",
    "GaussianBlur": "video",
    "Mute": "audio",
    "AddNoise": "audio",
    "Replace": "text",
    "Remove": "text",
}

MODALITIES = ("video", "audio", "text")

DEFAULT_BLUR_SIGMA = 3.0
DEFAULT_SNR_DB = 0.0


@dataclass(frozen=True)
class NoiseOp:
    word_index: int
    modality: str
    method: str
    # method-specific parameters; unused ones stay None
    sigma: float | None = None
    profile_id: str | None = None
    snr_db: float | None = None
    new_token: str | None = None

    def to_dict(self) -> dict:
        params = {}
        if self.method == "GaussianBlur":
            params["sigma"] = self.sigma
        elif self.method == "AddNoise":
            params["profile_id"] = self.profile_id
            params["snr_db"] = self.snr_db
        elif self.method == "Replace":
            params["new_token"] = self.new_token
        return {"word_index": self.word_index, "modality": self.modality,
                "method": self.method, "params": params}


@dataclass
class NoiseRecipe:
    ops: list[NoiseOp] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"ops": [op.to_dict() for op in self.ops]}


def _num(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def parse_recipe(raw) -> NoiseRecipe:
    """Structural validation of a recipe body; raises with all violations."""
    if not isinstance(raw, dict):
        raise ValidationFailure([Violation("recipe", "recipe must be a JSON object")])
    raw_ops = raw.get("ops", [])
    if not isinstance(raw_ops, list):
        raise ValidationFailure([Violation("recipe.ops", "ops must be a list")])
    violations = []
    ops = []
    for i, entry in enumerate(raw_ops):
        if not isinstance(entry, dict):
            violations.append(Violation("recipe.op", f"op {i} is not an object", i))
            continue
        method = entry.get("method")
        if method not in METHOD_MODALITY:
            violations.append(Violation(
                "recipe.method",
                f"op {i}: unknown method {method!r} (expected one of "
                f"{sorted(METHOD_MODALITY)})", i))
            continue
        modality = entry.get("modality", METHOD_MODALITY[method])
        if modality != METHOD_MODALITY[method]:
            violations.append(Violation(
                "recipe.modality",
                f"op {i}: method {method} applies to the "
                f"{METHOD_MODALITY[method]} modality, not {modality!r}", i))
            continue
        word_index = entry.get("word_index")
        if not isinstance(word_index, int) or isinstance(word_index, bool) or word_index < 0:
            violations.append(Violation(
                "recipe.word_index",
                f"op {i}: word_index must be a non-negative integer", i))
            continue
        params = entry.get("params", {})
        if not isinstance(params, dict):
            violations.append(Violation("recipe.params", f"op {i}: params must be an object", i))
            continue
        kwargs: dict = {}
        if method == "GaussianBlur":
            sigma = params.get("sigma", DEFAULT_BLUR_SIGMA)
            if not _num(sigma) or not np.isfinite(sigma) or sigma <= 0:
                violations.append(Violation("recipe.params.sigma",
                                            f"op {i}: sigma must be a number > 0", i))
                continue
            kwargs["sigma"] = float(sigma)
        elif method == "AddNoise":
            profile_id = params.get("profile_id")
            if not isinstance(profile_id, str) or not profile_id:
                violations.append(Violation("recipe.params.profile_id",
                                            f"op {i}: profile_id is required", i))
                continue
            snr_db = params.get("snr_db", DEFAULT_SNR_DB)
            if not _num(snr_db) or not np.isfinite(snr_db):
                violations.append(Violation("recipe.params.snr_db",
                                            f"op {i}: snr_db must be a finite number", i))
                continue
            kwargs["profile_id"] = profile_id
            kwargs["snr_db"] = float(snr_db)
        elif method == "Replace":
            new_token = params.get("new_token")
            if not isinstance(new_token, str) or not new_token:
                violations.append(Violation("recipe.params.new_token",
                                            f"op {i}: new_token is required", i))
                continue
            kwargs["new_token"] = new_token
        ops.append(NoiseOp(word_index=word_index, modality=modality,
                           method=method, **kwargs))
    if violations:
        raise ValidationFailure(violations)
    return NoiseRecipe(ops)


def validate_recipe(recipe: NoiseRecipe, transcript: Transcript,
                    profile_ids: set[str]) -> tuple[NoiseRecipe, list[str]]:
    """Check ops against a transcript; collapse repeats per (word, modality).

    Returns the recipe that will actually run (later ops replace earlier ones
    on the same slot) plus a warning per replaced op.
    """
    violations = []
    n = len(transcript)
    for i, op in enumerate(recipe.ops):
        if op.word_index >= n:
            violations.append(Violation(
                "recipe.word_index",
                f"op {i}: word_index {op.word_index} out of range "
                f"(transcript has {n} words)", i))
        if op.method == "AddNoise" and op.profile_id not in profile_ids:
            violations.append(Violation(
                "recipe.params.profile_id",
                f"op {i}: unknown noise profile {op.profile_id!r}", i))
    if violations:
        raise ValidationFailure(violations)

    warnings = []
    last_for_slot: dict[tuple[int, str], int] = {}
    for i, op in enumerate(recipe.ops):
        key = (op.word_index, op.modality)
        if key in last_for_slot:
            prev = recipe.ops[last_for_slot[key]]
            warnings.append(f"{prev.method} on word {op.word_index} replaced by a later "
                            f"{op.method} op on the same {op.modality} slot")
        last_for_slot[key] = i
    keep = sorted(last_for_slot.values())
    return NoiseRecipe([recipe.ops[i] for i in keep]), warnings


# ---------------------------------------------------------------------------
# defense configuration
# ---------------------------------------------------------------------------

@dataclass
class AudioDenoise:
    enabled: bool = True
    gate_factor: float = audio_mod.DEFAULT_GATE_FACTOR


@dataclass
class VideoMci:
    enabled: bool = True
    block_size: int = BLOCK_SIZE
    search_range: int = SEARCH_RANGE


@dataclass
class FeatureInterp:
    enabled: bool = True


@dataclass
class DefenseConfig:
    audio_denoise: AudioDenoise = field(default_factory=AudioDenoise)
    video_mci: VideoMci = field(default_factory=VideoMci)
    feature_interp: FeatureInterp = field(default_factory=FeatureInterp)

    def to_dict(self) -> dict:
        return {
            "audio_denoise": {"enabled": self.audio_denoise.enabled,
                              "gate_factor": self.audio_denoise.gate_factor},
            "video_mci": {"enabled": self.video_mci.enabled,
                          "block_size": self.video_mci.block_size,
                          "search_range": self.video_mci.search_range},
            "feature_interp": {"enabled": self.feature_interp.enabled},
        }


def parse_defense(raw) -> DefenseConfig:
    if not isinstance(raw, dict):
        raise ValidationFailure([Violation("defense", "defense must be a JSON object")])
    violations = []
    cfg = DefenseConfig()

    def section(name):
        sub = raw.get(name, {})
        if not isinstance(sub, dict):
            violations.append(Violation(f"defense.{name}", f"{name} must be an object"))
            return {}
        return sub

    def read_bool(sub: dict, name: str, key: str, default: bool) -> bool:
        if key not in sub:
            return default
        if not isinstance(sub[key], bool):
            violations.append(Violation(f"defense.{name}.{key}", f"{key} must be a boolean"))
            return default
        return sub[key]

    ad = section("audio_denoise")
    cfg.audio_denoise.enabled = read_bool(ad, "audio_denoise", "enabled", True)
    if "gate_factor" in ad:
        gf = ad["gate_factor"]
        if not _num(gf) or not np.isfinite(gf) or gf < 0:
            violations.append(Violation("defense.audio_denoise.gate_factor",
                                        "gate_factor must be a number >= 0"))
        else:
            cfg.audio_denoise.gate_factor = float(gf)

    vm = section("video_mci")
    cfg.video_mci.enabled = read_bool(vm, "video_mci", "enabled", True)
    for key, lo, hi in (("block_size", 4, 64), ("search_range", 1, 64)):
        if key in vm:
            v = vm[key]
            if not isinstance(v, int) or isinstance(v, bool) or not lo <= v <= hi:
                violations.append(Violation(f"defense.video_mci.{key}",
                                            f"{key} must be an integer in [{lo}, {hi}]"))
            else:
                setattr(cfg.video_mci, key, v)

    fi = section("feature_interp")
    cfg.feature_interp.enabled = read_bool(fi, "feature_interp", "enabled", True)

    if violations:
        raise ValidationFailure(violations)
    return cfg


# ---------------------------------------------------------------------------
# application
# ---------------------------------------------------------------------------

@dataclass
class NoisedClip:
    audio: audio_mod.AudioTrack
    video: video_mod.VideoTrack
    transcript: Transcript
    warnings: list[str] = field(default_factory=list)


def apply_recipe(recipe: NoiseRecipe,
                 audio: audio_mod.AudioTrack,
                 video: video_mod.VideoTrack,
                 transcript: Transcript,
                 profiles: dict[str, audio_mod.NoiseProfile]) -> NoisedClip:
    """Apply an already-validated recipe to fresh copies of the original clip."""
    out_audio = audio.copy()
    out_video = video.shallow_copy()
    out_transcript = transcript
    warnings: list[str] = []

    for op in recipe.ops:
        span = transcript.spans[op.word_index]
        if op.modality == "audio":
            sample_span = span_to_samples(span, out_audio.sample_rate)
            if op.method == "Mute":
                out_audio = audio_mod.mute(out_audio, sample_span)
            else:
                out_audio = audio_mod.mix_noise(out_audio, sample_span,
                                                profiles[op.profile_id], op.snr_db)
        elif op.modality == "video":
            frame_span = span_to_frames(span, out_video.fps)
            if frame_span[0] >= len(out_video.frames):
                warnings.append(f"word {op.word_index} lies past the last frame; "
                                f"{op.method} skipped")
                continue
            if op.method == "BlankScreen":
                out_video = video_mod.blank(out_video, frame_span)
            else:
                out_video = video_mod.gaussian_blur(out_video, frame_span, op.sigma)
        else:
            if op.method == "Replace":
                out_transcript = replace_word(out_transcript, op.word_index, op.new_token)
            else:
                out_transcript = remove_word(out_transcript, op.word_index)

    return NoisedClip(out_audio, out_video, out_transcript, warnings)


def apply_media_defense(defense: DefenseConfig,
                        audio: audio_mod.AudioTrack,
                        video: video_mod.VideoTrack,
                        ) -> tuple[audio_mod.AudioTrack, video_mod.VideoTrack, list[str]]:
    """Media-level defenses in fixed order: spectral denoise, then MCI repair."""
    warnings: list[str] = []
    out_audio = audio
    out_video = video
    if defense.audio_denoise.enabled:
        out_audio = audio_mod.spectral_denoise(audio,
                                               gate_factor=defense.audio_denoise.gate_factor)
    if defense.video_mci.enabled:
        out_video, repair_warnings = repair_missing(
            video, block_size=defense.video_mci.block_size,
            search_range=defense.video_mci.search_range)
        warnings.extend(repair_warnings)
    return out_audio, out_video, warnings
