"""Session lifecycle: ingest, noise, defense, analysis, persistence, export.

One directory per session holds copies of the media, a `session.json`, and
per-variant CSV feature dumps, so everything the service knows is inspectable
with a text editor. Mutating calls on the same session are serialized through
a per-session lock; distinct sessions proceed concurrently.
"""

from __future__ import annotations

import datetime as _dt
import io
import json
import secrets
import shutil
import threading
import zipfile
from dataclasses import dataclass, field
from pathlib import Path

from . import features as feat
from .audio import AudioTrack, NoiseProfile, read_audio, write_audio
from .errors import UnknownSessionError, ValidationFailure, Violation
from .noise_profiles import PROFILE_DESCRIPTIONS, PROFILE_IDS, builtin_profiles
from .recipes import (DefenseConfig, NoiseRecipe, apply_media_defense, apply_recipe,
                      parse_defense, parse_recipe, validate_recipe)
from .scoring import (PredictionResult, ScorerConfig, default_scorer_config,
                      predict_with_backend)
from .timeline import Transcript, load_transcript, save_transcript, validate_transcript
from .video import VideoTrack, read_video, write_y4m

VARIANTS = ("original", "noised", "defended")
FEATURE_MODALITIES = ("audio", "visual", "text")

_BASE32 = "abcdefghijklmnopqrstuvwxyz234567"

#: fixed member timestamp so export archives are byte-stable across runs
_EPOCH = (1980, 1, 1, 0, 0, 0)


def new_session_id() -> str:
    """12 lowercase base32 chars encoding 60 random bits."""
    bits = secrets.randbits(60)
    return "".join(_BASE32[(bits >> (5 * i)) & 31] for i in reversed(range(12)))


@dataclass
class Variant:
    """One analyzed version of the clip (original, noised, or defended)."""

    audio: AudioTrack
    video: VideoTrack
    transcript: Transcript
    tracks: dict[str, feat.FeatureTrack]
    views: dict[str, feat.WordFeatureView]
    prediction: PredictionResult


@dataclass
class Session:
    id: str
    created_at: str
    directory: Path
    transcript: Transcript  # as ingested; variants carry their own copies
    variants: dict[str, Variant]
    recipe: NoiseRecipe | None = None
    defense: DefenseConfig | None = None
    warnings: list[str] = field(default_factory=list)
    lock: threading.RLock = field(default_factory=threading.RLock, repr=False)


class SessionStore:
    """Owns all sessions under one data directory."""

    def __init__(self, data_dir: str | Path,
                 scorer_config: ScorerConfig | None = None,
                 lexicon: feat.Lexicon | None = None,
                 profiles: dict[str, NoiseProfile] | None = None,
                 scorer_endpoint: str | None = None):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.scorer_config = scorer_config or default_scorer_config()
        self.lexicon = lexicon or feat.default_lexicon()
        self._user_profiles = profiles
        self._builtin_cache: dict[int, dict[str, NoiseProfile]] = {}
        self.scorer_endpoint = scorer_endpoint
        self._sessions: dict[str, Session] = {}
        self._registry_lock = threading.Lock()
        for session_json in sorted(self.data_dir.glob("*/session.json")):
            session = self._load_session(session_json.parent)
            self._sessions[session.id] = session

    # -- lookup ------------------------------------------------------------

    def get(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise UnknownSessionError(session_id) from None

    def list_sessions(self) -> list[dict]:
        rows = []
        for s in sorted(self._sessions.values(), key=lambda s: (s.created_at, s.id)):
            rows.append({"id": s.id, "created_at": s.created_at,
                         "has_noised": "noised" in s.variants,
                         "has_defended": "defended" in s.variants})
        return rows

    def profiles_for(self, sample_rate: int) -> dict[str, NoiseProfile]:
        """Noise profiles usable with a clip at `sample_rate`.

        User-supplied profiles are returned as-is (rate mismatches surface at
        mix time); built-ins are regenerated per rate from their fixed seeds.
        """
        if self._user_profiles is not None:
            return self._user_profiles
        if sample_rate not in self._builtin_cache:
            self._builtin_cache[sample_rate] = builtin_profiles(sample_rate)
        return self._builtin_cache[sample_rate]

    def list_profiles(self) -> list[dict]:
        if self._user_profiles is not None:
            return [{"id": p.id, "description": p.description}
                    for p in self._user_profiles.values()]
        return [{"id": pid, "description": PROFILE_DESCRIPTIONS[pid]}
                for pid in PROFILE_IDS]

    # -- analysis ----------------------------------------------------------

    def _analyze(self, audio: AudioTrack, video: VideoTrack, transcript: Transcript,
                 session_id: str,
                 precomputed: dict[str, feat.FeatureTrack] | None = None,
                 ) -> tuple[Variant, list[str]]:
        tracks = dict(precomputed) if precomputed else {}
        if "audio" not in tracks:
            tracks["audio"] = feat.acoustic_features(audio)
        if "visual" not in tracks:
            tracks["visual"] = feat.visual_features(video)
        if "text" not in tracks:
            tracks["text"] = feat.text_features(transcript, self.lexicon)
        views = {m: feat.aggregate_per_word(tracks[m], transcript)
                 for m in FEATURE_MODALITIES}
        prediction, warnings = predict_with_backend(
            views, tracks, self.scorer_config, self.scorer_endpoint, session_id)
        return Variant(audio, video, transcript, tracks, views, prediction), warnings

    # -- lifecycle ---------------------------------------------------------

    def create_session(self, audio_path: str | Path, video_path: str | Path,
                       transcript_path: str | Path) -> Session:
        audio = read_audio(audio_path)
        video = read_video(video_path)
        transcript = load_transcript(transcript_path)
        violations = validate_transcript(transcript, audio.duration_ms, video.duration_ms)
        if violations:
            raise ValidationFailure(violations)

        session_id = new_session_id()
        created_at = _dt.datetime.now(_dt.timezone.utc) \
            .isoformat(timespec="seconds").replace("+00:00", "Z")
        directory = self.data_dir / session_id
        variant, warnings = self._analyze(audio, video, transcript, session_id)
        session = Session(session_id, created_at, directory, transcript,
                          {"original": variant}, warnings=warnings)
        with session.lock:
            self._write_variant(session, "original")
            self._write_session_json(session)
        with self._registry_lock:
            self._sessions[session_id] = session
        return session

    def apply_recipe(self, session_id: str, raw_recipe) -> Session:
        session = self.get(session_id)
        recipe = parse_recipe(raw_recipe)
        with session.lock:
            original = session.variants["original"]
            profiles = self.profiles_for(original.audio.sample_rate)
            effective, warnings = validate_recipe(recipe, original.transcript,
                                                  set(profiles))
            noised = apply_recipe(effective, original.audio, original.video,
                                  original.transcript, profiles)
            variant, score_warnings = self._analyze(noised.audio, noised.video,
                                                    noised.transcript, session_id)
            session.recipe = effective
            session.variants["noised"] = variant
            # the defended variant derived from the previous noised media is stale
            if session.variants.pop("defended", None) is not None:
                session.defense = None
                warnings.append("defended variant discarded; re-apply the defense "
                                "to the new noised media")
            session.warnings = noised.warnings + warnings + score_warnings
            self._write_variant(session, "noised")
            self._remove_variant_dir(session, "defended")
            self._write_session_json(session)
        return session

    def apply_defense(self, session_id: str, raw_config) -> Session:
        session = self.get(session_id)
        config = parse_defense(raw_config)
        with session.lock:
            if "noised" not in session.variants:
                raise ValidationFailure([Violation(
                    "defense", "no noised variant to defend; apply a recipe first")])
            noised = session.variants["noised"]
            audio, video, warnings = apply_media_defense(config, noised.audio,
                                                         noised.video)
            tracks = {
                "audio": feat.acoustic_features(audio),
                "visual": feat.visual_features(video),
                "text": feat.text_features(noised.transcript, self.lexicon),
            }
            if config.feature_interp.enabled:
                for m in FEATURE_MODALITIES:
                    tracks[m], notes = feat.interpolate_missing(tracks[m])
                    warnings.extend(notes)
            variant, score_warnings = self._analyze(
                audio, video, noised.transcript, session_id, precomputed=tracks)
            session.defense = config
            session.variants["defended"] = variant
            session.warnings = session.warnings + warnings + score_warnings
            self._write_variant(session, "defended")
            self._write_session_json(session)
        return session

    def delete_session(self, session_id: str) -> None:
        session = self.get(session_id)
        with self._registry_lock:
            self._sessions.pop(session_id, None)
        with session.lock:
            shutil.rmtree(session.directory, ignore_errors=True)

    # -- comparison document ----------------------------------------------

    def comparison(self, session_id: str) -> dict:
        return comparison_document(self.get(session_id))

    # -- persistence -------------------------------------------------------

    def _write_variant(self, session: Session, name: str) -> None:
        variant = session.variants[name]
        vdir = session.directory / name
        vdir.mkdir(parents=True, exist_ok=True)
        write_audio(variant.audio, vdir / "audio.wav")
        write_y4m(variant.video, vdir / "video.y4m")
        save_transcript(variant.transcript, vdir / "transcript.json")
        for m in FEATURE_MODALITIES:
            feat.export_track_csv(variant.tracks[m], vdir / f"features_{m}.csv",
                                  vdir / f"features_{m}.json")

    def _remove_variant_dir(self, session: Session, name: str) -> None:
        shutil.rmtree(session.directory / name, ignore_errors=True)

    def _write_session_json(self, session: Session) -> None:
        doc = {
            "id": session.id,
            "created_at": session.created_at,
            "recipe": session.recipe.to_dict() if session.recipe else None,
            "defense": session.defense.to_dict() if session.defense else None,
            "warnings": session.warnings,
            "predictions": {name: v.prediction.to_dict()
                            for name, v in session.variants.items()},
        }
        (session.directory / "session.json").write_text(
            json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    def _load_session(self, directory: Path) -> Session:
        doc = json.loads((directory / "session.json").read_text(encoding="utf-8"))
        variants: dict[str, Variant] = {}
        for name in VARIANTS:
            vdir = directory / name
            if not (vdir / "audio.wav").exists():
                continue
            audio = read_audio(vdir / "audio.wav")
            video = read_video(vdir / "video.y4m")
            transcript = load_transcript(vdir / "transcript.json")
            tracks = {m: feat.import_track_csv(vdir / f"features_{m}.csv",
                                               vdir / f"features_{m}.json")
                      for m in FEATURE_MODALITIES}
            views = {m: feat.aggregate_per_word(tracks[m], transcript)
                     for m in FEATURE_MODALITIES}
            prediction = _prediction_from_dict(doc["predictions"][name])
            variants[name] = Variant(audio, video, transcript, tracks, views, prediction)
        recipe = parse_recipe(doc["recipe"]) if doc.get("recipe") else None
        defense = parse_defense(doc["defense"]) if doc.get("defense") else None
        return Session(doc["id"], doc["created_at"], directory,
                       variants["original"].transcript, variants,
                       recipe=recipe, defense=defense,
                       warnings=list(doc.get("warnings", [])))

    # -- export ------------------------------------------------------------

    def export_session(self, session_id: str) -> bytes:
        """Zip of media, transcripts, features, recipe/defense, comparison.

        Volatile fields (session id, creation time) are stripped and member
        timestamps pinned, so identical pipelines export identical bytes.
        """
        session = self.get(session_id)
        with session.lock:
            doc = comparison_document(session)
            doc.pop("id", None)
            doc.pop("created_at", None)
            buf = io.BytesIO()
            with zipfile.ZipFile(buf, "w", zipfile.ZIP_STORED) as zf:
                def add(name: str, payload: bytes) -> None:
                    info = zipfile.ZipInfo(name, date_time=_EPOCH)
                    zf.writestr(info, payload)

                for name in VARIANTS:
                    vdir = session.directory / name
                    if not vdir.is_dir():
                        continue
                    for filename in ("audio.wav", "video.y4m", "transcript.json",
                                     *(f"features_{m}.{ext}"
                                       for m in FEATURE_MODALITIES
                                       for ext in ("csv", "json"))):
                        add(f"{name}/{filename}", (vdir / filename).read_bytes())
                if session.recipe is not None:
                    add("recipe.json", _json_bytes(session.recipe.to_dict()))
                if session.defense is not None:
                    add("defense.json", _json_bytes(session.defense.to_dict()))
                add("comparison.json", _json_bytes(doc))
            return buf.getvalue()


def _json_bytes(doc: dict) -> bytes:
    return (json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n") \
        .encode("utf-8")


def _prediction_from_dict(doc: dict) -> PredictionResult:
    from .scoring import ModalityScore
    scores = {m: ModalityScore(m, s["score"], s["available"])
              for m, s in doc["scores"].items()}
    return PredictionResult(scores, doc["fused"], doc["label"],
                            doc["neutral_band"], doc.get("source", "builtin"))


def _view_rows(view: feat.WordFeatureView) -> list:
    missing = view.missing_mask()
    return [None if missing[i] else [float(v) for v in view.values[i]]
            for i in range(view.n_words)]


def _diff_dict(diff: feat.WordDiff) -> dict:
    return {
        "distance": [float(v) for v in diff.distance],
        "deltas": [[float(v) for v in row] for row in diff.deltas],
        "missing_diff": [bool(v) for v in diff.missing_diff],
    }


def comparison_document(session: Session) -> dict:
    """The cross-variant document served to clients; NaN never leaks out."""
    present = [name for name in VARIANTS if name in session.variants]
    original = session.variants["original"]
    modalities = {}
    for m in FEATURE_MODALITIES:
        entry = {
            "names": list(original.views[m].names),
            "word_views": {name: _view_rows(session.variants[name].views[m])
                           for name in present},
        }
        diffs = {}
        for name in ("noised", "defended"):
            if name in session.variants:
                diffs[name] = _diff_dict(feat.diff_tracks(
                    original.views[m], session.variants[name].views[m]))
        if diffs:
            entry["diffs"] = diffs
        modalities[m] = entry

    annotations = []
    if session.recipe is not None:
        annotations = [op.to_dict() for op in session.recipe.ops]

    return {
        "id": session.id,
        "created_at": session.created_at,
        "words": [_span_dict(s) for s in original.transcript],
        "variants": present,
        "annotations": annotations,
        "recipe": session.recipe.to_dict() if session.recipe else None,
        "defense": session.defense.to_dict() if session.defense else None,
        "modalities": modalities,
        "predictions": {name: session.variants[name].prediction.to_dict()
                        for name in present},
        "transcripts": {name: [_span_dict(s)
                               for s in session.variants[name].transcript]
                        for name in present},
        "warnings": list(session.warnings),
    }


def _span_dict(span) -> dict:
    return {"index": span.index, "token": span.token,
            "start_ms": span.start_ms, "end_ms": span.end_ms,
            "removed": span.removed, "replaced_from": span.replaced_from}
