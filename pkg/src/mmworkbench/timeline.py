"""Word-aligned transcript model: span/index mapping and text-level noise edits.

Spans are half-open millisecond intervals. All edit operations return new
objects; word indices stay stable across edits (removal marks a span, it never
reindexes), so recipes that target words by index remain valid.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import MediaFormatError, Violation

#: tolerance for the last span overrunning the media end, in milliseconds
MEDIA_OVERRUN_TOLERANCE_MS = 50


@dataclass(frozen=True)
class WordSpan:
    """One transcript word with its half-open time span in milliseconds."""

    index: int
    token: str
    start_ms: int
    end_ms: int
    removed: bool = False
    replaced_from: str | None = None

    @property
    def duration_ms(self) -> int:
        return self.end_ms - self.start_ms

    @property
    def midpoint_ms(self) -> float:
        return (self.start_ms + self.end_ms) / 2.0


@dataclass(frozen=True)
class Transcript:
    spans: tuple[WordSpan, ...]
    language: str = "en"

    def __post_init__(self):
        object.__setattr__(self, "spans", tuple(self.spans))

    def __len__(self) -> int:
        return len(self.spans)

    def __iter__(self):
        return iter(self.spans)

    def __getitem__(self, i: int) -> WordSpan:
        return self.spans[i]

    def effective_tokens(self) -> list[str]:
        """Tokens with removed words dropped."""
        return [s.token for s in self.spans if not s.removed]


def validate_transcript(t: Transcript, audio_ms: float, video_ms: float) -> list[Violation]:
    """Check every transcript invariant against the given media durations.

    Returns an empty list iff the transcript is well formed. Violations are
    data, not failures: callers decide whether to raise.
    """
    out: list[Violation] = []
    if len(t.spans) == 0:
        return [Violation("empty", "transcript has no spans")]
    for pos, s in enumerate(t.spans):
        if s.index != pos:
            out.append(Violation("index", f"span at position {pos} has index {s.index}", pos))
        if s.start_ms < 0:
            out.append(Violation("negative-start", f"span {pos} starts at {s.start_ms} ms", pos))
        if s.start_ms >= s.end_ms:
            out.append(Violation("zero-length", f"span {pos} zero-length or inverted "
                                                f"({s.start_ms}..{s.end_ms} ms)", pos))
    for pos in range(1, len(t.spans)):
        prev, cur = t.spans[pos - 1], t.spans[pos]
        if cur.start_ms < prev.start_ms:
            out.append(Violation("unsorted", f"span {pos} starts before span {pos - 1}", pos))
        elif cur.start_ms < prev.end_ms:
            out.append(Violation("overlap", f"spans {pos - 1}/{pos} overlap", pos))
    last_end = t.spans[-1].end_ms
    limit = min(audio_ms, video_ms) + MEDIA_OVERRUN_TOLERANCE_MS
    if last_end > limit:
        out.append(Violation("media-overrun",
                             f"last span ends at {last_end} ms but media ends at "
                             f"{min(audio_ms, video_ms):.0f} ms", len(t.spans) - 1))
    return out


def span_to_samples(span: WordSpan, sample_rate: int) -> tuple[int, int]:
    """Half-open audio sample range [lo, hi) covered by the span.

    Floor conversion; boundary samples belong to the earlier word. The caller
    clamps to the actual track length.
    """
    if sample_rate <= 0:
        raise ValueError("sample_rate must be positive")
    lo = span.start_ms * sample_rate // 1000
    hi = span.end_ms * sample_rate // 1000
    return lo, hi


def span_to_frames(span: WordSpan, fps: float) -> tuple[int, int]:
    """Half-open video frame range [lo, hi); a word always claims >= 1 frame."""
    if fps <= 0:
        raise ValueError("fps must be positive")
    lo = _floor_ms_times_rate(span.start_ms, fps)
    hi = _floor_ms_times_rate(span.end_ms, fps)
    return lo, max(lo + 1, hi)


def _floor_ms_times_rate(ms: int, rate: float) -> int:
    # exact integer path for whole-number rates avoids float rounding surprises
    if float(rate).is_integer():
        return ms * int(rate) // 1000
    return math.floor(ms * rate / 1000.0)


def replace_word(t: Transcript, index: int, new_token: str) -> Transcript:
    """Swap the token at `index`, recording the original; timing is untouched."""
    if not 0 <= index < len(t.spans):
        raise IndexError(f"word index {index} out of range (transcript has {len(t.spans)} words)")
    if not new_token:
        raise ValueError("replacement token must be non-empty")
    s = t.spans[index]
    original = s.replaced_from if s.replaced_from is not None else s.token
    spans = list(t.spans)
    spans[index] = replace(s, token=new_token, replaced_from=original)
    return Transcript(tuple(spans), t.language)


def remove_word(t: Transcript, index: int) -> Transcript:
    """Mark the word absent. The span stays, so alignment and indices survive."""
    if not 0 <= index < len(t.spans):
        raise IndexError(f"word index {index} out of range (transcript has {len(t.spans)} words)")
    spans = list(t.spans)
    spans[index] = replace(spans[index], removed=True)
    return Transcript(tuple(spans), t.language)


# ---------------------------------------------------------------------------
# transcript files: JSON array of {"index", "token", "start_ms", "end_ms"}
# ---------------------------------------------------------------------------

def load_transcript(path: str | Path) -> Transcript:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MediaFormatError(f"cannot read transcript {path}: {exc}") from exc
    if not isinstance(raw, list):
        raise MediaFormatError("transcript file must be a JSON array of word objects")
    spans = []
    for i, item in enumerate(raw):
        try:
            spans.append(WordSpan(
                index=int(item["index"]),
                token=str(item["token"]),
                start_ms=int(item["start_ms"]),
                end_ms=int(item["end_ms"]),
                removed=bool(item.get("removed", False)),
                replaced_from=item.get("replaced_from"),
            ))
        except (KeyError, TypeError, ValueError) as exc:
            raise MediaFormatError(f"transcript entry {i} is malformed: {exc}") from exc
    return Transcript(tuple(spans))


def save_transcript(t: Transcript, path: str | Path) -> None:
    payload = []
    for s in t.spans:
        item = {"index": s.index, "token": s.token,
                "start_ms": s.start_ms, "end_ms": s.end_ms}
        if s.removed:
            item["removed"] = True
        if s.replaced_from is not None:
            item["replaced_from"] = s.replaced_from
        payload.append(item)
    Path(path).write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n",
                          encoding="utf-8")


def align_uniform(tokens: list[str], samples: np.ndarray, sample_rate: int,
                  floor_db: float = -40.0, frame_ms: int = 10) -> Transcript:
    """Crude fallback aligner: uniform word spans over the active audio region.

    The active region is bounded by the first and last 10 ms frame whose RMS
    exceeds `floor_db` dBFS. Only good enough to demo without an ASR stack.
    """
    if not tokens:
        raise ValueError("no tokens to align")
    n = len(samples)
    if n == 0:
        raise ValueError("empty audio")
    frame_n = max(1, sample_rate * frame_ms // 1000)
    n_frames = max(1, n // frame_n)
    x = np.asarray(samples, dtype=np.float64)[: n_frames * frame_n]
    frame_rms = np.sqrt(np.mean(x.reshape(n_frames, frame_n) ** 2, axis=1))
    threshold = 10.0 ** (floor_db / 20.0)
    active = np.flatnonzero(frame_rms > threshold)
    if active.size == 0:
        lo_ms, hi_ms = 0, int(n * 1000 / sample_rate)
    else:
        lo_ms = int(active[0]) * frame_ms
        hi_ms = (int(active[-1]) + 1) * frame_ms
    if hi_ms <= lo_ms:
        hi_ms = lo_ms + frame_ms
    edges = np.linspace(lo_ms, hi_ms, len(tokens) + 1)
    spans = []
    for i, tok in enumerate(tokens):
        start, end = int(edges[i]), int(edges[i + 1])
        if end <= start:
            end = start + 1
        spans.append(WordSpan(index=i, token=tok, start_ms=start, end_ms=end))
    return Transcript(tuple(spans))
