import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmworkbench.errors import MediaFormatError
from mmworkbench.timeline import (MEDIA_OVERRUN_TOLERANCE_MS, Transcript, WordSpan,
                                  align_uniform, load_transcript, remove_word,
                                  replace_word, save_transcript, span_to_frames,
                                  span_to_samples, validate_transcript)


def make_transcript(*bounds, tokens=None):
    spans = []
    for i, (start, end) in enumerate(bounds):
        tok = tokens[i] if tokens else f"w{i}"
        spans.append(WordSpan(i, tok, start, end))
    return Transcript(tuple(spans))


class TestSpanConversion:
    def test_samples_floor_exact(self):
        span = WordSpan(0, "x", 200, 800)
        assert span_to_samples(span, 16000) == (3200, 12800)
        assert span_to_samples(span, 44100) == (8820, 35280)

    def test_samples_boundary_belongs_to_later_word(self):
        # 999 ms at 8 kHz floors to 7992, 1000 ms exactly to 8000
        assert span_to_samples(WordSpan(0, "x", 999, 1000), 8000) == (7992, 8000)

    def test_frames_floor(self):
        assert span_to_frames(WordSpan(0, "x", 200, 800), 25.0) == (5, 20)
        assert span_to_frames(WordSpan(0, "x", 799, 800), 25.0) == (19, 20)

    def test_short_word_still_claims_a_frame(self):
        assert span_to_frames(WordSpan(0, "x", 10, 20), 25.0) == (0, 1)
        assert span_to_frames(WordSpan(0, "x", 41, 45), 25.0) == (1, 2)

    def test_fractional_fps(self):
        span = WordSpan(0, "x", 1000, 2000)
        fps = 30000 / 1001
        assert span_to_frames(span, fps) == (math.floor(1000 * fps / 1000),
                                             math.floor(2000 * fps / 1000))

    def test_bad_rates(self):
        with pytest.raises(ValueError):
            span_to_samples(WordSpan(0, "x", 0, 1), 0)
        with pytest.raises(ValueError):
            span_to_frames(WordSpan(0, "x", 0, 1), -25)


class TestValidate:
    def test_clean_transcript_passes(self):
        t = make_transcript((0, 500), (500, 900), (1000, 1500))
        assert validate_transcript(t, 2000, 2000) == []

    def test_empty(self):
        assert [v.rule for v in validate_transcript(Transcript(()), 1000, 1000)] == ["empty"]

    def test_index_mismatch(self):
        t = Transcript((WordSpan(1, "a", 0, 100),))
        assert "index" in {v.rule for v in validate_transcript(t, 1000, 1000)}

    def test_negative_start(self):
        t = Transcript((WordSpan(0, "a", -5, 0),))
        assert "negative-start" in {v.rule for v in validate_transcript(t, 1000, 1000)}

    def test_zero_length_and_inverted(self):
        t = Transcript((WordSpan(0, "a", 100, 100),))
        assert "zero-length" in {v.rule for v in validate_transcript(t, 1000, 1000)}
        t = Transcript((WordSpan(0, "a", 200, 100),))
        assert "zero-length" in {v.rule for v in validate_transcript(t, 1000, 1000)}

    def test_overlap(self):
        t = make_transcript((0, 600), (500, 900))
        assert "overlap" in {v.rule for v in validate_transcript(t, 1000, 1000)}

    def test_unsorted(self):
        t = Transcript((WordSpan(0, "a", 500, 900), WordSpan(1, "b", 0, 400)))
        assert "unsorted" in {v.rule for v in validate_transcript(t, 1000, 1000)}

    def test_overrun_tolerance_boundary(self):
        limit = 4000 + MEDIA_OVERRUN_TOLERANCE_MS
        ok = make_transcript((0, limit))
        assert validate_transcript(ok, 4000, 4000) == []
        over = make_transcript((0, limit + 1))
        assert "media-overrun" in {v.rule for v in validate_transcript(over, 4000, 4000)}

    def test_overrun_uses_shorter_medium(self):
        t = make_transcript((0, 3500))
        assert "media-overrun" in {v.rule for v in validate_transcript(t, 4000, 3000)}


class TestEdits:
    def test_replace_keeps_first_original(self):
        t = make_transcript((0, 100), (100, 200), tokens=["good", "movie"])
        t2 = replace_word(t, 0, "bad")
        t3 = replace_word(t2, 0, "awful")
        assert t3[0].token == "awful"
        assert t3[0].replaced_from == "good"
        # timing untouched, other spans untouched
        assert (t3[0].start_ms, t3[0].end_ms) == (0, 100)
        assert t3[1] == t[1]

    def test_remove_marks_without_reindexing(self):
        t = make_transcript((0, 100), (100, 200), (200, 300))
        t2 = remove_word(t, 1)
        assert [s.index for s in t2] == [0, 1, 2]
        assert t2[1].removed
        assert t2.effective_tokens() == ["w0", "w2"]
        assert remove_word(t2, 1)[1].removed  # idempotent

    def test_out_of_range(self):
        t = make_transcript((0, 100))
        with pytest.raises(IndexError):
            replace_word(t, 1, "x")
        with pytest.raises(IndexError):
            remove_word(t, -1)
        with pytest.raises(ValueError):
            replace_word(t, 0, "")

    def test_originals_are_untouched(self):
        t = make_transcript((0, 100))
        replace_word(t, 0, "y")
        remove_word(t, 0)
        assert t[0].token == "w0" and not t[0].removed


class TestFiles:
    def test_round_trip(self, tmp_path):
        t = make_transcript((0, 250), (250, 700), tokens=["so", "great"])
        t = replace_word(t, 1, "bad")
        t = remove_word(t, 0)
        path = tmp_path / "t.json"
        save_transcript(t, path)
        back = load_transcript(path)
        assert back == t

    def test_plain_file_shape(self, tmp_path):
        path = tmp_path / "t.json"
        save_transcript(make_transcript((0, 100)), path)
        raw = json.loads(path.read_text())
        assert raw == [{"index": 0, "token": "w0", "start_ms": 0, "end_ms": 100}]

    def test_malformed_rejected(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(MediaFormatError):
            load_transcript(bad)
        bad.write_text('{"a": 1}')
        with pytest.raises(MediaFormatError):
            load_transcript(bad)
        bad.write_text('[{"index": 0, "token": "x"}]')
        with pytest.raises(MediaFormatError):
            load_transcript(bad)


@st.composite
def transcripts(draw):
    n = draw(st.integers(min_value=1, max_value=8))
    gaps = draw(st.lists(st.integers(0, 300), min_size=n, max_size=n))
    lengths = draw(st.lists(st.integers(1, 900), min_size=n, max_size=n))
    spans = []
    cursor = 0
    for i in range(n):
        start = cursor + gaps[i]
        end = start + lengths[i]
        spans.append(WordSpan(i, f"w{i}", start, end))
        cursor = end
    return Transcript(tuple(spans))


@given(transcripts())
def test_generated_transcripts_validate(t):
    assert validate_transcript(t, t[-1].end_ms + 1, t[-1].end_ms + 1) == []


@given(transcripts(), st.sampled_from([8000, 16000, 22050, 44100, 48000]))
def test_sample_ranges_partition(t, sr):
    """Non-overlapping spans map to non-overlapping half-open sample ranges."""
    ranges = [span_to_samples(s, sr) for s in t]
    for (lo, hi), (lo2, hi2) in zip(ranges, ranges[1:]):
        assert lo <= hi
        assert hi <= lo2

    frame_ranges = [span_to_frames(s, 25.0) for s in t]
    for lo, hi in frame_ranges:
        assert hi >= lo + 1


@settings(deadline=None)
@given(st.integers(1, 6), st.integers(0, 3))
def test_align_uniform_covers_tokens(n_tokens, seed):
    rng = np.random.default_rng(seed)
    sr = 16000
    silence = np.zeros(sr // 2)
    speech = 0.3 * rng.standard_normal(sr * 2)
    samples = np.concatenate([silence, speech, silence])
    t = align_uniform([f"tok{i}" for i in range(n_tokens)], samples, sr)
    assert len(t) == n_tokens
    assert validate_transcript(t, len(samples) * 1000 / sr, math.inf) == []
    # the active region starts near the end of the leading silence
    assert 400 <= t[0].start_ms <= 600
