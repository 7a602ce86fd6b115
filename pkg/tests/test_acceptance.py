"""Acceptance suite: one test per headline guarantee of the workbench.

Each test pins the published tolerance (and, where stated, a runtime budget)
and prints the measured margin, so a verbose run doubles as a calibration
record. Everything here goes through public entry points only; the oracles
are constructed independently inside each test.
"""

from __future__ import annotations

import json
import re
import time
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner
from jsonschema import validate

import schemas
from helpers import noisy_sine, textured_panorama
from mmworkbench.audio import AudioTrack, mix_noise, mute, rms, spectral_denoise
from mmworkbench.cli import main
from mmworkbench.demo import all_words_blank_recipe, mci_defense
from mmworkbench.features import FeatureTrack, interpolate_missing
from mmworkbench.motion import estimate_motion, mci_interpolate
from mmworkbench.noise_profiles import PROFILE_IDS, builtin_profiles
from mmworkbench.store import SessionStore
from mmworkbench.video import Frame, VideoTrack, blank, blur_frame, gaussian_blur, \
    gaussian_kernel

GOLDEN = json.loads((Path(__file__).parent / "data" / "golden_scenario.json")
                    .read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# audio: injection calibration and the spectral gate
# ---------------------------------------------------------------------------

def test_snr_calibration():
    """20 seeded (signal, profile, snr_db) cases land within 0.1 dB of request."""
    t0 = time.perf_counter()
    sr = 16000
    profiles = builtin_profiles(sr)
    t = np.arange(int(1.5 * sr)) / sr
    worst = 0.0
    for case in range(20):
        snr_db = (-10.0, 0.0, 10.0, 20.0)[case % 4]
        profile = profiles[PROFILE_IDS[case % len(PROFILE_IDS)]]
        rng = np.random.default_rng(900 + case)
        freq = rng.uniform(120.0, 900.0)
        amp = rng.uniform(0.03, 0.06)
        track = AudioTrack(amp * np.sin(2 * np.pi * freq * t)
                           + (amp / 4) * np.sin(2 * np.pi * 2.3 * freq * t), sr)
        span = (len(track) // 3, 2 * len(track) // 3)

        mixed = mix_noise(track, span, profile, snr_db)
        lo, hi = span
        injected = mixed.samples[lo:hi] - track.samples[lo:hi]
        measured = 20.0 * np.log10(rms(track, span)
                                   / np.sqrt(np.mean(injected ** 2)))
        worst = max(worst, abs(measured - snr_db))
        assert measured == pytest.approx(snr_db, abs=0.1)
        # bit-exact outside the span
        assert np.array_equal(mixed.samples[:lo], track.samples[:lo])
        assert np.array_equal(mixed.samples[hi:], track.samples[hi:])
    dt = time.perf_counter() - t0
    assert dt < 5.0
    print(f"snr calibration: worst |measured - requested| = {worst:.3e} dB "
          f"over 20 cases (bound 0.1), {dt:.2f}s")


def test_spectral_round_trip_identity():
    """gate_factor = 0 reconstructs the interior to within 1e-6 on 10 signals."""
    win, hop = 1024, 512
    worst = 0.0
    for seed in range(10):
        rng = np.random.default_rng(1900 + seed)
        n = 5000 + 617 * seed
        x = np.clip(0.3 * rng.standard_normal(n), -1.0, 1.0)
        track = AudioTrack(x, 16000)
        out = spectral_denoise(track, win=win, hop=hop, gate_factor=0.0)
        err = float(np.max(np.abs(out.samples[hop:n - hop]
                                  - track.samples[hop:n - hop])))
        worst = max(worst, err)
        assert err <= 1e-6
    print(f"spectral identity: worst interior error = {worst:.3e} (bound 1e-6)")


def test_denoise_gain_on_noisy_tone():
    """440 Hz tone + white noise at 0 dB comes out at >= 10 dB against clean."""
    t0 = time.perf_counter()
    win = 1024
    gains = []
    for seed in (3, 17, 29):
        track, clean = noisy_sine(440.0, 0.0, seed)
        interior = slice(win, len(track) - win)

        def snr_vs_clean(samples):
            resid = samples[interior] - clean[interior]
            return 20.0 * np.log10(np.sqrt(np.mean(clean[interior] ** 2))
                                   / np.sqrt(np.mean(resid ** 2)))

        snr_in = snr_vs_clean(track.samples)
        snr_out = snr_vs_clean(spectral_denoise(track).samples)
        gains.append((snr_in, snr_out))
        assert snr_out >= 10.0
    dt = time.perf_counter() - t0
    assert dt < 5.0
    report = ", ".join(f"{i:.2f}->{o:.2f}" for i, o in gains)
    print(f"denoise gain: SNR dB in->out {report} (floor 10.0), {dt:.2f}s")


# ---------------------------------------------------------------------------
# motion: shift recovery and mid-frame interpolation
# ---------------------------------------------------------------------------

def _crop(pano, ox, oy, size=128):
    return pano[oy:oy + size, ox:ox + size]


def test_motion_shift_recovery_and_interpolation():
    """Integer shifts of +/-2, 4, 8 recover exactly on >= 95% of interior
    blocks, and the interpolated mid-frame of a uniform translation stays
    within 2 gray levels of the analytic one."""
    t0 = time.perf_counter()
    pano = textured_panorama(seed=5, size=168)
    origin, size, bs = 20, 128, 16
    base = _crop(pano, origin, origin, size)

    worst_frac = 1.0
    for mag in (2, 4, 8):
        for dx, dy in ((mag, 0), (-mag, 0), (0, mag), (0, -mag)):
            cur = _crop(pano, origin + dx, origin + dy, size)
            field = estimate_motion(base, cur, search_range=16, block_size=bs)
            gh, gw = field.grid_shape
            hits = total = 0
            for by in range(gh):
                if not (0 <= by * bs + dy and (by + 1) * bs + dy <= size):
                    continue
                for bx in range(gw):
                    if not (0 <= bx * bs + dx and (bx + 1) * bs + dx <= size):
                        continue
                    total += 1
                    hits += tuple(field.vectors[by, bx]) == (dx, dy)
            frac = hits / total
            worst_frac = min(worst_frac, frac)
            assert frac >= 0.95, f"shift ({dx},{dy}): {hits}/{total} exact"

    worst_err = 0.0
    for dx, dy in ((6, 0), (-4, 2)):
        prev = Frame(_crop(pano, origin, origin, size).copy())
        nxt = Frame(_crop(pano, origin + dx, origin + dy, size).copy())
        truth = _crop(pano, origin + dx // 2, origin + dy // 2, size)
        mid = mci_interpolate(prev, nxt, 0.5)
        err = float(np.mean(np.abs(mid.luma.astype(float) - truth.astype(float))))
        worst_err = max(worst_err, err)
        assert err <= 2.0

    dt = time.perf_counter() - t0
    assert dt < 10.0
    print(f"motion: worst exact-recovery fraction {worst_frac:.3f} (floor 0.95), "
          f"mid-frame mean error {worst_err:.3f} gray (bound 2.0), {dt:.2f}s")


# ---------------------------------------------------------------------------
# video ops: blur and blank obey their contracts
# ---------------------------------------------------------------------------

def test_blur_and_blank_contracts():
    for sigma in (0.6, 1.0, 2.5, 4.0):
        assert abs(float(gaussian_kernel(sigma).sum()) - 1.0) <= 1e-9

    uniform = Frame(np.full((24, 32), 137, dtype=np.uint8))
    assert np.array_equal(blur_frame(uniform, 2.0).luma, uniform.luma)

    rng = np.random.default_rng(77)
    frames = [Frame(rng.integers(0, 256, size=(24, 32), dtype=np.uint8))
              for _ in range(12)]
    track = VideoTrack(frames, 32, 24, 25)

    blurred = gaussian_blur(track, (4, 8), 1.5)
    for i in range(len(track)):
        if 4 <= i < 8:
            assert np.array_equal(blurred.frames[i].luma,
                                  blur_frame(track.frames[i], 1.5).luma)
        else:
            assert blurred.frames[i] is track.frames[i]

    blanked = blank(track, (4, 8))
    assert blanked.missing == {4, 5, 6, 7}
    for i in range(len(track)):
        if 4 <= i < 8:
            assert not blanked.frames[i].luma.any()
        else:
            assert blanked.frames[i] is track.frames[i]
    assert not track.missing and all(f.luma.any() for f in track.frames)

    # audio ops leave everything outside the span bit-identical too
    samples = np.clip(0.2 * rng.standard_normal(8000), -1, 1)
    audio = AudioTrack(samples, 16000)
    muted = mute(audio, (2000, 5000))
    assert not muted.samples[2000:5000].any()
    assert np.array_equal(muted.samples[:2000], audio.samples[:2000])
    assert np.array_equal(muted.samples[5000:], audio.samples[5000:])
    print("blur/blank: kernel normalization, uniform fixed point, missing flags, "
          "span isolation all hold")


# ---------------------------------------------------------------------------
# features: interpolation over missing words
# ---------------------------------------------------------------------------

def test_feature_interpolation_reconstruction():
    """Affine ramps survive interior gaps of length 1-5 exactly; edge gaps
    copy the nearest present row."""
    n, names = 16, ["a", "b", "c"]
    ramp = np.stack([[0.5 * i + 1.0, -0.25 * i + 3.0, 2.0 * i]
                     for i in range(n)])

    worst = 0.0
    for gap in range(1, 6):
        values = ramp.copy()
        values[6:6 + gap] = np.nan
        track = FeatureTrack("audio", names, values, step_ms=10.0)
        fixed, notes = interpolate_missing(track)
        assert notes == []
        assert not fixed.missing_mask().any()
        err = float(np.max(np.abs(fixed.values - ramp)))
        worst = max(worst, err)
        assert err <= 1e-9

    values = ramp.copy()
    values[:2] = np.nan
    values[-3:] = np.nan
    fixed, _ = interpolate_missing(
        FeatureTrack("audio", names, values, step_ms=10.0))
    for i in (0, 1):
        assert np.array_equal(fixed.values[i], ramp[2])
    for i in (n - 3, n - 2, n - 1):
        assert np.array_equal(fixed.values[i], ramp[n - 4])
    assert np.array_equal(fixed.values[2:n - 3], ramp[2:n - 3])
    print(f"feature interpolation: worst ramp error {worst:.3e} (bound 1e-9), "
          "edge copy exact")


# ---------------------------------------------------------------------------
# the end-to-end demo scenario
# ---------------------------------------------------------------------------

def test_demo_scenario_matches_golden(demo_dir, tmp_path):
    """Blanking the video over every word drops the clip to Neutral (visual
    excluded from the fuse); interpolation repair brings Positive back. The
    concrete scores are pinned by tests/data/golden_scenario.json."""
    t0 = time.perf_counter()
    store = SessionStore(tmp_path / "store")
    session = store.create_session(demo_dir / "audio.wav", demo_dir / "video.y4m",
                                   demo_dir / "transcript.json")
    store.apply_recipe(session.id, all_words_blank_recipe())
    store.apply_defense(session.id, mci_defense())
    doc = store.comparison(session.id)

    for variant, want in GOLDEN.items():
        got = doc["predictions"][variant]
        assert got["label"] == want["label"], variant
        assert got["fused"] == pytest.approx(want["fused"], abs=1e-9), variant
        for modality, entry in want["scores"].items():
            assert got["scores"][modality]["available"] == entry["available"], \
                (variant, modality)
            assert got["scores"][modality]["score"] == pytest.approx(
                entry["score"], abs=1e-9), (variant, modality)

    dt = time.perf_counter() - t0
    assert dt < 30.0
    labels = " / ".join(doc["predictions"][v]["label"]
                        for v in ("original", "noised", "defended"))
    print(f"demo scenario: {labels}, scores match golden file, {dt:.2f}s")


def test_repeated_runs_are_byte_identical(demo_dir, tmp_path):
    runner = CliRunner()
    archives = []
    for name in ("one", "two"):
        out = tmp_path / name
        result = runner.invoke(main, [
            "run",
            "--audio", str(demo_dir / "audio.wav"),
            "--video", str(demo_dir / "video.y4m"),
            "--transcript", str(demo_dir / "transcript.json"),
            "--recipe", str(demo_dir / "recipe.json"),
            "--defense", str(demo_dir / "defense.json"),
            "--out", str(out),
        ], catch_exceptions=False)
        assert result.exit_code == 0, result.output
        archives.append((out / "export.zip").read_bytes())
    assert archives[0] == archives[1]
    print(f"determinism: two runs produced identical {len(archives[0])}-byte archives")


# ---------------------------------------------------------------------------
# the HTTP contract
# ---------------------------------------------------------------------------

def test_http_contract(client, demo_dir):
    def uploads():
        return {
            "audio": ("audio.wav", (demo_dir / "audio.wav").read_bytes(), "audio/wav"),
            "video": ("video.y4m", (demo_dir / "video.y4m").read_bytes(),
                      "video/x-yuv4mpeg"),
            "transcript": ("transcript.json",
                           (demo_dir / "transcript.json").read_bytes(),
                           "application/json"),
        }

    r = client.post("/api/sessions", files=uploads())
    assert r.status_code == 201
    sid = r.json()["id"]
    assert re.fullmatch(schemas.SESSION_ID_PATTERN[1:-1], sid)

    validate(client.get("/api/sessions").json(), schemas.SESSION_LISTING)
    validate(client.get("/api/noise-profiles").json(), schemas.NOISE_PROFILES)

    r = client.put(f"/api/sessions/{sid}/recipe", json=all_words_blank_recipe())
    assert r.status_code == 200
    validate(r.json(), schemas.COMPARISON)

    r = client.put(f"/api/sessions/{sid}/defense", json=mci_defense())
    assert r.status_code == 200
    doc = r.json()
    validate(doc, schemas.COMPARISON)
    assert set(doc["variants"]) == {"original", "noised", "defended"}
    assert client.get(f"/api/sessions/{sid}/comparison").json() == doc

    # violations come back as structured 400s
    r = client.put(f"/api/sessions/{sid}/recipe",
                   json={"ops": [{"word_index": 0, "method": "Vignette",
                                  "params": {}}]})
    assert r.status_code == 400
    validate(r.json(), schemas.ERROR_400)
    assert r.json()["violations"][0]["rule"] == "recipe.method"

    bad = uploads()
    bad["audio"] = ("audio.wav", b"this is not a wav", "audio/wav")
    r = client.post("/api/sessions", files=bad)
    assert r.status_code == 400
    validate(r.json(), schemas.ERROR_400)
    assert any(v["rule"] == "media" for v in r.json()["violations"])

    r = client.get("/api/sessions/nosuchsession0/comparison")
    assert r.status_code == 404
    assert "unknown session" in r.json()["detail"]

    assert client.delete(f"/api/sessions/{sid}").status_code == 204
    assert client.get(f"/api/sessions/{sid}/comparison").status_code == 404
    print("http contract: create/recipe/defense/comparison validated, "
          "400 and 404 paths structured")
